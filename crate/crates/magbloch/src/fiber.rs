//! Fiber Hamiltonians in the Zak representation and their spectra.
//!
//! H̃(κ)_{n,n'} = |k+G|² δ_{nn'} − Â(n−n')·(2k+G+G') + (Â⋆Â)(n−n') + V̂(n−n')
//! with k = Σ κ_j e*_j. The matrix is Hermitian exactly: reality of V and A is
//! enforced coefficient-wise, and each term above is manifestly
//! conjugate-symmetric under (n,n') exchange.

use crate::basis::PlaneWaveBasis;
use crate::error::{CoreError, Result};
use crate::model::LatticeModel;
use crate::{C64, CMatrix, NIdx};
use std::collections::BTreeMap;

pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FiberMatrix {
    pub kappa: Vec<f64>,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone)]
pub struct BandSolution {
    pub kappa: Vec<f64>,
    /// nondecreasing energies
    pub energies: Vec<f64>,
    /// column j = eigenvector of energies[j], plane-wave coefficients
    pub vectors: CMatrix,
}

/// Coefficient convolution Σ_c Â_c ⋆ Â_c of the vector potential.
fn a_dot_a(model: &LatticeModel) -> BTreeMap<NIdx, C64> {
    let mut half: BTreeMap<NIdx, C64> = BTreeMap::new();
    for comp in &model.vector_potential.components {
        for (n1, z1) in comp.iter() {
            for (n2, z2) in comp.iter() {
                let mut key = *n1;
                for (k, v) in key.iter_mut().zip(n2.iter()) {
                    *k += v;
                }
                *half.entry(key).or_default() += z1 * z2;
            }
        }
    }
    // canonicalize conjugate symmetry exactly: keep the lexicographically
    // smaller of each ±q pair as computed, mirror the other
    let keys: Vec<NIdx> = half.keys().copied().collect();
    let mut out = BTreeMap::new();
    for q in keys {
        let mut mq = q;
        for v in &mut mq {
            *v = -*v;
        }
        if q <= mq {
            let z = half[&q];
            out.insert(q, z);
            if q != mq {
                out.insert(mq, z.conj());
            }
        }
    }
    out
}

/// Assemble H̃(κ). κ may lie outside [0,1)^d; the matrix then represents the
/// fiber at that unreduced momentum (used for embedding diagnostics).
pub fn assemble_fiber(
    model: &LatticeModel,
    basis: &PlaneWaveBasis,
    kappa: &[f64],
) -> Result<FiberMatrix> {
    let d = model.dim();
    if basis.dim != d {
        return Err(CoreError::WrongDimension {
            expected: d,
            got: basis.dim,
        });
    }
    let n_cut = basis.cutoff;
    if model.potential.cutoff() > 2 * n_cut {
        return Err(CoreError::CutoffTooSmall {
            idx: vec![model.potential.cutoff(); 1],
            max: 2 * n_cut,
        });
    }
    if 2 * model.vector_potential.cutoff() > 2 * n_cut {
        return Err(CoreError::CutoffTooSmall {
            idx: vec![model.vector_potential.cutoff(); 1],
            max: n_cut,
        });
    }
    let m = basis.len();
    let k = model.lattice.momentum(kappa);
    let gs: Vec<Vec<f64>> = basis.iter().map(|n| model.lattice.reciprocal(n)).collect();
    let aa = a_dot_a(model);
    let mut h = CMatrix::zeros(m, m);
    // kinetic diagonal
    for a in 0..m {
        let kin: f64 = (0..d).map(|c| (k[c] + gs[a][c]).powi(2)).sum();
        h[(a, a)] = C64::new(kin, 0.0);
    }
    // scalar terms: V̂(q) + (Â⋆Â)(q), over stored coefficients
    let mut scalar: BTreeMap<NIdx, C64> = BTreeMap::new();
    for (q, z) in model.potential.iter() {
        *scalar.entry(*q).or_default() += z;
    }
    for (q, z) in &aa {
        *scalar.entry(*q).or_default() += z;
    }
    for (q, z) in &scalar {
        add_banded(&mut h, basis, q, |_, _| *z);
    }
    // linear A term: −Â_c(q)·(2k+G+G')_c
    for c in 0..d {
        let comp: Vec<(NIdx, C64)> = model.vector_potential.components[c]
            .iter()
            .map(|(n, z)| (*n, *z))
            .collect();
        for (q, z) in comp {
            add_banded(&mut h, basis, &q, |a, b| {
                -z * (2.0 * k[c] + gs[a][c] + gs[b][c])
            });
        }
    }
    Ok(FiberMatrix {
        kappa: kappa.to_vec(),
        matrix: h,
    })
}

/// Add f(a,b) to every entry (a,b) with n_a − n_b = q.
fn add_banded<F: Fn(usize, usize) -> C64>(
    h: &mut CMatrix,
    basis: &PlaneWaveBasis,
    q: &NIdx,
    f: F,
) {
    for (a, n) in basis.iter().enumerate() {
        let mut nb = *n;
        for (x, y) in nb.iter_mut().zip(q.iter()) {
            *x -= y;
        }
        if let Some(b) = basis.position(&nb) {
            h[(a, b)] += f(a, b);
        }
    }
}

/// Full Hermitian eigendecomposition with the deterministic tie-break:
/// eigenvalues ascending; within clusters closer than `DEGENERACY_TOL`,
/// vectors ordered by descending magnitude of their first maximal-modulus
/// coefficient; every vector's phase fixed so that entry is real positive.
pub fn solve_bands(fiber: &FiberMatrix) -> Result<BandSolution> {
    let m = fiber.matrix.nrows();
    let se = fiber.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    if se.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(CoreError::NumericalFailure {
            kappa: fiber.kappa.clone(),
        });
    }
    let mut energies: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(m, m);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &se.eigenvectors.column(i));
    }
    // degenerate clusters
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && energies[end] - energies[end - 1] < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let mut cols: Vec<usize> = (start..end).collect();
            cols.sort_by(|&a, &b| {
                let ma = peak_modulus(&vectors, a);
                let mb = peak_modulus(&vectors, b);
                mb.partial_cmp(&ma).unwrap()
            });
            let copy = vectors.clone();
            let es: Vec<f64> = energies[start..end].to_vec();
            for (off, &c) in cols.iter().enumerate() {
                vectors.set_column(start + off, &copy.column(c));
                energies[start + off] = es[c - start];
            }
        }
        start = end;
    }
    // phase fixing
    for col in 0..m {
        let (peak, _) = peak_entry(&vectors, col);
        let z = vectors[(peak, col)];
        if z.norm() > 0.0 {
            let phase = z.conj() / z.norm();
            for r in 0..m {
                vectors[(r, col)] *= phase;
            }
        }
    }
    Ok(BandSolution {
        kappa: fiber.kappa.clone(),
        energies,
        vectors,
    })
}

fn peak_entry(vectors: &CMatrix, col: usize) -> (usize, f64) {
    let mut best = (0usize, -1.0f64);
    for r in 0..vectors.nrows() {
        let v = vectors[(r, col)].norm();
        if v > best.1 + 1e-15 {
            best = (r, v);
        }
    }
    best
}

fn peak_modulus(vectors: &CMatrix, col: usize) -> f64 {
    peak_entry(vectors, col).1
}

/// Bands along a path of reduced momenta: one row (κ, E_1..E_count) per point.
pub fn band_path(
    model: &LatticeModel,
    basis: &PlaneWaveBasis,
    path: &[Vec<f64>],
    count: usize,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if count > basis.len() {
        return Err(CoreError::Config(format!(
            "band count {count} exceeds basis size {}",
            basis.len()
        )));
    }
    let mut rows = Vec::with_capacity(path.len());
    for kappa in path {
        let fib = assemble_fiber(model, basis, kappa)?;
        let sol = solve_bands(&fib)?;
        rows.push((kappa.clone(), sol.energies[..count].to_vec()));
    }
    Ok(rows)
}
