//! Relevant-band spectral projector fields P̃(κ) on uniform k-grids.
//!
//! The field is stored as an orthonormal frame F(κ) (M×m) per grid point with
//! P̃ = F F†; the full matrices are materialized on demand and in the binary
//! container. Crossing the Brillouin-zone boundary uses the Zak index-shift
//! embedding V_j with P̃(κ+ê_j) = V_j P̃(κ) V_j†, rows leaving the cutoff cube
//! dropped.

use crate::basis::PlaneWaveBasis;
use crate::error::{CoreError, Result};
use crate::fiber::{assemble_fiber, solve_bands, BandSolution};
use crate::kgrid::KGrid;
use crate::model::LatticeModel;
use crate::{C64, CMatrix};
use rayon::prelude::*;
use std::io::{Read, Write};

pub const PROJECTOR_TOL: f64 = 1e-10;
pub const DEFAULT_GAP_TOL: f64 = 1e-6;

/// Band index set (0-based internally; constructors accept both conventions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantSet {
    indices: Vec<usize>,
}

impl RelevantSet {
    /// Lowest m bands.
    pub fn lowest(m: usize) -> Self {
        assert!(m >= 1);
        RelevantSet {
            indices: (0..m).collect(),
        }
    }

    /// Arbitrary 1-based band indices, as in band-structure conventions.
    pub fn from_one_based(idx: &[usize]) -> Result<Self> {
        if idx.is_empty() || idx.iter().any(|&i| i == 0) {
            return Err(CoreError::Config("band indices are 1-based, m >= 1".into()));
        }
        let mut v: Vec<usize> = idx.iter().map(|&i| i - 1).collect();
        v.sort_unstable();
        v.dedup();
        Ok(RelevantSet { indices: v })
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, band: usize) -> bool {
        self.indices.binary_search(&band).is_ok()
    }
}

#[derive(Debug, Clone)]
pub struct GapReport {
    /// min over the grid of dist(relevant eigenvalues, rest)
    pub c_g: f64,
    pub location: Vec<usize>,
    pub pass: bool,
    pub tol: f64,
}

/// Unitary index-shift map: out[a] = in[src[a]], rows leaving the cube dropped.
#[derive(Debug, Clone)]
pub struct EmbedMap {
    src: Vec<Option<usize>>,
}

impl EmbedMap {
    pub fn identity(n: usize) -> Self {
        EmbedMap {
            src: (0..n).map(Some).collect(),
        }
    }

    /// Map for the fiber transport κ → κ + step·ê_axis on the given basis.
    pub fn shift(basis: &PlaneWaveBasis, axis: usize, step: i32) -> Self {
        let src = basis
            .iter()
            .map(|n| {
                let mut s = *n;
                s[axis] += step;
                basis.position(&s)
            })
            .collect();
        EmbedMap { src }
    }

    pub fn apply_vec(&self, v: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_fn(self.src.len(), |a, _| match self.src[a] {
            Some(b) => v[b],
            None => C64::default(),
        })
    }

    /// Apply to every column of an M×m frame.
    pub fn apply_frame(&self, f: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.src.len(), f.ncols(), |a, c| match self.src[a] {
            Some(b) => f[(b, c)],
            None => C64::default(),
        })
    }

    /// V P V† for a full matrix.
    pub fn apply_mat(&self, p: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.src.len(), self.src.len(), |a, b| {
            match (self.src[a], self.src[b]) {
                (Some(x), Some(y)) => p[(x, y)],
                _ => C64::default(),
            }
        })
    }

    /// Fraction of rows dropped (a coarse truncation indicator).
    pub fn dropped_fraction(&self) -> f64 {
        let dropped = self.src.iter().filter(|s| s.is_none()).count();
        dropped as f64 / self.src.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct ProjectorField {
    pub grid: KGrid,
    pub m: usize,
    pub basis_size: usize,
    pub cutoff: i32,
    frames: Vec<CMatrix>,
    /// per axis: embedding for +ê_j and −ê_j
    emb_up: Vec<EmbedMap>,
    emb_down: Vec<EmbedMap>,
    pub gap: Option<GapReport>,
}

/// Diagonalize the fiber Hamiltonians on every grid point, in parallel.
pub fn solve_grid(
    model: &LatticeModel,
    basis: &PlaneWaveBasis,
    grid: &KGrid,
) -> Result<Vec<BandSolution>> {
    let slots: Vec<Vec<usize>> = grid.iter_indices().collect();
    slots
        .par_iter()
        .map(|idx| {
            let kappa = grid.kappa(idx);
            solve_bands(&assemble_fiber(model, basis, &kappa)?)
        })
        .collect()
}

/// Exact minimum over grid points of dist(relevant eigenvalues, complement).
pub fn gap_report(solutions: &[BandSolution], grid: &KGrid, set: &RelevantSet, tol: f64) -> GapReport {
    let mut c_g = f64::INFINITY;
    let mut loc = vec![0usize; grid.dim()];
    for (s, sol) in solutions.iter().enumerate() {
        let m_tot = sol.energies.len();
        let mut dist = f64::INFINITY;
        for (band, &e) in sol.energies.iter().enumerate() {
            if set.contains(band) {
                continue;
            }
            for &r in set.indices() {
                if r < m_tot {
                    dist = dist.min((e - sol.energies[r]).abs());
                }
            }
        }
        if dist < c_g {
            c_g = dist;
            loc = grid.unslot(s);
        }
    }
    GapReport {
        c_g,
        location: loc,
        pass: c_g > tol,
        tol,
    }
}

impl ProjectorField {
    /// Build from a physical model; refuses when the local gap fails.
    pub fn build(
        model: &LatticeModel,
        basis: &PlaneWaveBasis,
        grid: &KGrid,
        set: &RelevantSet,
        gap_tol: f64,
    ) -> Result<Self> {
        if grid.dim() != model.dim() {
            return Err(CoreError::WrongDimension {
                expected: model.dim(),
                got: grid.dim(),
            });
        }
        let solutions = solve_grid(model, basis, grid)?;
        let gap = gap_report(&solutions, grid, set, gap_tol);
        if !gap.pass {
            return Err(CoreError::GapFailure {
                gap: gap.c_g,
                at: gap.location.clone(),
                tol: gap_tol,
            });
        }
        Ok(Self::from_solutions(&solutions, basis, grid, set, Some(gap)))
    }

    pub fn from_solutions(
        solutions: &[BandSolution],
        basis: &PlaneWaveBasis,
        grid: &KGrid,
        set: &RelevantSet,
        gap: Option<GapReport>,
    ) -> Self {
        let m = set.m();
        let frames: Vec<CMatrix> = solutions
            .iter()
            .map(|sol| {
                let mm = sol.vectors.nrows();
                let mut f = CMatrix::zeros(mm, m);
                for (c, &band) in set.indices().iter().enumerate() {
                    f.set_column(c, &sol.vectors.column(band));
                }
                f
            })
            .collect();
        let d = grid.dim();
        ProjectorField {
            grid: grid.clone(),
            m,
            basis_size: basis.len(),
            cutoff: basis.cutoff,
            frames,
            emb_up: (0..d).map(|j| EmbedMap::shift(basis, j, 1)).collect(),
            emb_down: (0..d).map(|j| EmbedMap::shift(basis, j, -1)).collect(),
            gap,
        }
    }

    /// Synthetic field from a closed-form projector map κ → P(κ).
    /// Embeddings are the identity (the map is exactly periodic).
    pub fn from_closure<F>(grid: &KGrid, m: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> CMatrix + Sync,
    {
        let slots: Vec<Vec<usize>> = grid.iter_indices().collect();
        let frames: Vec<CMatrix> = slots
            .par_iter()
            .map(|idx| {
                let p = f(&grid.kappa(idx));
                frame_of_projector(&p, m)
            })
            .collect();
        let n = frames[0].nrows();
        ProjectorField {
            grid: grid.clone(),
            m,
            basis_size: n,
            cutoff: 0,
            frames,
            emb_up: (0..grid.dim()).map(|_| EmbedMap::identity(n)).collect(),
            emb_down: (0..grid.dim()).map(|_| EmbedMap::identity(n)).collect(),
            gap: None,
        }
    }

    pub fn frame(&self, slot: usize) -> &CMatrix {
        &self.frames[slot]
    }

    pub fn frame_at(&self, idx: &[usize]) -> &CMatrix {
        &self.frames[self.grid.slot(idx)]
    }

    /// Replace a frame (used by gauge constructions on copies).
    pub fn set_frame(&mut self, slot: usize, f: CMatrix) {
        self.frames[slot] = f;
    }

    /// P̃ = F F† materialized.
    pub fn matrix(&self, slot: usize) -> CMatrix {
        let f = &self.frames[slot];
        f * f.adjoint()
    }

    pub fn matrix_at(&self, idx: &[usize]) -> CMatrix {
        self.matrix(self.grid.slot(idx))
    }

    pub fn embedding(&self, axis: usize, up: bool) -> &EmbedMap {
        if up {
            &self.emb_up[axis]
        } else {
            &self.emb_down[axis]
        }
    }

    /// Neighbor projector in ±axis direction, transported through the
    /// embedding on wrap.
    pub fn neighbor_matrix(&self, idx: &[usize], axis: usize, up: bool) -> CMatrix {
        let (nb, crossed) = if up {
            self.grid.step_up(idx, axis)
        } else {
            self.grid.step_down(idx, axis)
        };
        let f = self.frame_at(&nb);
        if crossed {
            let emb = self.embedding(axis, up);
            let g = emb.apply_frame(f);
            &g * g.adjoint()
        } else {
            f * f.adjoint()
        }
    }

    /// Central-difference ∂_j P̃ at a grid point, wrapped through the
    /// embedding and symmetrized.
    pub fn derivative_at(&self, idx: &[usize], axis: usize) -> CMatrix {
        let n = self.grid.dims[axis] as f64;
        let up = self.neighbor_matrix(idx, axis, true);
        let dn = self.neighbor_matrix(idx, axis, false);
        let d = (up - dn) * C64::new(n / 2.0, 0.0);
        let adj = d.adjoint();
        (d + adj) * C64::new(0.5, 0.0)
    }

    /// Q̃_ij(κ) = P̃ [∂_iP̃, ∂_jP̃] P̃.
    pub fn q_tilde_at(&self, idx: &[usize], i: usize, j: usize) -> CMatrix {
        let p = self.matrix_at(idx);
        let di = self.derivative_at(idx, i);
        let dj = self.derivative_at(idx, j);
        let comm = &di * &dj - &dj * &di;
        &p * comm * &p
    }

    /// Tr W̃(κ) = Tr(Q̃₁₂Q̃₃₄ − Q̃₁₃Q̃₂₄ + Q̃₁₄Q̃₂₃); d = 4 only.
    pub fn tr_w_tilde_at(&self, idx: &[usize]) -> Result<C64> {
        if self.grid.dim() != 4 {
            return Err(CoreError::WrongDimension {
                expected: 4,
                got: self.grid.dim(),
            });
        }
        let q = |i: usize, j: usize| self.q_tilde_at(idx, i, j);
        let w = q(0, 1) * q(2, 3) - q(0, 2) * q(1, 3) + q(0, 3) * q(1, 2);
        Ok(w.trace())
    }

    /// Worst idempotency / hermiticity / trace residuals over the grid.
    pub fn invariant_residuals(&self) -> (f64, f64, f64) {
        let mut idem = 0.0f64;
        let mut herm = 0.0f64;
        let mut tr = 0.0f64;
        for s in 0..self.grid.len() {
            let p = self.matrix(s);
            idem = idem.max((&p * &p - &p).norm());
            herm = herm.max((&p - p.adjoint()).norm());
            tr = tr.max((p.trace() - C64::new(self.m as f64, 0.0)).norm());
        }
        (idem, herm, tr)
    }

    /// Max over sampled slots of ‖V_j P̃(κ) V_j† − P̃(κ+ê_j)‖ with the exact
    /// fiber at κ+ê_j assembled directly; measures the cutoff truncation.
    pub fn embedding_residual(
        &self,
        model: &LatticeModel,
        basis: &PlaneWaveBasis,
        set: &RelevantSet,
        axis: usize,
        sample: usize,
    ) -> Result<f64> {
        let mut worst = 0.0f64;
        let total = self.grid.len();
        let stride = (total / sample.max(1)).max(1);
        for s in (0..total).step_by(stride) {
            let idx = self.grid.unslot(s);
            let mut kappa = self.grid.kappa(&idx);
            kappa[axis] += 1.0;
            let sol = solve_bands(&assemble_fiber(model, basis, &kappa)?)?;
            let mut f = CMatrix::zeros(basis.len(), set.m());
            for (c, &band) in set.indices().iter().enumerate() {
                f.set_column(c, &sol.vectors.column(band));
            }
            let p_exact = &f * f.adjoint();
            let shifted = self.emb_up[axis].apply_mat(&self.matrix(s));
            worst = worst.max(operator_norm(&(p_exact - shifted)));
        }
        Ok(worst)
    }
}

/// Top-m eigenvectors of a (near-)projector matrix, orthonormalized.
pub fn frame_of_projector(p: &CMatrix, m: usize) -> CMatrix {
    let se = p.clone().symmetric_eigen();
    let n = p.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let mut f = CMatrix::zeros(n, m);
    for c in 0..m {
        f.set_column(c, &se.eigenvectors.column(order[c]));
    }
    f
}

/// Largest singular value via the Gram trick (exact for Hermitian
/// differences of projectors, cheap in general).
pub fn operator_norm(a: &CMatrix) -> f64 {
    let g = a.adjoint() * a;
    let se = g.symmetric_eigen();
    se.eigenvalues
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.max(0.0)))
        .sqrt()
}

// ---- binary container ---------------------------------------------------

const MAGIC: &[u8; 4] = b"MBPF";

/// Persist the field: header (d, N_j, M, m, cutoff), then row-major complex
/// matrices per grid point, little-endian f64.
pub fn write_projector<W: Write>(w: &mut W, field: &ProjectorField) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&1u32.to_le_bytes())?;
    w.write_all(&(field.grid.dim() as u32).to_le_bytes())?;
    for &n in &field.grid.dims {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    w.write_all(&(field.basis_size as u32).to_le_bytes())?;
    w.write_all(&(field.m as u32).to_le_bytes())?;
    w.write_all(&field.cutoff.to_le_bytes())?;
    for s in 0..field.grid.len() {
        let p = field.matrix(s);
        for r in 0..p.nrows() {
            for c in 0..p.ncols() {
                w.write_all(&p[(r, c)].re.to_le_bytes())?;
                w.write_all(&p[(r, c)].im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub struct ProjectorContainer {
    pub grid: KGrid,
    pub basis_size: usize,
    pub m: usize,
    pub cutoff: i32,
    pub matrices: Vec<CMatrix>,
}

pub fn read_projector<R: Read>(r: &mut R) -> Result<ProjectorContainer> {
    let mut m4 = [0u8; 4];
    r.read_exact(&mut m4)?;
    if &m4 != MAGIC {
        return Err(CoreError::Malformed("projector container magic".into()));
    }
    fn rd_u32<R: Read>(r: &mut R) -> Result<u32> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    let version = rd_u32(r)?;
    if version != 1 {
        return Err(CoreError::Malformed(format!("container version {version}")));
    }
    let d = rd_u32(r)? as usize;
    let mut dims = Vec::with_capacity(d);
    for _ in 0..d {
        dims.push(rd_u32(r)? as usize);
    }
    let basis_size = rd_u32(r)? as usize;
    let m = rd_u32(r)? as usize;
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    let cutoff = i32::from_le_bytes(b);
    let grid = KGrid::new(dims)?;
    let mut matrices = Vec::with_capacity(grid.len());
    let mut buf = vec![0u8; basis_size * basis_size * 16];
    for _ in 0..grid.len() {
        r.read_exact(&mut buf)?;
        let mut p = CMatrix::zeros(basis_size, basis_size);
        for rr in 0..basis_size {
            for cc in 0..basis_size {
                let off = (rr * basis_size + cc) * 16;
                let re = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
                let im = f64::from_le_bytes(buf[off + 8..off + 16].try_into().unwrap());
                p[(rr, cc)] = C64::new(re, im);
            }
        }
        matrices.push(p);
    }
    Ok(ProjectorContainer {
        grid,
        basis_size,
        m,
        cutoff,
        matrices,
    })
}
