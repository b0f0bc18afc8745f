//! Truncated Fourier series for periodic scalars, vector potentials, and
//! magnetic 2-forms.
//!
//! Coefficients are indexed by integer reciprocal vectors n (G = Σ n_j e*_j).
//! Real-valued fields carry conjugate-symmetric coefficients; the helpers
//! below store both members of each ±n pair so that the symmetry is exact in
//! floating point, not merely approximate.

use crate::error::{CoreError, Result};
use crate::lattice::Lattice;
use crate::quad::gauss_legendre_unit;
use crate::{nidx, C64, NIdx};
use std::collections::BTreeMap;

pub const CLOSEDNESS_TOL: f64 = 1e-10;
pub const ROUND_TRIP_TOL: f64 = 1e-10;
pub const DEFAULT_FLUX_TOL: f64 = 1e-10;

fn neg(n: &NIdx) -> NIdx {
    let mut m = *n;
    for v in &mut m {
        *v = -*v;
    }
    m
}

/// Periodic real scalar as a finite Fourier series.
#[derive(Debug, Clone, Default)]
pub struct FourierScalar {
    coeffs: BTreeMap<NIdx, C64>,
}

impl FourierScalar {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert the coefficient at n together with its conjugate at -n.
    pub fn set_pair(&mut self, n: &[i32], z: C64) {
        let n = nidx(n);
        self.coeffs.insert(n, z);
        self.coeffs.insert(neg(&n), z.conj());
    }

    /// Raw insert, used by operations that construct symmetric data directly.
    pub fn set_raw(&mut self, n: NIdx, z: C64) {
        if z.norm_sqr() != 0.0 {
            self.coeffs.insert(n, z);
        }
    }

    pub fn coeff(&self, n: &NIdx) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NIdx, &C64)> {
        self.coeffs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest ℓ∞ index present.
    pub fn cutoff(&self) -> i32 {
        self.coeffs
            .keys()
            .map(|n| n.iter().map(|v| v.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Check conjugate symmetry and re-store it exactly.
    pub fn enforce_reality(&mut self, tol: f64) -> Result<()> {
        let keys: Vec<NIdx> = self.coeffs.keys().copied().collect();
        for n in &keys {
            let m = neg(n);
            let zn = self.coeff(n);
            let zm = self.coeff(&m);
            if (zn - zm.conj()).norm() > tol * (1.0 + zn.norm()) {
                return Err(CoreError::Malformed(format!(
                    "coefficient at {:?} breaks conjugate symmetry",
                    &n[..]
                )));
            }
        }
        // canonicalize: for n > -n lexicographically, mirror the stored value
        for n in keys {
            let m = neg(&n);
            if n > m {
                let z = self.coeff(&m).conj();
                self.coeffs.insert(n, z);
            }
        }
        Ok(())
    }

    /// Evaluate at the Cartesian point y (sum of Re parts, field is real).
    pub fn eval(&self, lat: &Lattice, y: &[f64]) -> f64 {
        let mut acc = C64::default();
        for (n, z) in &self.coeffs {
            let g = lat.reciprocal(n);
            let phase: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
            acc += z * C64::new(0.0, phase).exp();
        }
        acc.re
    }

    pub fn eval_is_real(&self, lat: &Lattice, y: &[f64]) -> (f64, f64) {
        let mut acc = C64::default();
        for (n, z) in &self.coeffs {
            let g = lat.reciprocal(n);
            let phase: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
            acc += z * C64::new(0.0, phase).exp();
        }
        (acc.re, acc.im)
    }
}

/// Vector potential A: one FourierScalar per Cartesian component.
#[derive(Debug, Clone, Default)]
pub struct FourierVector {
    pub components: Vec<FourierScalar>,
}

impl FourierVector {
    pub fn zero(d: usize) -> Self {
        Self {
            components: vec![FourierScalar::new(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn cutoff(&self) -> i32 {
        self.components.iter().map(|c| c.cutoff()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }

    pub fn enforce_reality(&mut self, tol: f64) -> Result<()> {
        for c in &mut self.components {
            c.enforce_reality(tol)?;
        }
        Ok(())
    }

    /// A(y) as a Cartesian vector.
    pub fn eval(&self, lat: &Lattice, y: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(lat, y)).collect()
    }
}

/// Magnetic field B_jl, 1 <= j < l <= d, as an antisymmetric array of
/// Fourier series in Cartesian components.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub dim: usize,
    /// entries[(j,l)] with j < l; B_lj = -B_jl implied.
    entries: BTreeMap<(usize, usize), FourierScalar>,
}

impl FieldSpec {
    pub fn zero(d: usize) -> Self {
        Self {
            dim: d,
            entries: BTreeMap::new(),
        }
    }

    pub fn component(&self, j: usize, l: usize) -> FourierScalar {
        if j < l {
            self.entries.get(&(j, l)).cloned().unwrap_or_default()
        } else {
            let mut flipped = FourierScalar::new();
            if let Some(c) = self.entries.get(&(l, j)) {
                for (n, z) in c.iter() {
                    flipped.set_raw(*n, -z);
                }
            }
            flipped
        }
    }

    pub fn set_component(&mut self, j: usize, l: usize, c: FourierScalar) {
        assert!(j < l && l < self.dim);
        self.entries.insert((j, l), c);
    }

    pub fn planes(&self) -> impl Iterator<Item = (&(usize, usize), &FourierScalar)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|c| c.is_empty())
    }
}

/// ∫₀¹ A(x0 + t(x1-x0)) · (x1-x0) dt by Gauss-Legendre quadrature.
///
/// The order is tied to the coefficient cutoff so the rule is exact for the
/// trigonometric degree present; long segments raise the order
/// proportionally to the number of periods traversed.
pub fn line_integral_a(lat: &Lattice, a: &FourierVector, x0: &[f64], x1: &[f64]) -> f64 {
    let d = lat.dim;
    let dx: Vec<f64> = (0..d).map(|c| x1[c] - x0[c]).collect();
    // periods traversed along the segment, per dual direction
    let mut periods = 1.0f64;
    for j in 0..d {
        let p: f64 = (0..d).map(|c| lat.dual_vector(j)[c] * dx[c]).sum::<f64>().abs()
            / (2.0 * std::f64::consts::PI);
        periods = periods.max(p);
    }
    let base = 2 * a.cutoff().max(1) as usize + 4;
    let oscillatory = (4.0 * a.cutoff().max(1) as f64 * periods).ceil() as usize + 8;
    let order = base.max(oscillatory);
    let quad = gauss_legendre_unit(order);
    let mut total = 0.0;
    for &(t, w) in &quad {
        let y: Vec<f64> = (0..d).map(|c| x0[c] + t * dx[c]).collect();
        let av = a.eval(lat, &y);
        let val: f64 = (0..d).map(|c| av[c] * dx[c]).sum();
        total += w * val;
    }
    total
}

/// B̂_jl(n) = i (G_j Â_l(n) − G_l Â_j(n)).
pub fn field_from_potential(lat: &Lattice, a: &FourierVector) -> FieldSpec {
    let d = lat.dim;
    let mut out = FieldSpec::zero(d);
    for j in 0..d {
        for l in (j + 1)..d {
            let mut c = FourierScalar::new();
            let mut keys: Vec<NIdx> = a.components[l].iter().map(|(n, _)| *n).collect();
            keys.extend(a.components[j].iter().map(|(n, _)| *n));
            keys.sort();
            keys.dedup();
            for n in keys {
                let g = lat.reciprocal(&n);
                let z = C64::i() * (g[j] * a.components[l].coeff(&n) - g[l] * a.components[j].coeff(&n));
                c.set_raw(n, z);
            }
            if !c.is_empty() {
                out.set_component(j, l, c);
            }
        }
    }
    out
}

/// Fluxes Φ_jl of B through the lattice faces C_jl (parallelograms spanned by
/// e_j, e_l at the origin). Only the coefficients constant along the face
/// (n_j = n_l = 0) contribute; the 2-form is pulled back onto the face, which
/// reduces to (face area)·ΣB̂_jl for axis-aligned lattices.
pub fn zero_flux_check(lat: &Lattice, b: &FieldSpec) -> Vec<(usize, usize, f64)> {
    let d = lat.dim;
    let mut out = Vec::new();
    for j in 0..d {
        for l in (j + 1)..d {
            let mut flux = C64::default();
            // pullback Jacobian tensor over Cartesian component pairs a<b
            for a in 0..d {
                for bb in (a + 1)..d {
                    let jac = lat.basis_vector(j)[a] * lat.basis_vector(l)[bb]
                        - lat.basis_vector(j)[bb] * lat.basis_vector(l)[a];
                    if jac == 0.0 {
                        continue;
                    }
                    for (n, z) in b.component(a, bb).iter() {
                        if n[j] == 0 && n[l] == 0 {
                            flux += z * jac;
                        }
                    }
                }
            }
            out.push((j, l, flux.re));
        }
    }
    out
}

/// Discrete Bianchi identity: G_j B̂_ml + G_m B̂_lj + G_l B̂_jm = 0 for n ≠ 0.
pub fn closedness_residual(lat: &Lattice, b: &FieldSpec) -> f64 {
    let d = lat.dim;
    if d < 3 {
        return 0.0;
    }
    let mut keys: Vec<NIdx> = Vec::new();
    for (_, c) in b.planes() {
        keys.extend(c.iter().map(|(n, _)| *n));
    }
    keys.sort();
    keys.dedup();
    let mut worst = 0.0f64;
    for n in keys {
        if n == [0; crate::MAX_DIM] {
            continue;
        }
        let g = lat.reciprocal(&n);
        for j in 0..d {
            for m in (j + 1)..d {
                for l in (m + 1)..d {
                    let r = g[j] * b.component(m, l).coeff(&n)
                        + g[m] * b.component(l, j).coeff(&n)
                        + g[l] * b.component(j, m).coeff(&n);
                    worst = worst.max(r.norm());
                }
            }
        }
    }
    worst
}

/// Coulomb-gauge periodic vector potential: Â_l(n) = −i Σ_j G_j B̂_jl(n)/|G|²,
/// Â(0) = 0. Requires closedness and zero flux.
pub fn potential_from_field(lat: &Lattice, b: &FieldSpec, flux_tol: f64) -> Result<FourierVector> {
    let d = lat.dim;
    let closed = closedness_residual(lat, b);
    if closed > CLOSEDNESS_TOL {
        return Err(CoreError::NotAField {
            idx: vec![],
            residual: closed,
        });
    }
    let face_scale = lat.cell_volume().powf(((d - 1) as f64) / d as f64).max(1.0);
    for (j, l, flux) in zero_flux_check(lat, b) {
        if flux.abs() > flux_tol * face_scale {
            return Err(CoreError::NoPeriodicPotential {
                j,
                l,
                flux,
                tol: flux_tol * face_scale,
            });
        }
    }
    let mut keys: Vec<NIdx> = Vec::new();
    for (_, c) in b.planes() {
        keys.extend(c.iter().map(|(n, _)| *n));
    }
    keys.sort();
    keys.dedup();
    let mut a = FourierVector::zero(d);
    for n in keys {
        if n == [0; crate::MAX_DIM] {
            continue; // constant part of B was verified zero-flux; gauge fixes Â(0) = 0
        }
        let g = lat.reciprocal(&n);
        let g2: f64 = g.iter().map(|x| x * x).sum();
        for l in 0..d {
            let mut z = C64::default();
            for j in 0..d {
                if j != l {
                    z += g[j] * b.component(j, l).coeff(&n);
                }
            }
            let v = -C64::i() * z / g2;
            if v.norm_sqr() != 0.0 {
                a.components[l].set_raw(n, v);
            }
        }
    }
    a.enforce_reality(1e-12)?;
    Ok(a)
}

/// Max coefficient distance between two fields over the union of indices.
pub fn field_distance(b1: &FieldSpec, b2: &FieldSpec) -> f64 {
    let d = b1.dim;
    let mut worst = 0.0f64;
    for j in 0..d {
        for l in (j + 1)..d {
            let c1 = b1.component(j, l);
            let c2 = b2.component(j, l);
            let mut keys: Vec<NIdx> = c1.iter().map(|(n, _)| *n).collect();
            keys.extend(c2.iter().map(|(n, _)| *n));
            keys.sort();
            keys.dedup();
            for n in keys {
                worst = worst.max((c1.coeff(&n) - c2.coeff(&n)).norm());
            }
        }
    }
    worst
}
