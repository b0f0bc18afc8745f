//! First and second Chern invariants by two independent methods, plus the
//! triviality verdict.
//!
//! Plaquette method: link variables from overlap determinants between
//! neighboring frames; plaquette fluxes with principal arguments sum to an
//! exact integer (2D), respectively the non-abelian field-strength sum
//! (4D). Curvature method: the trace formulas (i/2π)Tr Q̃_ij and
//! (1/(2π)²)Tr W̃. The plaquette integers anchor the sign and normalization
//! conventions; the calibrated pair (S_CONVENTION, NU_CONVENTION) is a
//! compile-time constant guarded by tests.
//!
//! Orientation: the first-Chern plaquette loop traverses the second plane
//! axis first, which makes the plaquette value, the curvature formula and
//! the skyrmion-density oracle agree in sign.

use crate::error::{CoreError, Result};
use crate::projector::ProjectorField;
use crate::{C64, CMatrix};
use serde::{Deserialize, Serialize};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Calibrated sign convention: fixed once against the m_p = 3 Dirac fixture
/// (plaquette = degree oracle = −1); any later change is a breaking failure.
pub const S_CONVENTION: f64 = 1.0;
/// Calibrated normalization of the curvature second-Chern formula.
pub const NU_CONVENTION: f64 = 1.0;

/// Guard against plaquette fluxes straying into the branch cut.
pub const FLUX_BRANCH_GUARD: f64 = std::f64::consts::PI - 1e-3;
pub const OVERLAP_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Chern1Entry {
    pub plane: [usize; 2],
    /// exact plaquette integer
    pub value: i64,
    /// |raw − round(raw)| of the plaquette sum
    pub residual: f64,
    /// (i/2π)·grid-average of Tr Q̃ over the plane (per-slice average)
    pub curvature_value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Chern2Entry {
    pub value: i64,
    pub residual: f64,
    pub curvature_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Trivial,
    NonTrivial,
    IndeterminateUnstableRank,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub s: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChernReport {
    pub c1: Vec<Chern1Entry>,
    pub c2: Option<Chern2Entry>,
    /// raw grid average of Tr W̃ (d = 4), both unnormalized and |W|-scaled
    pub instanton_charge: Option<f64>,
    pub instanton_charge_per_volume: Option<f64>,
    pub verdict: Verdict,
    pub sigma: usize,
    pub calibration: Calibration,
}

/// First Chern number on the (i,j) coordinate plane at fixed transverse
/// indices: exact integer from plaquette link phases, plus the max |flux|
/// seen (for the branch guard).
pub fn chern1_plaquette(
    field: &ProjectorField,
    plane: (usize, usize),
    transverse: &[usize],
) -> Result<(i64, f64, f64)> {
    let (pi, pj) = plane;
    let grid = &field.grid;
    let d = grid.dim();
    if pi >= d || pj >= d || pi == pj {
        return Err(CoreError::Config(format!("bad plane ({pi},{pj})")));
    }
    let (ni, nj) = (grid.dims[pi], grid.dims[pj]);
    if ni < 6 || nj < 6 {
        return Err(CoreError::GridTooCoarse(format!(
            "plaquette c1 needs >= 6 points per plane axis, got {ni}x{nj}"
        )));
    }
    // base index with transverse components filled
    let mut base = vec![0usize; d];
    let mut t = transverse.iter();
    for ax in 0..d {
        if ax != pi && ax != pj {
            base[ax] = *t.next().ok_or_else(|| {
                CoreError::IncompleteInput("missing transverse index".into())
            })?;
        }
    }
    let idx_of = |a: usize, b: usize| -> Vec<usize> {
        let mut v = base.clone();
        v[pi] = a % ni;
        v[pj] = b % nj;
        v
    };
    // U(1) link in the +axis direction from frame overlaps
    let link = |from: &[usize], axis: usize| -> Result<C64> {
        let (to, crossed) = grid.step_up(from, axis);
        let fa = field.frame_at(from);
        let fb = if crossed {
            field.embedding(axis, true).apply_frame(field.frame_at(&to))
        } else {
            field.frame_at(&to).clone()
        };
        let ov = fa.adjoint() * fb;
        let det = det_small(&ov);
        if det.norm() < OVERLAP_FLOOR {
            return Err(CoreError::GridTooCoarse(format!(
                "vanishing overlap determinant at {from:?} axis {axis}"
            )));
        }
        Ok(det / det.norm())
    };
    let mut total = 0.0f64;
    let mut max_flux = 0.0f64;
    for a in 0..ni {
        for b in 0..nj {
            // loop traverses axis j first: κ → κ+ĵ → κ+ĵ+î → κ+î → κ
            let p00 = idx_of(a, b);
            let p01 = idx_of(a, b + 1);
            let p10 = idx_of(a + 1, b);
            let u1 = link(&p00, pj)?;
            let u2 = link(&p01, pi)?;
            let u3 = link(&p10, pj)?;
            let u4 = link(&p00, pi)?;
            let w = u1 * u2 * (u3 * u4).conj();
            let flux = w.arg();
            if flux.abs() > FLUX_BRANCH_GUARD {
                return Err(CoreError::GridTooCoarse(format!(
                    "plaquette flux {flux:.4} within 1e-3 of ±π at ({a},{b})"
                )));
            }
            max_flux = max_flux.max(flux.abs());
            total += flux;
        }
    }
    let raw = total / TAU;
    let value = raw.round();
    Ok(((value as i64), (raw - value).abs(), max_flux))
}

fn det_small(m: &CMatrix) -> C64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.clone().lu().determinant(),
    }
}

/// (i/2π)·average of Tr Q̃_ij over the full grid (all transverse slices).
pub fn chern1_curvature(field: &ProjectorField, plane: (usize, usize)) -> f64 {
    let grid = &field.grid;
    let mut acc = C64::default();
    for s in 0..grid.len() {
        let idx = grid.unslot(s);
        acc += field.q_tilde_at(&idx, plane.0, plane.1).trace();
    }
    let avg = acc / C64::new(grid.len() as f64, 0.0);
    (C64::i() / TAU * avg).re
}

/// Per-slice curvature values over the transverse indices (d > 2).
pub fn chern1_curvature_slices(field: &ProjectorField, plane: (usize, usize)) -> Vec<f64> {
    let grid = &field.grid;
    let d = grid.dim();
    let trans_axes: Vec<usize> = (0..d).filter(|&a| a != plane.0 && a != plane.1).collect();
    let trans_total: usize = trans_axes.iter().map(|&a| grid.dims[a]).product();
    let plane_total = grid.dims[plane.0] * grid.dims[plane.1];
    let mut out = vec![C64::default(); trans_total.max(1)];
    for s in 0..grid.len() {
        let idx = grid.unslot(s);
        let mut t = 0usize;
        for &a in &trans_axes {
            t = t * grid.dims[a] + idx[a];
        }
        out[t] += field.q_tilde_at(&idx, plane.0, plane.1).trace();
    }
    out.iter()
        .map(|z| (C64::i() / TAU * z / C64::new(plane_total as f64, 0.0)).re)
        .collect()
}

/// Principal logarithm of a unitary matrix via joint diagonalization of its
/// Hermitian and anti-Hermitian parts (W is normal; commuting Hermitian
/// pieces are diagonalized blockwise).
pub fn log_unitary(w: &CMatrix) -> Result<CMatrix> {
    let n = w.nrows();
    if n == 1 {
        let z = w[(0, 0)];
        return Ok(CMatrix::from_element(1, 1, C64::new(0.0, z.arg())));
    }
    let b = (w + w.adjoint()) * C64::new(0.5, 0.0); // cos part, Hermitian
    let a = (w - w.adjoint()) * C64::new(0.0, -0.5); // sin part, Hermitian
    let se = b.clone().symmetric_eigen();
    // group eigenvalues of B, diagonalize A within each degenerate block
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| se.eigenvalues[x].partial_cmp(&se.eigenvalues[y]).unwrap());
    let mut basis = CMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        basis.set_column(c, &se.eigenvectors.column(i));
    }
    let evs: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut log = CMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (evs[end] - evs[end - 1]).abs() < 1e-9 {
            end += 1;
        }
        let blk = end - start;
        let sub = basis.columns(start, blk).into_owned();
        let a_blk = sub.adjoint() * &a * &sub;
        let sa = a_blk.symmetric_eigen();
        for c in 0..blk {
            let sin_v = sa.eigenvalues[c];
            let cos_v = evs[start];
            if (cos_v + 1.0).abs() < 1e-9 && sin_v.abs() < 1e-9 {
                return Err(CoreError::GridTooCoarse(
                    "matrix log branch failure: eigenvalue at -1".into(),
                ));
            }
            let theta = sin_v.atan2(cos_v);
            let vec = &sub * sa.eigenvectors.column(c);
            let contrib = &vec * vec.adjoint() * C64::new(0.0, theta);
            log += contrib;
        }
        start = end;
    }
    Ok(log)
}

/// Polar unitarization U = M (M†M)^{−1/2}.
pub fn polar_unitarize(m: &CMatrix) -> Result<CMatrix> {
    let g = m.adjoint() * m;
    let se = g.symmetric_eigen();
    let n = m.nrows();
    let mut inv_sqrt = CMatrix::zeros(n, n);
    for c in 0..n {
        let ev = se.eigenvalues[c];
        if ev < OVERLAP_FLOOR * OVERLAP_FLOOR {
            return Err(CoreError::GridTooCoarse(
                "singular overlap in polar decomposition".into(),
            ));
        }
        let v = se.eigenvectors.column(c);
        inv_sqrt += &v * v.adjoint() * C64::new(1.0 / ev.sqrt(), 0.0);
    }
    Ok(m * inv_sqrt)
}

/// Second Chern number by non-abelian plaquette field strengths (d = 4):
/// c₂ = s·(1/32π²)·Σ_κ ε^{μνρσ} tr(F_μν F_ρσ).
pub fn chern2_plaquette(field: &ProjectorField) -> Result<(i64, f64)> {
    let grid = &field.grid;
    if grid.dim() != 4 {
        return Err(CoreError::WrongDimension {
            expected: 4,
            got: grid.dim(),
        });
    }
    if grid.dims.iter().any(|&n| n < 6) {
        return Err(CoreError::GridTooCoarse("chern2 needs a >= 6^4 grid".into()));
    }
    let m = field.m;
    // cache non-abelian links U_mu(slot)
    let total = grid.len();
    let mut links: Vec<Vec<CMatrix>> = Vec::with_capacity(4);
    for mu in 0..4 {
        let mut per = Vec::with_capacity(total);
        for s in 0..total {
            let idx = grid.unslot(s);
            let (to, crossed) = grid.step_up(&idx, mu);
            let fa = field.frame(s);
            let fb = if crossed {
                field.embedding(mu, true).apply_frame(field.frame_at(&to))
            } else {
                field.frame_at(&to).clone()
            };
            per.push(polar_unitarize(&(fa.adjoint() * fb))?);
        }
        links.push(per);
    }
    let link = |idx: &[usize], mu: usize| -> &CMatrix { &links[mu][grid.slot(idx)] };
    // ε^{μνρσ} over all 24 permutations
    let eps: Vec<([usize; 4], f64)> = permutations_with_sign();
    let mut total_sum = 0.0f64;
    for s in 0..total {
        let idx = grid.unslot(s);
        // F_{mu nu} for mu < nu from the plaquette loop log
        let mut f = vec![vec![CMatrix::zeros(m, m); 4]; 4];
        for mu in 0..4 {
            for nu in (mu + 1)..4 {
                let (up_mu, _) = grid.step_up(&idx, mu);
                let (up_nu, _) = grid.step_up(&idx, nu);
                let w = link(&idx, mu) * link(&up_mu, nu)
                    * link(&up_nu, mu).adjoint()
                    * link(&idx, nu).adjoint();
                let l = log_unitary(&w)?;
                f[nu][mu] = -&l;
                f[mu][nu] = l;
            }
        }
        for (perm, sign) in &eps {
            let t = (&f[perm[0]][perm[1]] * &f[perm[2]][perm[3]]).trace();
            total_sum += sign * t.re;
        }
    }
    let raw = total_sum / (32.0 * std::f64::consts::PI * std::f64::consts::PI) * S_CONVENTION;
    let value = raw.round();
    Ok((value as i64, (raw - value).abs()))
}

fn permutations_with_sign() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::with_capacity(24);
    let items = [0usize, 1, 2, 3];
    fn heap(k: usize, arr: &mut [usize; 4], out: &mut Vec<([usize; 4], f64)>) {
        if k == 1 {
            let p = *arr;
            let mut sign = 1.0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if p[i] > p[j] {
                        sign = -sign;
                    }
                }
            }
            out.push((p, sign));
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, out);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    let mut arr = items;
    heap(4, &mut arr, &mut out);
    out
}

/// Curvature second-Chern value s·(1/((2π)²·ν))·avg Tr W̃ (d = 4).
pub fn chern2_curvature(field: &ProjectorField) -> Result<f64> {
    let grid = &field.grid;
    if grid.dim() != 4 {
        return Err(CoreError::WrongDimension {
            expected: 4,
            got: grid.dim(),
        });
    }
    let mut acc = C64::default();
    for s in 0..grid.len() {
        let idx = grid.unslot(s);
        acc += field.tr_w_tilde_at(&idx)?;
    }
    let avg = acc / C64::new(grid.len() as f64, 0.0);
    Ok(S_CONVENTION * avg.re / (TAU * TAU * NU_CONVENTION))
}

/// Grid average of Tr W̃ with its worst imaginary part (reported, must be real).
pub fn instanton_charge(field: &ProjectorField) -> Result<(f64, f64)> {
    let grid = &field.grid;
    let mut acc = C64::default();
    let mut worst_im = 0.0f64;
    for s in 0..grid.len() {
        let idx = grid.unslot(s);
        let t = field.tr_w_tilde_at(&idx)?;
        worst_im = worst_im.max(t.im.abs());
        acc += t;
    }
    Ok(((acc / C64::new(grid.len() as f64, 0.0)).re, worst_im))
}

/// Triviality verdict per the dimension/rank case split, plus the guaranteed
/// localized-section count σ = max(0, m − ⌊d/2⌋), with one extra section when
/// d ≡ 2 mod 4.
pub fn triviality_verdict(
    d: usize,
    m: usize,
    c1: &[i64],
    c2: Option<i64>,
) -> Result<(Verdict, usize)> {
    let mut sigma = m.saturating_sub(d / 2);
    if d % 4 == 2 && sigma < m {
        sigma += 1;
    }
    let needed_c1 = d * (d - 1) / 2;
    if d >= 2 && c1.len() < needed_c1 {
        return Err(CoreError::IncompleteInput(format!(
            "need {needed_c1} first-Chern plane values for d = {d}, got {}",
            c1.len()
        )));
    }
    let all_c1_zero = c1.iter().all(|&v| v == 0);
    let verdict = if d <= 3 || m == 1 {
        // stable rank and the line-bundle case: c1 classifies completely
        if all_c1_zero {
            Verdict::Trivial
        } else {
            Verdict::NonTrivial
        }
    } else if d == 4 {
        let c2v = c2.ok_or_else(|| {
            CoreError::IncompleteInput("d = 4 verdict needs the second Chern number".into())
        })?;
        if !all_c1_zero || c2v != 0 {
            Verdict::NonTrivial
        } else {
            Verdict::Trivial
        }
    } else if d <= 2 * m {
        // stable rank: trivial iff all computed classes vanish
        let c2_zero = c2.map(|v| v == 0).unwrap_or(true);
        if all_c1_zero && c2_zero {
            Verdict::Trivial
        } else {
            Verdict::NonTrivial
        }
    } else {
        // unstable rank: vanishing classes prove nothing
        let c2_zero = c2.map(|v| v == 0).unwrap_or(true);
        if all_c1_zero && c2_zero {
            Verdict::IndeterminateUnstableRank
        } else {
            Verdict::NonTrivial
        }
    };
    Ok((verdict, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgrid::KGrid;
    use crate::projector::ProjectorField;
    use crate::synthetic;

    fn skyrmion_field(g: usize, m_p: f64) -> ProjectorField {
        let grid = KGrid::even(vec![g, g]).unwrap();
        ProjectorField::from_closure(&grid, 1, move |k| synthetic::skyrmion_projector(k, m_p))
    }

    #[test]
    fn skyrmion_c1_is_exact_integer() {
        let f = skyrmion_field(24, 1.0);
        let (c, residual, maxflux) = chern1_plaquette(&f, (0, 1), &[]).unwrap();
        assert_eq!(c, -1);
        assert!(residual < 1e-12, "residual {residual}");
        assert!(maxflux < FLUX_BRANCH_GUARD);
    }

    #[test]
    fn skyrmion_c1_sign_flips_with_orientation_and_mass() {
        let f = skyrmion_field(24, 1.0);
        let (cij, _, _) = chern1_plaquette(&f, (0, 1), &[]).unwrap();
        let (cji, _, _) = chern1_plaquette(&f, (1, 0), &[]).unwrap();
        assert_eq!(cij, -cji);
        let g = skyrmion_field(24, -1.0);
        let (cneg, _, _) = chern1_plaquette(&g, (0, 1), &[]).unwrap();
        assert_eq!(cneg, -cij);
    }

    #[test]
    fn skyrmion_c1_zero_outside_topological_window() {
        let f = skyrmion_field(24, 3.0);
        let (c, _, _) = chern1_plaquette(&f, (0, 1), &[]).unwrap();
        assert_eq!(c, 0);
    }

    #[test]
    fn curvature_matches_plaquette_on_skyrmion() {
        let f = skyrmion_field(24, 1.0);
        let (c, _, _) = chern1_plaquette(&f, (0, 1), &[]).unwrap();
        let cv = chern1_curvature(&f, (0, 1));
        assert!((cv - c as f64).abs() < 0.05, "curvature {cv} vs plaquette {c}");
        let cv_swapped = chern1_curvature(&f, (1, 0));
        assert!((cv + cv_swapped).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_rejected() {
        let f = skyrmion_field(4, 1.0);
        assert!(matches!(
            chern1_plaquette(&f, (0, 1), &[]),
            Err(CoreError::GridTooCoarse(_))
        ));
    }

    #[test]
    fn log_unitary_round_trip() {
        // exp(iθ n·σ) has log iθ n·σ for |θ| < π
        let s = synthetic::pauli();
        let theta: f64 = 0.8;
        let n = [0.6, 0.64, 0.48];
        let mut h = CMatrix::zeros(2, 2);
        for a in 0..3 {
            h += &s[a] * C64::new(n[a], 0.0);
        }
        let w = CMatrix::identity(2, 2) * C64::new(theta.cos(), 0.0)
            + &h * C64::new(0.0, theta.sin());
        let l = log_unitary(&w).unwrap();
        let want = h * C64::new(0.0, theta);
        assert!((l - want).norm() < 1e-10);
    }

    #[test]
    fn verdict_truth_table() {
        // Cor 4.5-type cases
        assert_eq!(
            triviality_verdict(2, 1, &[0], None).unwrap(),
            (Verdict::Trivial, 1)
        );
        assert_eq!(
            triviality_verdict(3, 2, &[0, 0, 0], None).unwrap(),
            (Verdict::Trivial, 1)
        );
        // d=4 hinge on c2
        assert_eq!(
            triviality_verdict(4, 2, &[0; 6], Some(1)).unwrap().0,
            Verdict::NonTrivial
        );
        assert_eq!(
            triviality_verdict(4, 2, &[0; 6], Some(0)).unwrap().0,
            Verdict::Trivial
        );
        // unstable rank: all zero classes prove nothing
        let (v, sigma) = triviality_verdict(5, 2, &[0; 10], Some(0)).unwrap();
        assert_eq!(v, Verdict::IndeterminateUnstableRank);
        assert_eq!(sigma, 0);
        // m=1 trivial in any d
        assert_eq!(triviality_verdict(4, 1, &[0; 6], Some(0)).unwrap().0, Verdict::Trivial);
        // sigma bonus for d ≡ 2 mod 4
        let (_, sigma6) = triviality_verdict(6, 4, &[0; 15], Some(0)).unwrap();
        assert_eq!(sigma6, 2); // max(0, 4-3) + 1
        // nonzero c1 in d=2
        assert_eq!(
            triviality_verdict(2, 2, &[1], None).unwrap().0,
            Verdict::NonTrivial
        );
        // missing invariant
        assert!(matches!(
            triviality_verdict(4, 2, &[0; 6], None),
            Err(CoreError::IncompleteInput(_))
        ));
    }

    #[test]
    fn epsilon_tensor_has_24_terms() {
        let eps = permutations_with_sign();
        assert_eq!(eps.len(), 24);
        let plus: f64 = eps.iter().map(|(_, s)| s).sum();
        assert_eq!(plus, 0.0);
    }
}
