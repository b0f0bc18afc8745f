//! Trace per unit volume: Brillouin-zone average of fiber traces, and the
//! Følner supercell limit it equals.

use crate::basis::PlaneWaveBasis;
use crate::error::{CoreError, Result};
use crate::model::LatticeModel;
use crate::projector::{solve_grid, RelevantSet};
use crate::kgrid::KGrid;
use crate::C64;

/// T(Y) = (1/|W|) · grid-average of Tr Y(κ) from per-point fiber traces.
pub fn tpuv_bloch(traces: &[C64], cell_volume: f64) -> f64 {
    if traces.is_empty() {
        return 0.0;
    }
    let avg: C64 = traces.iter().sum::<C64>() / C64::new(traces.len() as f64, 0.0);
    avg.re / cell_volume
}

/// Supercell estimates of T(P_Σ): for each L, assemble the discrete-torus
/// projector from the L^d k-grid, truncate to the centered ⌈L/2⌉^d-cell
/// window, divide the trace by the window volume. d ≤ 2 for cost control.
pub fn tpuv_supercell(
    model: &LatticeModel,
    basis: &PlaneWaveBasis,
    set: &RelevantSet,
    sizes: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let d = model.dim();
    if d > 2 {
        return Err(CoreError::WrongDimension { expected: 2, got: d });
    }
    let vol = model.lattice.cell_volume();
    // real-space sampling: exact quadrature for products of cutoff-N fibers
    let res = (2 * basis.cutoff + 2) as usize;
    let mut out = Vec::with_capacity(sizes.len());
    for &l in sizes {
        let grid = KGrid::new(vec![l; d])?;
        let sols = solve_grid(model, basis, &grid)?;
        let window = l.div_ceil(2);
        let half = (window / 2) as i64;
        // window cells centered at the origin on the torus
        let cells: Vec<Vec<i64>> = (0..window.pow(d as u32))
            .map(|mut s| {
                let mut v = vec![0i64; d];
                for j in (0..d).rev() {
                    v[j] = (s % window) as i64 - half;
                    s /= window;
                }
                v
            })
            .collect();
        // diagonal kernel: P((γ,y),(γ,y)) = (1/L^d) Σ_κ Σ_{b∈I} |ψ_b(κ,y)|²
        // with ψ(κ,y) = Σ_n c_n e^{i(k+G_n)·y}; the γ-dependence cancels on
        // the diagonal, so the per-cell trace is γ-independent; evaluate once
        // and multiply by the cell count (kept explicit for clarity).
        let mut per_cell = 0.0f64;
        let total_samples = res.pow(d as u32);
        for s in 0..total_samples {
            let mut rem = s;
            let mut yfrac = vec![0.0; d];
            for j in (0..d).rev() {
                yfrac[j] = (rem % res) as f64 / res as f64;
                rem /= res;
            }
            let mut dens = 0.0;
            for sol in &sols {
                for &b in set.indices() {
                    let mut amp = C64::default();
                    for (a, n) in basis.iter().enumerate() {
                        let mut dot = 0.0;
                        for j in 0..d {
                            dot += n[j] as f64 * yfrac[j];
                        }
                        amp += sol.vectors[(a, b)]
                            * C64::new(0.0, 2.0 * std::f64::consts::PI * dot).exp();
                    }
                    dens += amp.norm_sqr();
                }
            }
            per_cell += dens / grid.len() as f64;
        }
        // quadrature weight |W|/res^d times the 1/|W| normalization of the
        // plane waves e^{iG·y}: the volumes cancel
        per_cell /= total_samples as f64;
        let trace = per_cell * cells.len() as f64;
        let est = trace / (cells.len() as f64 * vol);
        out.push((l, est));
    }
    Ok(out)
}
