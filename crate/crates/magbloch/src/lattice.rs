//! Bravais lattices and their duals.

use crate::error::{CoreError, Result};
use crate::MAX_DIM;
use nalgebra::DMatrix;

pub const BIORTHOGONALITY_TOL: f64 = 1e-12;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A d-dimensional lattice with its dual.
///
/// Rows of `basis` are the primitive vectors e_1..e_d; rows of `dual` are the
/// dual vectors e*_1..e*_d satisfying e_l · e*_j = 2π δ_lj. `cell_volume` is
/// |det(e_1,…,e_d)|.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub dim: usize,
    basis: Vec<Vec<f64>>,
    dual: Vec<Vec<f64>>,
    cell_volume: f64,
}

impl Lattice {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let d = basis.len();
        if d == 0 || d > MAX_DIM {
            return Err(CoreError::Config(format!(
                "lattice dimension must be 1..{MAX_DIM}, got {d}"
            )));
        }
        if basis.iter().any(|row| row.len() != d) {
            return Err(CoreError::Config(
                "lattice basis rows must all have length d".into(),
            ));
        }
        let dual = dual_lattice(&basis)?;
        let m = DMatrix::from_fn(d, d, |i, j| basis[i][j]);
        let cell_volume = m.determinant().abs();
        let lat = Lattice {
            dim: d,
            basis,
            dual,
            cell_volume,
        };
        lat.check_biorthogonality()?;
        Ok(lat)
    }

    pub fn unit_cube(d: usize) -> Self {
        let basis = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(basis).expect("identity basis is never singular")
    }

    pub fn basis_vector(&self, j: usize) -> &[f64] {
        &self.basis[j]
    }

    pub fn dual_vector(&self, j: usize) -> &[f64] {
        &self.dual[j]
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// G = Σ_j n_j e*_j as a Cartesian vector.
    pub fn reciprocal(&self, n: &[i32]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (j, &nj) in n.iter().take(self.dim).enumerate() {
            if nj != 0 {
                for c in 0..self.dim {
                    g[c] += nj as f64 * self.dual[j][c];
                }
            }
        }
        g
    }

    /// k = Σ_j κ_j e*_j for reduced momentum κ.
    pub fn momentum(&self, kappa: &[f64]) -> Vec<f64> {
        let mut k = vec![0.0; self.dim];
        for j in 0..self.dim {
            for c in 0..self.dim {
                k[c] += kappa[j] * self.dual[j][c];
            }
        }
        k
    }

    /// Cartesian point of the fractional cell coordinate y ∈ [0,1)^d.
    pub fn cartesian(&self, yfrac: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for j in 0..self.dim {
            for c in 0..self.dim {
                x[c] += yfrac[j] * self.basis[j][c];
            }
        }
        x
    }

    /// Cartesian lattice vector γ = Σ_j m_j e_j.
    pub fn lattice_vector(&self, m: &[i64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for j in 0..self.dim {
            for c in 0..self.dim {
                x[c] += m[j] as f64 * self.basis[j][c];
            }
        }
        x
    }

    fn check_biorthogonality(&self) -> Result<()> {
        for l in 0..self.dim {
            for j in 0..self.dim {
                let dot: f64 = (0..self.dim)
                    .map(|c| self.basis[l][c] * self.dual[j][c])
                    .sum();
                let want = if l == j { TWO_PI } else { 0.0 };
                if (dot - want).abs() > BIORTHOGONALITY_TOL {
                    return Err(CoreError::NumericalDegeneracy(format!(
                        "biorthogonality violated: e_{l}·e*_{j} = {dot}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Solve e_l · e*_j = 2π δ_lj for the dual basis.
pub fn dual_lattice(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = basis.len();
    let m = DMatrix::from_fn(d, d, |i, j| basis[i][j]);
    let inv = m
        .try_inverse()
        .ok_or(CoreError::DegenerateLattice)?;
    // rows of dual = 2π (M^-1)^T rows
    Ok((0..d)
        .map(|j| (0..d).map(|c| TWO_PI * inv[(c, j)]).collect())
        .collect())
}
