//! Uniform grids on the Brillouin torus.

use crate::error::{CoreError, Result};

/// Uniform k-grid: points κ(i) = (i_1/N_1, …, i_d/N_d), i_j ∈ 0..N_j, with
/// periodic wrap. Row-major linear slot order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGrid {
    pub dims: Vec<usize>,
}

impl KGrid {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.len() > crate::MAX_DIM {
            return Err(CoreError::Config("grid dimension must be 1..4".into()));
        }
        if dims.iter().any(|&n| n < 2) {
            return Err(CoreError::Config("grid needs >= 2 points per axis".into()));
        }
        Ok(KGrid { dims })
    }

    pub fn even(dims: Vec<usize>) -> Result<Self> {
        for (j, &n) in dims.iter().enumerate() {
            if n % 2 != 0 {
                return Err(CoreError::Config(format!("grid[{j}] = {n} must be even")));
            }
        }
        Self::new(dims)
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn slot(&self, idx: &[usize]) -> usize {
        let mut s = 0;
        for (j, &i) in idx.iter().enumerate() {
            s = s * self.dims[j] + (i % self.dims[j]);
        }
        s
    }

    pub fn unslot(&self, mut s: usize) -> Vec<usize> {
        let d = self.dim();
        let mut idx = vec![0usize; d];
        for j in (0..d).rev() {
            idx[j] = s % self.dims[j];
            s /= self.dims[j];
        }
        idx
    }

    pub fn kappa(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.dims)
            .map(|(&i, &n)| i as f64 / n as f64)
            .collect()
    }

    /// Slot of the negated point −κ(i) (mod 1): i_j → (N_j − i_j) mod N_j.
    pub fn neg_index(&self, idx: &[usize]) -> Vec<usize> {
        idx.iter()
            .zip(&self.dims)
            .map(|(&i, &n)| (n - i) % n)
            .collect()
    }

    /// Step +1 along axis j with wrap; returns (index, crossed_boundary).
    pub fn step_up(&self, idx: &[usize], axis: usize) -> (Vec<usize>, bool) {
        let mut out = idx.to_vec();
        out[axis] += 1;
        if out[axis] == self.dims[axis] {
            out[axis] = 0;
            (out, true)
        } else {
            (out, false)
        }
    }

    pub fn step_down(&self, idx: &[usize], axis: usize) -> (Vec<usize>, bool) {
        let mut out = idx.to_vec();
        if out[axis] == 0 {
            out[axis] = self.dims[axis] - 1;
            (out, true)
        } else {
            out[axis] -= 1;
            (out, false)
        }
    }

    /// Symmetric representative: i/N for i <= N/2, i/N − 1 otherwise.
    pub fn ksym(&self, i: usize, axis: usize) -> f64 {
        let n = self.dims[axis];
        if i <= n / 2 {
            i as f64 / n as f64
        } else {
            i as f64 / n as f64 - 1.0
        }
    }

    pub fn iter_indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|s| self.unslot(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_round_trip() {
        let g = KGrid::new(vec![4, 6, 3]).unwrap();
        for s in 0..g.len() {
            assert_eq!(g.slot(&g.unslot(s)), s);
        }
    }

    #[test]
    fn negation_wraps() {
        let g = KGrid::new(vec![8, 8]).unwrap();
        assert_eq!(g.neg_index(&[0, 0]), vec![0, 0]);
        assert_eq!(g.neg_index(&[3, 5]), vec![5, 3]);
        assert_eq!(g.neg_index(&[4, 4]), vec![4, 4]); // half-point is its own mirror
    }

    #[test]
    fn odd_grid_rejected_by_even_constructor() {
        assert!(KGrid::even(vec![31, 32]).is_err());
        assert!(KGrid::even(vec![32, 32]).is_ok());
    }
}
