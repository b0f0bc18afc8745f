//! Plane-wave basis on the cutoff cube max_j |n_j| <= N.

use crate::{nidx, NIdx};

/// Ordered plane-wave index set; position lookup is arithmetic (mixed radix),
/// no hashing. Lexicographic over (n_1,…,n_d), each axis running -N..=N.
#[derive(Debug, Clone)]
pub struct PlaneWaveBasis {
    pub dim: usize,
    pub cutoff: i32,
    indices: Vec<NIdx>,
}

impl PlaneWaveBasis {
    pub fn new(dim: usize, cutoff: i32) -> Self {
        assert!(cutoff >= 1, "cutoff N must be >= 1");
        assert!((1..=crate::MAX_DIM).contains(&dim));
        let w = (2 * cutoff + 1) as usize;
        let size = w.pow(dim as u32);
        let mut indices = Vec::with_capacity(size);
        let mut n = vec![-cutoff; dim];
        loop {
            indices.push(nidx(&n));
            let mut axis = dim;
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                n[axis] += 1;
                if n[axis] <= cutoff {
                    break;
                }
                n[axis] = -cutoff;
                if axis == 0 {
                    return PlaneWaveBasis { dim, cutoff, indices };
                }
            }
            if indices.len() == size {
                return PlaneWaveBasis { dim, cutoff, indices };
            }
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, pos: usize) -> &NIdx {
        &self.indices[pos]
    }

    pub fn iter(&self) -> impl Iterator<Item = &NIdx> {
        self.indices.iter()
    }

    /// Position of n in the ordering, or None if outside the cube.
    pub fn position(&self, n: &NIdx) -> Option<usize> {
        let w = (2 * self.cutoff + 1) as usize;
        let mut pos = 0usize;
        for j in 0..self.dim {
            let v = n[j];
            if v.abs() > self.cutoff {
                return None;
            }
            pos = pos * w + (v + self.cutoff) as usize;
        }
        Some(pos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_and_lookup_bijection() {
        let b = PlaneWaveBasis::new(2, 3);
        assert_eq!(b.len(), 49);
        for (i, n) in b.iter().enumerate() {
            assert_eq!(b.position(n), Some(i));
        }
        assert_eq!(b.position(&nidx(&[4, 0])), None);
    }

    #[test]
    fn closed_under_negation() {
        let b = PlaneWaveBasis::new(3, 2);
        for n in b.iter() {
            let mut m = *n;
            for v in &mut m {
                *v = -*v;
            }
            assert!(b.position(&m).is_some());
        }
    }
}
