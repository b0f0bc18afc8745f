//! Canonical example models used across tests, benchmarks and docs.

use crate::fourier::{FourierScalar, FourierVector};
use crate::lattice::Lattice;
use crate::model::LatticeModel;
use crate::C64;

/// V(y) = 2v (cos 2πy₁ + cos 2πy₂) on the unit square: V̂(±e₁) = V̂(±e₂) = v.
pub fn cos2d(v: f64) -> LatticeModel {
    let mut pot = FourierScalar::new();
    pot.set_pair(&[1, 0], C64::new(v, 0.0));
    pot.set_pair(&[0, 1], C64::new(v, 0.0));
    LatticeModel::new(Lattice::unit_cube(2), pot, FourierVector::zero(2)).unwrap()
}

/// cos2d plus the zero-flux, zero-field gauge potential A₁ = β sin(2πy₁):
/// B = dA = 0 identically, yet the magnetic phase e^{2i∫A} is nontrivial.
/// This is the magnetic fixture on which time-reversal is exact.
pub fn cos2d_gauge(v: f64, beta: f64) -> LatticeModel {
    let mut m = cos2d(v);
    m.vector_potential.components[0].set_pair(&[1, 0], C64::new(0.0, -0.5 * beta));
    m
}

/// cos2d plus the zero-flux but nonzero-field potential A₁ = α sin(2πy₂):
/// B₁₂ = −2πα cos(2πy₂), flux through every lattice face is zero.
pub fn cos2d_mag(v: f64, alpha: f64) -> LatticeModel {
    let mut m = cos2d(v);
    m.vector_potential.components[0].set_pair(&[0, 1], C64::new(0.0, -0.5 * alpha));
    m
}

/// V(y) = 2v cos 2πy on the unit 1D lattice.
pub fn cos1d(v: f64) -> LatticeModel {
    let mut pot = FourierScalar::new();
    pot.set_pair(&[1], C64::new(v, 0.0));
    LatticeModel::new(Lattice::unit_cube(1), pot, FourierVector::zero(1)).unwrap()
}

/// V(y) = 2v Σ_j cos 2πy_j on the unit 4-cube; weak-coupling d=4 model
/// continuously connected to the free one (gap opens for v > 0 at the
/// lowest band).
pub fn cos4d(v: f64) -> LatticeModel {
    let mut pot = FourierScalar::new();
    for j in 0..4 {
        let mut n = [0i32; 4];
        n[j] = 1;
        pot.set_pair(&n, C64::new(v, 0.0));
    }
    LatticeModel::new(Lattice::unit_cube(4), pot, FourierVector::zero(4)).unwrap()
}
