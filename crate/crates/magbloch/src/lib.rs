//! Plane-wave toolkit for periodic magnetic Schrödinger operators
//! `H = (-i∇ - A)² + V` with lattice-periodic `V`, `A`.
//!
//! The crate discretizes the Bloch-Floquet fibers in the Zak representation,
//! builds spectral projector fields `P̃(κ)` over the Brillouin torus, checks
//! magnetic symmetry relations, evaluates first and second Chern invariants by
//! two independent methods, constructs time-reversal-symmetric Bloch gauges,
//! and measures the exponential localization of the resulting Wannier
//! functions.
//!
//! Reduced momentum convention: `κ ∈ [0,1)^d`, `k = Σ_j κ_j e*_j` where
//! `e*_j` is the dual basis, `e_l · e*_j = 2π δ_lj`.

pub mod basis;
pub mod chern;
pub mod error;
pub mod fiber;
pub mod fixtures;
pub mod fourier;
pub mod kgrid;
pub mod lattice;
pub mod model;
pub mod projector;
pub mod quad;
pub mod report;
pub mod symmetry;
pub mod synthetic;
pub mod tpuv;
pub mod wannier;

pub use basis::PlaneWaveBasis;
pub use chern::{ChernReport, Verdict};
pub use error::CoreError;
pub use fiber::{BandSolution, FiberMatrix};
pub use fourier::{FieldSpec, FourierScalar, FourierVector};
pub use kgrid::KGrid;
pub use lattice::Lattice;
pub use model::LatticeModel;
pub use projector::{GapReport, ProjectorField, RelevantSet};
pub use symmetry::AntiunitaryFiberOp;
pub use wannier::{DecayFit, SectionField, WannierFunction};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Maximum spatial dimension supported by the fixed-width index type.
pub const MAX_DIM: usize = 4;

/// Integer reciprocal-lattice index, padded with zeros beyond the model
/// dimension so it can serve as an ordered map key.
pub type NIdx = [i32; MAX_DIM];

pub fn nidx(slice: &[i32]) -> NIdx {
    let mut out = [0i32; MAX_DIM];
    out[..slice.len()].copy_from_slice(slice);
    out
}
