//! Closed-form projector fixtures with known topology.
//!
//! Skyrmion two-band family: P(κ) = ½(1 − n̂(κ)·σ) with
//! n̂ ∝ (sin 2πκ₁, sin 2πκ₂, m_p − cos 2πκ₁ − cos 2πκ₂); first Chern number
//! ±1 for 0 < |m_p| < 2, 0 for |m_p| > 2.
//!
//! 4D Dirac four-band family: P(κ) = ½(1 − n̂(κ)·Γ) with five anticommuting
//! generators and n̂ ∝ (sin 2πκ₁, …, sin 2πκ₄, m_p − Σ cos 2πκ_j); rank 2,
//! second Chern number = degree of n̂ : T⁴ → S⁴ (−1 at m_p = 3, 0 at m_p = 5).

use crate::{C64, CMatrix};

const TAU: f64 = 2.0 * std::f64::consts::PI;

pub fn pauli() -> [CMatrix; 3] {
    let i = C64::i();
    let o = C64::new(1.0, 0.0);
    let z = C64::default();
    [
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Five anticommuting 4×4 generators: σ₁⊗σ₁, σ₁⊗σ₂, σ₁⊗σ₃, σ₂⊗1, σ₃⊗1.
pub fn dirac_gammas() -> [CMatrix; 5] {
    let s = pauli();
    let id = CMatrix::identity(2, 2);
    [
        kron(&s[0], &s[0]),
        kron(&s[0], &s[1]),
        kron(&s[0], &s[2]),
        kron(&s[1], &id),
        kron(&s[2], &id),
    ]
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Unnormalized skyrmion vector v(κ).
pub fn skyrmion_vector(kappa: &[f64], m_p: f64) -> [f64; 3] {
    [
        (TAU * kappa[0]).sin(),
        (TAU * kappa[1]).sin(),
        m_p - (TAU * kappa[0]).cos() - (TAU * kappa[1]).cos(),
    ]
}

pub fn skyrmion_unit(kappa: &[f64], m_p: f64) -> [f64; 3] {
    let v = skyrmion_vector(kappa, m_p);
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// P(κ) = ½(1 − n̂·σ), the lower band of the two-band skyrmion Hamiltonian.
pub fn skyrmion_projector(kappa: &[f64], m_p: f64) -> CMatrix {
    let n = skyrmion_unit(kappa, m_p);
    let s = pauli();
    let mut h = CMatrix::zeros(2, 2);
    for a in 0..3 {
        h += &s[a] * C64::new(n[a], 0.0);
    }
    (CMatrix::identity(2, 2) - h) * C64::new(0.5, 0.0)
}

/// Analytic ∂_axis P for the skyrmion family (finite-difference oracle).
pub fn skyrmion_derivative(kappa: &[f64], m_p: f64, axis: usize) -> CMatrix {
    let v = skyrmion_vector(kappa, m_p);
    let norm2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let norm = norm2.sqrt();
    let mut dv = [0.0f64; 3];
    if axis == 0 {
        dv[0] = TAU * (TAU * kappa[0]).cos();
        dv[2] = TAU * (TAU * kappa[0]).sin();
    } else {
        dv[1] = TAU * (TAU * kappa[1]).cos();
        dv[2] = TAU * (TAU * kappa[1]).sin();
    }
    let vdv: f64 = (0..3).map(|a| v[a] * dv[a]).sum();
    let dn: Vec<f64> = (0..3).map(|a| dv[a] / norm - v[a] * vdv / (norm2 * norm)).collect();
    let s = pauli();
    let mut dh = CMatrix::zeros(2, 2);
    for a in 0..3 {
        dh += &s[a] * C64::new(dn[a], 0.0);
    }
    dh * C64::new(-0.5, 0.0)
}

/// Unnormalized 4D Dirac vector v(κ) ∈ ℝ⁵.
pub fn dirac_vector(kappa: &[f64], m_p: f64) -> [f64; 5] {
    let mut v = [0.0f64; 5];
    let mut cos_sum = 0.0;
    for j in 0..4 {
        v[j] = (TAU * kappa[j]).sin();
        cos_sum += (TAU * kappa[j]).cos();
    }
    v[4] = m_p - cos_sum;
    v
}

pub fn dirac_unit(kappa: &[f64], m_p: f64) -> [f64; 5] {
    let mut v = dirac_vector(kappa, m_p);
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= n;
    }
    v
}

/// P(κ) = ½(1 − n̂·Γ), rank 2.
pub fn dirac_projector(kappa: &[f64], m_p: f64) -> CMatrix {
    let n = dirac_unit(kappa, m_p);
    let g = dirac_gammas();
    let mut h = CMatrix::zeros(4, 4);
    for a in 0..5 {
        h += &g[a] * C64::new(n[a], 0.0);
    }
    (CMatrix::identity(4, 4) - h) * C64::new(0.5, 0.0)
}
