//! The physical problem definition: lattice plus periodic potentials, with
//! JSON (de)serialization of the model file format.

use crate::error::{CoreError, Result};
use crate::fourier::{
    field_from_potential, potential_from_field, zero_flux_check, FieldSpec, FourierScalar,
    FourierVector, DEFAULT_FLUX_TOL,
};
use crate::lattice::Lattice;
use crate::{nidx, C64};
use serde::{Deserialize, Serialize};

/// Gaussian trial orbital for the multiband projection gauge: center in
/// fractional cell coordinates, width in lattice units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianTrial {
    pub center: Vec<f64>,
    pub width: f64,
}

#[derive(Debug, Clone)]
pub struct LatticeModel {
    pub lattice: Lattice,
    pub potential: FourierScalar,
    pub vector_potential: FourierVector,
    pub field: Option<FieldSpec>,
    pub trials: Vec<GaussianTrial>,
}

impl LatticeModel {
    pub fn new(lattice: Lattice, potential: FourierScalar, vector_potential: FourierVector) -> Result<Self> {
        let mut m = LatticeModel {
            lattice,
            potential,
            vector_potential,
            field: None,
            trials: Vec::new(),
        };
        m.potential.enforce_reality(1e-12)?;
        m.vector_potential.enforce_reality(1e-12)?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim
    }

    /// B = dA of the stored vector potential.
    pub fn derived_field(&self) -> FieldSpec {
        field_from_potential(&self.lattice, &self.vector_potential)
    }

    /// Per-face fluxes of the derived field.
    pub fn flux_report(&self) -> Vec<(usize, usize, f64)> {
        zero_flux_check(&self.lattice, &self.derived_field())
    }

    /// Max |flux| over faces, for the standing zero-flux assumption.
    pub fn max_flux(&self) -> f64 {
        self.flux_report()
            .iter()
            .map(|(_, _, f)| f.abs())
            .fold(0.0, f64::max)
    }

    /// Is the potential even, V̂(n) = V̂(−n)? Needed for parity checks.
    pub fn potential_is_even(&self) -> bool {
        self.potential.iter().all(|(n, z)| {
            let mut m = *n;
            for v in &mut m {
                *v = -*v;
            }
            (self.potential.coeff(&m) - z).norm() < 1e-12 * (1.0 + z.norm())
        })
    }
}

// ---- model file format ------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    n: Vec<i32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldEntry {
    plane: [usize; 2],
    coefficients: Vec<CoeffEntry>,
}

/// Synthetic closed-form projector inputs accepted by the chern pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: String,
    pub m_param: f64,
}

#[derive(Serialize, Deserialize, Default)]
struct ModelFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    potential: Vec<CoeffEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    vector_potential: Vec<Vec<CoeffEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    field: Vec<FieldEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    trials: Vec<GaussianTrial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    synthetic: Option<SyntheticSpec>,
}

/// Either a physical lattice model or a synthetic projector fixture.
pub enum ModelInput {
    Physical(Box<LatticeModel>),
    Synthetic(SyntheticSpec),
}

fn coeffs_to_scalar(entries: &[CoeffEntry], d: usize) -> Result<FourierScalar> {
    let mut s = FourierScalar::new();
    for e in entries {
        if e.n.len() != d {
            return Err(CoreError::Config(format!(
                "coefficient index {:?} has wrong length (expected {d})",
                e.n
            )));
        }
        s.set_raw(nidx(&e.n), C64::new(e.re, e.im));
    }
    Ok(s)
}

fn scalar_to_coeffs(s: &FourierScalar, d: usize) -> Vec<CoeffEntry> {
    s.iter()
        .map(|(n, z)| CoeffEntry {
            n: n[..d].to_vec(),
            re: z.re,
            im: z.im,
        })
        .collect()
}

pub fn parse_model(text: &str) -> Result<ModelInput> {
    let mf: ModelFile =
        serde_json::from_str(text).map_err(|e| CoreError::Config(format!("model file: {e}")))?;
    if let Some(s) = mf.synthetic {
        return Ok(ModelInput::Synthetic(s));
    }
    let d = mf
        .dimension
        .ok_or_else(|| CoreError::Config("model file: missing key `dimension`".into()))?;
    let basis = mf
        .basis
        .ok_or_else(|| CoreError::Config("model file: missing key `basis`".into()))?;
    let lattice = Lattice::new(basis)?;
    let mut potential = coeffs_to_scalar(&mf.potential, d)?;
    potential.enforce_reality(1e-10)?;
    let mut vector_potential = if mf.vector_potential.is_empty() {
        FourierVector::zero(d)
    } else {
        if mf.vector_potential.len() != d {
            return Err(CoreError::Config(format!(
                "vector_potential must have {d} component lists"
            )));
        }
        let mut v = FourierVector::zero(d);
        for (c, entries) in mf.vector_potential.iter().enumerate() {
            v.components[c] = coeffs_to_scalar(entries, d)?;
        }
        v
    };
    vector_potential.enforce_reality(1e-10)?;
    let field = if mf.field.is_empty() {
        None
    } else {
        let mut f = FieldSpec::zero(d);
        for e in &mf.field {
            let (j, l) = (e.plane[0], e.plane[1]);
            if j >= l || l >= d {
                return Err(CoreError::Config(format!("bad field plane ({j},{l})")));
            }
            let mut c = coeffs_to_scalar(&e.coefficients, d)?;
            c.enforce_reality(1e-10)?;
            f.set_component(j, l, c);
        }
        Some(f)
    };
    // B -> A path when no potential was given explicitly
    if vector_potential.is_zero() {
        if let Some(ref f) = field {
            vector_potential = potential_from_field(&lattice, f, DEFAULT_FLUX_TOL)?;
        }
    }
    let mut model = LatticeModel::new(lattice, potential, vector_potential)?;
    model.field = field;
    model.trials = mf.trials;
    Ok(ModelInput::Physical(Box::new(model)))
}

pub fn model_to_json(m: &LatticeModel) -> String {
    let d = m.dim();
    let mf = ModelFile {
        dimension: Some(d),
        basis: Some((0..d).map(|j| m.lattice.basis_vector(j).to_vec()).collect()),
        potential: scalar_to_coeffs(&m.potential, d),
        vector_potential: m
            .vector_potential
            .components
            .iter()
            .map(|c| scalar_to_coeffs(c, d))
            .collect(),
        field: Vec::new(),
        trials: m.trials.clone(),
        synthetic: None,
    };
    serde_json::to_string_pretty(&mf).expect("model serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip_json() {
        let m = fixtures::cos2d_mag(5.0, 0.3);
        let text = model_to_json(&m);
        let back = match parse_model(&text).unwrap() {
            ModelInput::Physical(b) => *b,
            _ => panic!("expected physical"),
        };
        assert_eq!(back.dim(), 2);
        assert!((back.potential.coeff(&nidx(&[1, 0])) - C64::new(5.0, 0.0)).norm() < 1e-15);
        let a01 = back.vector_potential.components[0].coeff(&nidx(&[0, 1]));
        assert!((a01 - C64::new(0.0, -0.15)).norm() < 1e-15);
    }

    #[test]
    fn field_to_potential_path() {
        let text = r#"{
            "dimension": 2,
            "basis": [[1,0],[0,1]],
            "field": [{"plane": [0,1], "coefficients": [{"n": [0,1], "re": -0.9424777960769379}, {"n": [0,-1], "re": -0.9424777960769379}]}]
        }"#;
        let m = match parse_model(text).unwrap() {
            ModelInput::Physical(b) => *b,
            _ => panic!(),
        };
        // expect A1 = 0.3 sin(2π y2) up to gauge: check derived field matches input
        let b = m.derived_field();
        let c = b.component(0, 1);
        assert!((c.coeff(&nidx(&[0, 1])).re + 0.9424777960769379).abs() < 1e-10);
    }

    #[test]
    fn missing_dimension_is_config_error() {
        let r = parse_model(r#"{"basis": [[1,0],[0,1]]}"#);
        match r {
            Err(CoreError::Config(msg)) => assert!(msg.contains("dimension")),
            _ => panic!("expected config error"),
        }
    }

    #[test]
    fn synthetic_passthrough() {
        let r = parse_model(r#"{"synthetic": {"kind": "skyrmion", "m_param": 1.0}}"#).unwrap();
        match r {
            ModelInput::Synthetic(s) => {
                assert_eq!(s.kind, "skyrmion");
                assert_eq!(s.m_param, 1.0);
            }
            _ => panic!(),
        }
    }
}
