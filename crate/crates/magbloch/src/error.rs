use thiserror::Error;

/// Errors surfaced by the numerical core.
///
/// The variants map onto the CLI exit-code classes: configuration problems,
/// violated standing assumptions (gap, flux, closedness), numerical failures,
/// and topological obstructions.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("degenerate lattice: basis matrix is singular")]
    DegenerateLattice,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cutoff too small: potential index {idx:?} exceeds representable range 2N = {max}")]
    CutoffTooSmall { idx: Vec<i32>, max: i32 },

    #[error("field is not closed: discrete Bianchi residual {residual:.3e} at n = {idx:?}")]
    NotAField { idx: Vec<i32>, residual: f64 },

    #[error("no periodic vector potential: flux {flux:.3e} through face ({j},{l}) exceeds tolerance {tol:.3e}")]
    NoPeriodicPotential { j: usize, l: usize, flux: f64, tol: f64 },

    #[error("local spectral gap violated: C_g = {gap:.6e} at grid point {at:?} (tolerance {tol:.1e})")]
    GapFailure { gap: f64, at: Vec<usize>, tol: f64 },

    #[error("eigensolver failed to converge at kappa = {kappa:?}")]
    NumericalFailure { kappa: Vec<f64> },

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("parity inapplicable: potential is not even")]
    ParityInapplicable,

    #[error("wrong dimension: operation requires d = {expected}, model has d = {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("topological obstruction: {0}")]
    Obstruction(String),

    #[error("transport breakdown: Gram matrix singular ({sigma_min:.3e}) at grid point {at:?}")]
    TransportBreakdown { sigma_min: f64, at: Vec<usize> },

    #[error("trial vectors fail at kappa = {kappa:?}: min singular value {sigma_min:.3e}")]
    TrialFailure { kappa: Vec<f64>, sigma_min: f64 },

    #[error("incomplete input: {0}")]
    IncompleteInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed data: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
