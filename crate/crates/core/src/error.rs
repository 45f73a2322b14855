use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("spectrum model is empty")]
    EmptyModel,

    #[error("{kernel}: pole or branch cut hit at {at} ({detail})")]
    KernelDomain { kernel: &'static str, at: Complex64, detail: String },

    #[error("eigenvalue {0} lies on the closed negative real axis")]
    BranchCut(Complex64),

    #[error("zero eigenvalue: the model is not invertible")]
    ZeroEigenvalue,

    #[error("matrix is not normal (commutator norm {defect:.3e})")]
    NotNormal { defect: f64 },

    #[error("singular shift A + {shift}")]
    SingularShift { shift: Complex64 },

    #[error("matrix of size {0} exceeds the dense limit of 512")]
    MatrixTooLarge(usize),

    #[error("operation needs a {0} model")]
    WrongModelKind(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular value iteration did not converge (Frobenius bound {residual:.6e})")]
    SvdNonConvergence { residual: f64 },

    #[error("quadrature did not converge within {evaluations} evaluations (partial value {partial:.12e})")]
    QuadratureNonConvergence { partial: f64, evaluations: usize },

    #[error("integral appears divergent: panel mass stopped decaying near {at:.3e} (partial value {partial:.6e})")]
    Divergent { partial: f64, at: f64 },

    #[error("sup search exhausted its budget of {0} evaluations")]
    SupBudget(usize),

    #[error("n = {n} is below the closed-form threshold n1 = {threshold}")]
    PreThreshold { n: u64, threshold: u64 },

    #[error("fit needs at least 4 samples in the window, found {0}")]
    InsufficientSamples(usize),

    #[error("fit needs positive norms, found {norm} at parameter {param}")]
    NonPositiveNorm { param: f64, norm: f64 },

    #[error("spectrum leaves the open sector of half-angle pi/2 at {0}")]
    SectorViolation(Complex64),

    #[error("zero denominator in ratio")]
    ZeroDenominator,

    #[error("at grid point {param}: {source}")]
    GridPoint {
        param: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("unknown scenario id `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
