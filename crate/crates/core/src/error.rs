use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("points are antipodal along axis {axis}; the shortest path is ambiguous, perturb the inputs")]
    Antipodal { axis: usize },

    #[error("map `{label}` is not invertible")]
    NotInvertible { label: String },

    #[error("map `{label}` has no Jacobian")]
    MissingJacobian { label: String },

    #[error("point lies outside the image of `{label}`")]
    OutsideImage { label: String },

    #[error("Newton inversion of `{label}` did not converge (best residual {residual:e})")]
    NewtonFailed { label: String, residual: f64 },

    #[error("invalid IFS: {0}")]
    InvalidIfs(String),

    #[error("invalid symbol sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("unknown noise model `{0}`")]
    UnknownNoise(String),

    #[error("map `{label}` is not a contraction (measured Lipschitz estimate {lipschitz})")]
    NotContracting { label: String, lipschitz: f64 },

    #[error("map is not hyperbolic: eigenvalue modulus {modulus} lies on the unit circle")]
    NotHyperbolic { modulus: f64 },

    #[error("unsupported map for this solver: {0}")]
    Unsupported(String),

    #[error("shadowing solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("bump construction infeasible: {0}")]
    InfeasibleBump(String),

    #[error("cannot keep adjusted points distinct within {0}")]
    Collapse(f64),

    #[error("chain slack {measured:e} exceeds the admissible {admissible:e}")]
    ChainTooCoarse { measured: f64, admissible: f64 },

    #[error("perturbed map {index} is {distance} from its parent, not below {bound}")]
    PerturbationTooLarge { index: usize, distance: f64, bound: f64 },

    #[error("sample coverage too sparse: nearest sample at {distance} exceeds {epsilon}")]
    SparseSamples { distance: f64, epsilon: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Whether the error reports a failed mathematical precondition or
    /// conclusion rather than bad input.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::OutsideImage { .. }
                | Error::NewtonFailed { .. }
                | Error::NoConvergence { .. }
                | Error::InfeasibleBump(_)
                | Error::Collapse(_)
                | Error::ChainTooCoarse { .. }
                | Error::PerturbationTooLarge { .. }
                | Error::SparseSamples { .. }
        )
    }
}
