use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("element is not Hermitian within tolerance (defect {defect:.3e})")]
    NonHermitian { defect: f64 },
    #[error("term {index} leaves its submodule (defect {defect:.3e})")]
    MembershipViolation { index: usize, defect: f64 },
    #[error("not a frame: frame operator is singular (lower {lower:.3e}, upper {upper:.3e})")]
    NotAFrame { lower: f64, upper: f64 },
    #[error("weight {index} is not positive ({value})")]
    NonpositiveWeight { index: usize, value: f64 },
    #[error("span of the submodules is degenerate (rank 0)")]
    DegenerateSpan,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("frame is not tight (bounds {lower:.6e}, {upper:.6e})")]
    NotTight { lower: f64, upper: f64 },
    #[error("operator is not invertible on the span (condition {condition:.3e})")]
    NotInvertible { condition: f64 },
    #[error("family is not representable (residual {residual:.3e})")]
    NotRepresentable { residual: f64 },
    #[error("perturbation inequality not verified")]
    InequalityNotVerified,
    #[error("base family is not linearly independent")]
    BaseNotIndependent,
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index {index} out of range for a family of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("malformed document: {0}")]
    Parse(String),
}
