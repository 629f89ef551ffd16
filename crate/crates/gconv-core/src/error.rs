use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed group spec `{0}`")]
    MalformedSpec(String),
    #[error("group order {order} exceeds cap {cap} (set GCONV_MAX_ORDER to raise it)")]
    OrderCap { order: usize, cap: usize },
    #[error("element id {id} out of range for group of order {order}")]
    InvalidElement { id: usize, order: usize },
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("{0}")]
    KindMismatch(String),
    #[error("{0}")]
    ShapeMismatch(String),
    #[error("{0}")]
    GroupMismatch(String),
    #[error("unsupported group family `{0}`")]
    UnsupportedFamily(String),
    #[error("decomposition residual {residual:.3e} exceeds {tol:.3e} for irrep {label}")]
    DecompositionResidual {
        label: String,
        residual: f64,
        tol: f64,
    },
    #[error("rank ambiguity: singular values {values:?} lie near threshold {threshold:.3e}")]
    RankAmbiguity { values: Vec<f64>, threshold: f64 },
    #[error("integer rounding residual {residual:.3e} exceeds {tol:.3e}")]
    RoundingResidual { residual: f64, tol: f64 },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
