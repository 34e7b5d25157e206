use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("division by a jet with vanishing constant term")]
    SingularJet,

    /// A sinh factor or determinant that a formula divides by is (numerically) zero.
    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{side} root set is off-shell (BAE residual {residual:.3e} > {tol:.1e})")]
    OffShell {
        side: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("oracle limited to N <= {max} sites, got {n}")]
    OracleCap { n: usize, max: usize },

    #[error("extrapolation error estimate {estimate:.3e} exceeds tolerance {tol:.1e}")]
    Extrapolation { estimate: f64, tol: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
