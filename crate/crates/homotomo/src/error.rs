use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation left the range where the result is representable or accurate.
    #[error("range error: {what}; largest safe |x| = {max_safe:.6}")]
    Range { what: String, max_safe: f64 },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("hermiticity violation: imaginary residue {0:.3e}")]
    Hermiticity(f64),

    #[error("accuracy gate failed: {0}")]
    Accuracy(String),

    #[error("quadrature window too narrow: {0}")]
    Window(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("singular angle division: {0}")]
    SingularDivision(String),

    #[error("representation inconsistency: residual {residual:.3e} exceeds {tol:.1e}")]
    Representation { residual: f64, tol: f64 },

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures that reflect a numerical accuracy gate rather than bad input.
    pub fn is_accuracy(&self) -> bool {
        matches!(
            self,
            Error::Accuracy(_)
                | Error::Window(_)
                | Error::Representation { .. }
                | Error::NonConvergence(_)
                | Error::Range { .. }
                | Error::Hermiticity(_)
                | Error::Consistency(_)
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
