use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a geometric or special function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An integral or image sum hit its work cap before meeting tolerance.
    #[error("convergence failure in {context}: {detail}")]
    Convergence { context: String, detail: String },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    /// The leading-order negativity changed by more than the allowed amount
    /// between the two evaluation couplings.
    #[error("leading-order negativity is coupling sensitive ({subsystem}): {first} vs {second}")]
    CouplingSensitivity {
        subsystem: String,
        first: f64,
        second: f64,
    },

    #[error("oracle epsilon sequence is not converging monotonically: {0}")]
    OracleNonMonotone(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Prefix the context of a convergence failure, leaving other kinds intact.
    pub fn within(self, outer: &str) -> Self {
        match self {
            Error::Convergence { context, detail } => Error::Convergence {
                context: format!("{outer}: {context}"),
                detail,
            },
            other => other,
        }
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}
