use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("quadrature did not converge: last two estimates {previous} and {last}")]
    QuadratureNotConverged { previous: f64, last: f64 },

    #[error(
        "coefficients are not square-summable within {levels} levels \
         (ln of partial unnormalized mass {log_partial_mass})"
    )]
    NotSquareSummable { levels: usize, log_partial_mass: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("no bracketed root of the maxima relation for n = {n}")]
    NoBracketedRoot { n: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
