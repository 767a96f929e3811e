use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("divergent product: |x| = {0} is not below 1")]
    Divergent(f64),

    #[error("{0} evaluated at zero")]
    ZeroArgument(&'static str),

    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: C64 },

    /// A rational denominator fell below the generic-position threshold.
    #[error("non-generic point: {factor} has magnitude {magnitude:e}")]
    Degenerate { factor: String, magnitude: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("contour construction failed: {0}")]
    Contour(String),

    #[error("non-finite integrand at node {node:?}")]
    NonFinite { node: Vec<C64> },

    #[error("shift condition violated for {var}: {detail}")]
    ShiftCondition { var: String, detail: String },
}

impl Error {
    /// True for errors caused by hitting a singularity, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. } | Error::Degenerate { .. } | Error::NonFinite { .. }
        )
    }
}
