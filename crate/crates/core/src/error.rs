use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sample has {got} observations, at least {needed} required")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("non-finite observation at index {0}")]
    NonFinite(usize),

    #[error(
        "exact V-statistic needs {tuples:.3e} index tuples, over the budget of {budget:.3e}; \
         use the quadrature method"
    )]
    CostExceeded { tuples: f64, budget: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
