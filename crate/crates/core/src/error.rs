use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("datasets are not comparable: {0}")]
    Incomparable(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("perturbed objective is irrecoverable: smallest eigenvalue {lambda_min} below -10 x trace {trace}")]
    IrrecoverablePerturbation { lambda_min: f64, trace: f64 },

    #[error("too few complete cases: need at least {needed}, have {available}")]
    TooFewCompleteCases { needed: usize, available: usize },

    #[error("no observed responses")]
    NoObservedResponses,

    #[error("privacy budget exhausted: requested {requested} for `{label}`, remaining {remaining}")]
    BudgetExhausted {
        label: String,
        requested: f64,
        remaining: f64,
    },

    #[error("enumeration budget exceeded: {required} evaluations required, limit {limit}")]
    EnumerationTooLarge { required: u128, limit: u128 },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed dataset file: {0}")]
    Format(String),
}
