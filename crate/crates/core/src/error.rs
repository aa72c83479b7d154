use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency set is empty")]
    Empty,
    #[error("frequency {0} is not positive")]
    NonPositive(i128),
    #[error("duplicate frequency {0}")]
    Duplicate(u64),
    #[error("frequency {0} does not fit in 64 bits")]
    OutOfRange(i128),
    #[error("{base}^{exponent} overflows 64-bit frequencies")]
    Overflow { base: u64, exponent: u32 },
    #[error(
        "quadrature needs {required} panels but the budget is {budget}; use the Monte Carlo estimator"
    )]
    FrequencyTooLarge { required: u128, budget: u64 },
    #[error("Monte Carlo would need {required} samples, above the limit of {limit}")]
    BudgetExceeded { required: f64, limit: u64 },
    #[error("set of size {n} exceeds the capacity limit {limit}")]
    CapacityExceeded { n: usize, limit: usize },
    #[error("search space holds {size} candidates, above the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error("argument {0} outside the domain |x| < 1")]
    Domain(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
