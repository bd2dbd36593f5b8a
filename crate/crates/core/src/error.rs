use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("exponent {0} leaves the representable range -1..=4")]
    ExponentOverflow(i32),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("sample order violation: {0}")]
    OrderViolation(String),
    #[error("size guard exceeded: {what} would need {size} entries (cap {cap})")]
    SizeGuard {
        what: String,
        size: u128,
        cap: u128,
    },
    #[error("operation leaves the domain: {0}")]
    DomainNotClosed(String),
    #[error("no value of variable `{0}` extends the partial assignment")]
    NoExtension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
