use std::fmt;

/// Errors produced by builders, parsers and protocol drivers.
#[derive(Debug)]
pub enum Error {
    /// Variable count outside the supported range.
    VarCount { n: usize, max: usize },
    /// Unrecognized function family tag.
    UnknownFamily(String),
    /// Family parameters out of range or malformed.
    BadParams(String),
    /// Operation requires a consistent (non-empty) coset.
    EmptyCoset,
    /// Text format violation.
    Parse { line: usize, msg: String },
    /// A strategy exceeded its declared worst-case query budget.
    BudgetExceeded { budget: usize },
    /// A strategy returned different actions for the same transcript.
    NonDeterministicStrategy,
    /// A query mask was zero or did not fit the variable count.
    InvalidQuery { mask: u32, n: usize },
    /// An object was built over the wrong number of variables.
    WrongVariableCount { expected: usize, got: usize },
    /// A tree failed verification against its intended function.
    FailsVerification { witness: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::VarCount { n, max } => {
                write!(f, "variable count {n} outside supported range 1..={max}")
            }
            Error::UnknownFamily(tag) => write!(f, "unknown function family `{tag}`"),
            Error::BadParams(msg) => write!(f, "bad family parameters: {msg}"),
            Error::EmptyCoset => write!(f, "coset is empty"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::BudgetExceeded { budget } => {
                write!(f, "query budget of {budget} exceeded")
            }
            Error::NonDeterministicStrategy => {
                write!(f, "strategy returned different actions for one transcript")
            }
            Error::InvalidQuery { mask, n } => {
                write!(f, "invalid query mask {mask:#x} for {n} variables")
            }
            Error::WrongVariableCount { expected, got } => {
                write!(f, "expected an object over {expected} variables, got {got}")
            }
            Error::FailsVerification { witness } => {
                write!(f, "verification failed at input {witness:#x}")
            }
        }
    }
}

impl std::error::Error for Error {}
