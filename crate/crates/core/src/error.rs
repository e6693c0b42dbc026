use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("undeclared variable `{name}` at {line}:{col}")]
    Undeclared { name: String, line: usize, col: usize },

    #[error("variable `{name}` declared more than once")]
    Duplicate { name: String },

    #[error("program declares no low variable")]
    NoLowVariable,

    #[error("valuation is missing variable `{0}`")]
    MissingVariable(String),

    #[error("valuation has {got} bits, expected {expected}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("enumeration needs {bits} input bits, cap is {cap}")]
    CapExceeded { bits: usize, cap: usize },

    #[error("{0} output variables exceed the 64-bit output encoding")]
    TooManyOutputs(usize),

    #[error("sample space is empty")]
    EmptySpace,

    #[error("point {0} is not in the sample space")]
    PointNotInSpace(String),

    #[error("weights do not sum to one")]
    NotNormalized,

    #[error("belief must give positive weight to every point")]
    NotFullSupport,

    #[error("support of the target distribution is not contained in the source")]
    SupportViolation,

    #[error("output {0} is not attained at the given low input")]
    UnattainedOutput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("bound must be positive, got {0}")]
    NonPositiveBound(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("variable name `{0}` clashes with a gadget variable")]
    VariableClash(String),

    #[error("trace set is inconsistent: input {0} maps to two outputs")]
    InconsistentTraces(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
