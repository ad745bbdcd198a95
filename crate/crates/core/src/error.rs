use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base: {0}")]
    InvalidBase(String),

    #[error("self-map image of sample {sample} lies outside the base: {detail}")]
    ImageOutsideBase { sample: usize, detail: String },

    #[error(
        "self-map is not discretely continuous on edge {edge}: images are {distance:.3} edges apart (bound {bound})"
    )]
    Discontinuous { edge: usize, distance: f64, bound: f64 },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier { name: String, line: usize, column: usize },

    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },

    #[error("variable `{var}` is not available on a {base} base")]
    VariableMismatch { var: String, base: String },

    #[error("non-finite value at sample {sample}")]
    NonFinite { sample: usize },

    #[error("polynomial: {0}")]
    Polynomial(String),

    #[error("root iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergent { iterations: usize, residual: f64 },

    #[error("sheet matching on edge {edge} still ambiguous at refinement depth {depth}")]
    AmbiguousMatching { edge: usize, depth: usize },

    #[error("loop is not a closed walk")]
    OpenWalk,

    #[error("operation requires a {expected} base, got {got}")]
    WrongBaseKind { expected: String, got: String },

    #[error("polynomial is not admissible: {0}")]
    Inadmissible(String),

    #[error("branch at sample {sample} is not two-sheeted ({sheets} coalescing sheets)")]
    NotTwoSheeted { sample: usize, sheets: usize },

    #[error("singular Vandermonde system at unflagged sample {sample}")]
    SingularVandermonde { sample: usize },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
