use thiserror::Error;

use crate::interval::Interval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoxError {
    #[error("boxes range over different variable sets")]
    MismatchedVariables,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no variable at index {0}")]
    NoSuchIndex(usize),
    #[error("cannot bisect `{var}` = {interval}: interval is degenerate or unbounded")]
    Unsplittable { var: String, interval: Interval },
}

/// A problem-file error with its source position (1-based).
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("variable `{0}` needs finite bounds")]
    Unbounded(String),
    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("unrolling to depth {depth} needs {needed} variables, cap is {cap}")]
    TooManyVariables {
        depth: usize,
        needed: usize,
        cap: usize,
    },
    #[error("unrolling to depth {depth} has {paths} mode paths, cap is {cap}")]
    TooManyPaths { depth: usize, paths: usize, cap: usize },
    #[error("no mode path of length {0} exists from the initial mode")]
    NoPath(usize),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("a trace needs a delta-sat result with a witness")]
    NotSatisfiable,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Any failure surfaced by the library's top-level entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("a-priori enclosure could not be validated with step {h}")]
    StepTooLarge { h: f64 },
    #[error("invalid ODE system: {0}")]
    Invalid(String),
}

/// A structurally invalid problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("variable `{0}` needs finite bounds")]
    Unbounded(String),
    #[error("delta must be positive")]
    NonPositiveDelta,
    #[error("formula references flow #{0}, which does not exist")]
    UnknownFlow(usize),
    #[error("flow over `{system}`: {reason}")]
    BadFlow { system: String, reason: String },
}
