use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("domain error in `{subexpr}` at point {point:?}: {message}")]
    Domain {
        subexpr: String,
        point: Vec<f64>,
        message: String,
    },
    #[error("singular metric at point {point:?} (condition number {condition:e})")]
    SingularMetric { point: Vec<f64>, condition: f64 },
    #[error("rank-deficient immersion at domain point {point:?} (smallest singular value {singular:e})")]
    RankDeficient { point: Vec<f64>, singular: f64 },
    #[error("declared normal {index} is not orthogonal to the tangent frame at {point:?} (residual {residual:e})")]
    NormalNotOrthogonal {
        index: usize,
        point: Vec<f64>,
        residual: f64,
    },
    #[error("no normal space: immersion dimension {m} is not below ambient dimension {n}")]
    NoNormalSpace { m: usize, n: usize },
    #[error("could not complete a normal frame at {point:?}")]
    NormalFrame { point: Vec<f64> },
    #[error("codimension must be 1 for `{what}`, found {codim}")]
    Codimension { what: String, codim: usize },
    #[error("structure is not involutive at {point:?} (residual {residual:e})")]
    NotInvolutive { point: Vec<f64>, residual: f64 },
    #[error("dimension mismatch in `{field}`: {message}")]
    Dimension { field: String, message: String },
    #[error("invalid scenario at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("unknown bundled scenario `{0}`")]
    UnknownBundled(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
