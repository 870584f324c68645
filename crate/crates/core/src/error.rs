use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BemError {
    #[error("{function}: argument {x} outside the domain")]
    Domain { function: &'static str, x: f64 },

    #[error("unknown geometry `{0}`")]
    UnknownGeometry(String),

    #[error("invalid geometry parameter: {0}")]
    InvalidGeometry(String),

    #[error("parameter {t} is a corner of the curve; the normal is undefined there")]
    CornerParameter { t: f64 },

    #[error("parameter {t} outside the curve range [{start}, {end}]")]
    ParameterOutOfRange { t: f64, start: f64, end: f64 },

    #[error("mesh needs {needed} degrees of freedom, cap is {cap}")]
    DofCap { needed: usize, cap: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("coincident points in kernel evaluation")]
    CoincidentPoints,

    #[error("quadrature order {n} outside 1..={max}")]
    QuadratureOrder { n: usize, max: usize },

    #[error("inconsistent panel topology: {0}")]
    Topology(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
}

pub type Result<T> = std::result::Result<T, BemError>;
