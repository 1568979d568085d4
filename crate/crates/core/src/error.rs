use thiserror::Error;

use crate::geometry::Vertex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin system: {0}")]
    InvalidSystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vertex {0} is not on the mesh with L = {1}")]
    OffMesh(Vertex, i64),

    #[error("vertex {0} lies on the mesh with L = {1}")]
    OnMesh(Vertex, i64),

    #[error("configurations disagree at {0}")]
    Conflict(Vertex),

    #[error("interior and context overlap at {0}")]
    Overlap(Vertex),

    #[error("state space of {states} exceeds the cap of {cap}")]
    CapExceeded { states: f64, cap: u64 },

    #[error("conditioning configuration is infeasible (zero partition function)")]
    Infeasible,

    #[error("lower-bound strategy {0} needs a monotone-eligible system")]
    StrategyNotSupported(&'static str),

    #[error("residual for spin {spin} is negative ({value:e}); lower bounds exceed the marginal")]
    NegativeResidual { spin: usize, value: f64 },

    #[error("uniform draw {0} fell outside every interval")]
    IntervalMiss(f64),

    #[error("call budget exhausted after {calls} calls (max depth {max_depth})")]
    BudgetExhausted { calls: u64, max_depth: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
