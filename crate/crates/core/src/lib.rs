//! Simulator for the sleeping model of distributed computing, together with
//! awake-efficient algorithms for problems that can be solved greedily along
//! an acyclic orientation.

pub mod bni;
pub mod coloring;
pub mod dynamic;
pub mod graph;
pub mod harness;
pub mod math;
pub mod olocal;
pub mod sim;

use thiserror::Error;

pub use graph::{Color, Graph, GraphError, VertexId};
pub use sim::SimError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("label {label} outside 1..={d}")]
    LabelOutOfRange { label: u32, d: u32 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
