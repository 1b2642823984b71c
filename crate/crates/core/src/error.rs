use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank {0} is too small; type D needs n >= 4")]
    InvalidRank(usize),
    #[error("index {index} is not a node of D_{n}")]
    InvalidIndex { index: usize, n: usize },
    #[error("invalid tensor factor B^{{{r},{s}}} for rank {n}")]
    InvalidFactor { r: usize, s: usize, n: usize },
    #[error("invalid crystal element: {0}")]
    InvalidElement(String),
    #[error("invalid rigged configuration: {0}")]
    InvalidRiggedConfig(String),
    #[error("no singular string available at node {node} ({context})")]
    MissingSingular { node: usize, context: &'static str },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
