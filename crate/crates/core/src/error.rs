use thiserror::Error;

/// Errors raised across the library. Vertex and edge numbers in messages are
/// 1-based, matching the tree file format.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("weight of edge {edge} is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { edge: usize, min_eigenvalue: f64 },
    #[error("weight of edge {edge} is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { edge: usize, asymmetry: f64 },
    #[error("bad vertex labels: {0}")]
    BadLabels(String),
    #[error("bad weight shape: {0}")]
    BadWeightShape(String),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular (pivot {pivot:e} below tolerance {tolerance:e})")]
    Singular { pivot: f64, tolerance: f64 },
    #[error("matrix is ill-conditioned (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("tree has a vertex of degree 2 (vertex {vertex})")]
    Degree2Present { vertex: usize },
    #[error("beta is singular (|det| = {det:e})")]
    BetaSingular { det: f64 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("tree needs at least 2 vertices, got {0}")]
    NTooSmall(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
