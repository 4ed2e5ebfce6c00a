use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resolution {got} outside supported range {min}..={max}")]
    Resolution { got: usize, min: usize, max: usize },

    #[error("non-Kähler potential: density {value:e} at node {node}")]
    NonKahler { node: usize, value: f64 },

    #[error("Hermitian form is not positive definite (k = {k})")]
    NotPositiveDefinite { k: usize },

    #[error("matrix is not Hermitian: asymmetry {0:e}")]
    NotHermitian(f64),

    #[error("degree {k} needs at least {need} angular nodes, grid has {have}")]
    DegreeTooLarge { k: usize, need: usize, have: usize },

    #[error("input is not circle-invariant (spread {0:e})")]
    NotInvariant(f64),

    #[error("holomorphy residual {0:e} above tolerance")]
    NotHolomorphic(f64),

    #[error("field length {got} does not match grid with {want} nodes")]
    Shape { got: usize, want: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid degree k = {0}")]
    Degree(usize),

    #[error("iteration aborted at step {iter}: {reason}")]
    Aborted { iter: usize, reason: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
