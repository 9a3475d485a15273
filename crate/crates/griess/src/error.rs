//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),

    #[error("order of the zero function is undefined")]
    ZeroOrder,

    #[error("invalid permutation of length {0}")]
    BadPermutation(usize),

    #[error("matrix must be symmetric with zero diagonal")]
    BadPoleMatrix,

    #[error("operand is not translation invariant")]
    NotTranslationInvariant,

    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("algebra input invalid: {0}")]
    AlgebraInput(String),

    #[error("rational parse error: {0}")]
    RatParse(String),

    #[error("pole data incompatible: {0}")]
    PoleData(String),

    #[error("component data incoherent: {0}")]
    Coherence(String),

    #[error("admissibility test failed: {0}")]
    NotAdmissible(String),

    #[error("graph rejected: {0}")]
    BadGraph(String),

    #[error("tower incomplete: length {0} requested, built to {1}")]
    TowerIncomplete(usize, usize),

    #[error("out of cutoff: {0}")]
    OutOfCutoff(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("character invalid: {0}")]
    Character(String),

    #[error("degenerate Gram form: {0}")]
    DegenerateForm(String),

    #[error("state error: {0}")]
    State(String),
}

pub type Result<T> = std::result::Result<T, Error>;
