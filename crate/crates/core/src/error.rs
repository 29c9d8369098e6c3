use crate::group::GroupElement;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix ({a},{b},{c},{d}) has determinant {det}, expected 1")]
    Determinant {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        det: i128,
    },
    #[error("integer overflow in matrix arithmetic")]
    Overflow,
    #[error("invalid word {0:?}: letters must be r, u or U (or \"e\" for the empty word)")]
    InvalidWord(String),
    #[error("word {word} is not a geodesic: length {length} but word norm {norm}")]
    NotGeodesic {
        word: String,
        length: usize,
        norm: usize,
    },
    #[error("words {0} and {1} represent different elements")]
    NotEquivalent(String, String),
    #[error("words are identical: {0}")]
    IdenticalWords(String),
    #[error("element {0} is not in the ball")]
    NotInBall(GroupElement),
    #[error("element {element} has norm {norm}; query needs norm <= {max_norm} in a ball of radius {radius}")]
    Boundary {
        element: GroupElement,
        norm: usize,
        radius: usize,
        max_norm: usize,
    },
    #[error("ball radius {radius} is too small, need at least {required}")]
    InsufficientRadius { radius: usize, required: usize },
    #[error("ball exceeds the node budget of {limit} elements")]
    ResourceLimit { limit: usize },
    #[error("suffix profile {0} does not match any known shape")]
    Unclassifiable(String),
    #[error("type {type_id} has inconsistent successor multisets {first:?} and {second:?}")]
    InconsistentTable {
        type_id: usize,
        first: Vec<usize>,
        second: Vec<usize>,
    },
    #[error("type {0} has no inhabitant with enough margin in this ball")]
    UninhabitedType(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("optimizer reached max f = {max_f}, above the 2.93 threshold")]
    BoundRegression { max_f: f64 },
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("certificate parse error: {0}")]
    Certificate(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
