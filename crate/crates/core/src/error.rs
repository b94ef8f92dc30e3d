use thiserror::Error;

use crate::boolcore::VarId;

/// Errors raised by the library. Every variant corresponds to a violated
/// precondition or an impossible request; none of them are retried internally.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid side {0} must be odd and at least 3")]
    BadGridSide(usize),
    #[error("invalid grid parameters: {0}")]
    BadGridParams(String),
    #[error("variable {0:?} is out of range for a graph with {1} edges")]
    VarOutOfRange(VarId, usize),
    #[error("restrictions disagree on {0:?}")]
    Incompatible(VarId),
    #[error("duplicate variable {0:?} in term")]
    DuplicateVar(VarId),
    #[error("term of width {width} exceeds the bound {bound}")]
    WidthExceeded { width: usize, bound: usize },
    #[error("tree has more than {0} leaves")]
    TooManyLeaves(usize),
    #[error("vertex {0} does not have degree 4")]
    NotFullGrid(usize),
    #[error("edge {0:?} is not a bridge")]
    NotBridge(VarId),
    #[error("edge set is not independent")]
    NotIndependent,
    #[error("no giant component")]
    NoGiant,
    #[error("restriction does not push the contradiction into the giant component")]
    NotPushing,
    #[error("instance is unsatisfiable: a component has odd total charge")]
    Unsatisfiable,
    #[error("tree of depth {depth} violates the depth bound {bound}")]
    DepthBound { depth: usize, bound: usize },
    #[error("bridge {0:?} has no value that pushes the contradiction")]
    PruneAbort(VarId),
    #[error("branch is not present in the tree")]
    NotABranch,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("sampler contract violated: {0}")]
    Contract(String),
    #[error("recursion depth cap {0} exceeded")]
    RecursionCap(usize),
    #[error("sample of size {0} is below the minimum {1}")]
    SampleTooSmall(usize, usize),
    #[error("{0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
