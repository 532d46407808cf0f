use thiserror::Error;

use crate::formula::Agent;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("formula contains an announcement or action modality; translate it first")]
    UntranslatedDynamicOperator,
    #[error("common belief under an announcement has no reduction axiom")]
    UnsupportedNesting,
    #[error("unsupported operator: {0}")]
    UnsupportedOperator(&'static str),
    #[error("sigma string must have length >= 2, got {0}")]
    SigmaTooShort(usize),
    #[error("invalid sigma string {0:?}: only 0 and 1 are allowed")]
    InvalidSigma(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("cannot load action model {file:?} (line {line}, column {column}): {reason}")]
    UnknownActionFile {
        file: String,
        line: usize,
        column: usize,
        reason: String,
    },

    #[error("agent {0} is not declared in the model")]
    UndeclaredAgent(Agent),
    #[error("agent sets differ: {0}")]
    AgentMismatch(String),
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),

    #[error("announced formula is false at the point")]
    AnnouncementFalseAtPoint,
    #[error("precondition of the designated action is false at the point")]
    PreconditionFailedAtPoint,

    #[error("relation of agent {0} is not transitive and euclidean")]
    NotK45(Agent),
    #[error("simplified drawing needs K45 relations; agent {0} violates it")]
    NotSimplifiable(Agent),

    #[error("formula mentions more than one agent: {0}")]
    MultiAgentFormula(String),
    #[error("formula has {found} atoms, enumeration bound is {bound} (raise EPL_MAX_ATOMS)")]
    TooManyAtoms { found: usize, bound: usize },
    #[error("frame class {0} is not supported by this procedure")]
    UnsupportedClass(String),

    #[error("beta choice is missing for disjunct {0}")]
    BetaChoiceIncomplete(usize),
    #[error("disjunct index {0} out of range")]
    DisjunctOutOfRange(usize),

    #[error("unknown action kind {0:?}")]
    UnknownKind(String),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("i/o error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
