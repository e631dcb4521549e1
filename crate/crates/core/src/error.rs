use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no selector: {0}")]
    NoSelector(String),

    #[error("unsupported filter kind: {0}")]
    UnsupportedKind(String),

    #[error("unsupported in this arithmetic: {0}")]
    UnsupportedArith(String),

    #[error("strategy failed at inning {inning}: {source}")]
    Strategy {
        inning: usize,
        #[source]
        source: Box<GameError>,
    },
}

impl GameError {
    pub fn out_of_range(what: &'static str, detail: impl Into<String>) -> Self {
        GameError::OutOfRange {
            what,
            detail: detail.into(),
        }
    }

    pub fn at_inning(self, inning: usize) -> Self {
        GameError::Strategy {
            inning,
            source: Box::new(self),
        }
    }

    /// Innermost error, with inning wrappers peeled off.
    pub fn root(&self) -> &GameError {
        match self {
            GameError::Strategy { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            GameError::Parse(_) => 2,
            GameError::ResourceCap(_) | GameError::Inconclusive(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
