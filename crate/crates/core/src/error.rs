use thiserror::Error;

use crate::model::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: `{field}` {reason}")]
    Config { field: &'static str, reason: String },

    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("malformed configuration: {0}")]
    ConfigParse(#[from] serde_json::Error),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("node {0} is missing from the energy snapshot")]
    MissingEnergy(NodeId),

    #[error("node {0} has no known position")]
    MissingPosition(NodeId),

    #[error("clusters {0} and {1} share member {2}")]
    Overlap(u32, u32, NodeId),

    #[error("UNDEFINED_INDEX: Dunn's index needs at least 2 clusters, got {0}")]
    UndefinedIndex(usize),

    #[error("DEGENERATE_GEOMETRY: minimum inter-cluster distance and maximum diameter are both 0")]
    DegenerateGeometry,

    #[error("invalid index value {0}")]
    InvalidIndex(f64),

    #[error("address capacity exceeded: {0}")]
    Capacity(String),

    #[error("at tick {tick}: {source}")]
    AtTick {
        tick: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_tick(self, tick: u64) -> Self {
        Error::AtTick {
            tick,
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through tick annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTick { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(
            self.root(),
            Error::Config { .. } | Error::UnknownKeys(_) | Error::ConfigParse(_)
        )
    }
}
