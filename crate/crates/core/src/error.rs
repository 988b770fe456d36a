use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("{measure} is undefined for this table: {reason}")]
    UndefinedForTable {
        measure: &'static str,
        reason: &'static str,
    },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no sense inventory for {lemma}/{pos} (player {player})")]
    MissingInventory { lemma: String, pos: String, player: usize },

    #[error("no sense clusters for {lemma}/{pos}")]
    MissingClusters { lemma: String, pos: String },

    #[error("neither {0:?} nor any alternative lexicalization occurs in the count store")]
    NoAlternativeFound(String),

    #[error("no common ancestor for {0} and {1}")]
    NoCommonAncestor(String, String),

    #[error("missing information content for {0}")]
    MissingIc(String),

    #[error("unknown concept {0:?}")]
    UnknownConcept(String),

    #[error("answer for unknown instance {0:?}")]
    UnknownInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("configuration: {0}")]
    Config(String),
}
