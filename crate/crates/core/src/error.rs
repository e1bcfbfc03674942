use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed word or file syntax. `offset` is a byte offset into the
    /// parsed text; `line`/`column` are 1-based and zero when not known.
    #[error("parse error at {line}:{column} (byte {offset}): {message} near {token:?}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        token: String,
        message: String,
    },

    #[error("letter {letter} is outside the alphabet of rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },

    #[error("alphabet mismatch: expected rank {expected}, found rank {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("alphabet rank must be positive")]
    EmptyAlphabet,

    #[error("the identity has no primitive root")]
    IdentityWord,

    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,

    #[error("edge set is not a spanning tree: {0}")]
    NotSpanningTree(String),

    #[error("edge {0} has a trivial edge group")]
    TrivialEdgeGroup(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid graph of groups: {0}")]
    InvalidGraphOfGroups(String),

    #[error("malformed subgraph data: {0}")]
    MalformedInjection(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse_at(
        text: &str,
        offset: usize,
        token: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        let (line, column) = line_column(text, offset);
        Error::Parse {
            offset,
            line,
            column,
            token: token.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Shifts a parse error produced on a single line so that it reports
    /// positions inside the enclosing document.
    pub(crate) fn relocate(self, line: usize, line_start: usize) -> Self {
        match self {
            Error::Parse {
                offset,
                column,
                token,
                message,
                ..
            } => Error::Parse {
                offset: line_start + offset,
                line,
                column,
                token,
                message,
            },
            other => other,
        }
    }
}

pub(crate) fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.bytes().filter(|&b| b == b'\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}
