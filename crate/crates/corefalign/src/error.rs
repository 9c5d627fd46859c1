use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the conversion and alignment stages.
///
/// Validation *findings* (self-referring relations, entity-ordering
/// problems, snapped spans, ...) are not errors; they are returned as data
/// so a run can report them without aborting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: malformed annotation line: {reason}")]
    AnnParse {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("{file}: markable {id} fragment [{start},{end}) outside text bounds (len {len})")]
    FragmentBounds {
        file: String,
        id: String,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("{file}: relation {id} references undeclared markable {target}")]
    DanglingReference {
        file: String,
        id: String,
        target: String,
    },

    #[error("cluster construction requires a clean relation graph: {finding}")]
    DirtyRelationGraph { finding: String },

    #[error("markable {id} fragment [{start},{end}) crosses a line boundary")]
    CrossLineFragment { id: String, start: usize, end: usize },

    #[error("document record invariant violated: {0}")]
    Assembly(String),

    #[error("record line {line}: {reason}")]
    RecordParse { line: usize, reason: String },

    #[error("{file}:{line}: {reason}")]
    ConlluParse {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("sentence {sent_id}, token {token}: {reason}")]
    EntityDecode {
        sent_id: String,
        token: usize,
        reason: String,
    },

    #[error("cannot order entity brackets: {0}")]
    EntityOrdering(String),

    #[error("MISC merge: sentence {sent_id} has {base} tokens but {additions} addition slots")]
    MiscTokenCount {
        sent_id: String,
        base: usize,
        additions: usize,
    },

    #[error("cost matrix has {rows} rows but only {cols} columns; rows must not exceed columns")]
    MatrixShape { rows: usize, cols: usize },

    #[error("cost matrix entry ({row},{col}) is not finite")]
    MatrixEntry { row: usize, col: usize },

    #[error("{file}: sentence starting at line {line} lacks a {missing} comment")]
    IndexComment {
        file: String,
        line: usize,
        missing: String,
    },

    #[error("document {doc_id} has no anchor sentences; cannot disambiguate")]
    NoAnchors { doc_id: String },

    #[error("{file}:{line}: malformed entity item {item:?}: {reason}")]
    EntityExtract {
        file: String,
        line: usize,
        item: String,
        reason: String,
    },

    #[error("sentence {sent_id}: treebank has {expected} tokens, entity source has {found}; refusing to place entities")]
    EntityTokenConflict {
        sent_id: String,
        expected: usize,
        found: usize,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
