use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Stream(#[from] io::Error),

    // catalog / curated vocabulary
    #[error("line {line}: malformed catalog entry {text:?}")]
    MalformedCatalogLine { line: usize, text: String },
    #[error("line {line}: malformed vocabulary entry: {reason}")]
    MalformedVocabLine { line: usize, reason: String },
    #[error("vocabulary must start with <pad>, <s>, </s>, <unk>")]
    MissingSpecials,
    #[error("token {0:?} appears more than once")]
    DuplicateToken(String),

    // tokenizer
    #[error("lone backslash at byte {0}")]
    TrailingBackslash(usize),
    #[error("token id {id} out of range for vocabulary of size {size}")]
    IdOutOfRange { id: u32, size: usize },

    // normalizer
    #[error("unbalanced brace at byte {0}")]
    UnbalancedBrace(usize),
    #[error("script operator at byte {0} has no argument")]
    MissingScriptArgument(usize),
    #[error("line {line}: malformed synonym rule: {reason}")]
    MalformedRule { line: usize, reason: String },
    #[error("synonym rule {src:?} -> {dst:?}: {reason}")]
    InvalidSynonym {
        src: String,
        dst: String,
        reason: &'static str,
    },

    // base BPE
    #[error("malformed base vocabulary: {0}")]
    MalformedBaseVocab(String),
    #[error("line {line}: malformed merge rule {text:?}")]
    MalformedMerge { line: usize, text: String },
    #[error("id {id} assigned to both {first:?} and {second:?}")]
    DuplicateId {
        id: u32,
        first: String,
        second: String,
    },
    #[error("base vocabulary ids are not contiguous: id {0} is unassigned")]
    NonContiguousIds(u32),
    #[error("merge rule {left:?} + {right:?} produces {merged:?}, which is not in the vocabulary")]
    MissingMergeResult {
        left: String,
        right: String,
        merged: String,
    },
    #[error("character {ch:?} of token {token:?} is not itself a vocabulary token")]
    ClosureViolation { ch: char, token: String },
    #[error("character {ch:?} in {word:?} is not in the base vocabulary")]
    UnknownCharacter { ch: char, word: String },

    // transfer / tensors
    #[error("curated token {token:?} cannot be encoded by the base tokenizer: {reason}")]
    UnmappableToken { token: String, reason: String },
    #[error("mapping has {mapping} entries but {target} target rows were requested")]
    TargetRowMismatch { mapping: usize, target: usize },
    #[error("mapping entry {row} is empty")]
    EmptyMapping { row: usize },
    #[error("mapping entry {row} references base row {id}, matrix has {rows} rows")]
    MappedIdOutOfRange { row: usize, id: u32, rows: usize },
    #[error("matrix data has {actual} values, expected {rows} x {dim}")]
    ShapeMismatch {
        rows: usize,
        dim: usize,
        actual: usize,
    },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("bad magic {0:?}, expected \"TEXO\"")]
    BadMagic([u8; 4]),
    #[error("unsupported tensor version {0}")]
    UnsupportedVersion(u32),
    #[error("unsupported dtype code {0}")]
    UnsupportedDtype(u8),
    #[error("unsupported rank {0}, expected 2")]
    UnsupportedRank(u8),
    #[error("truncated tensor file: expected {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },
    #[error("tensor file has {0} trailing bytes after the payload")]
    TrailingBytes(u64),
    #[error("tensor dimensions {rows} x {dim} overflow")]
    DimensionOverflow { rows: u64, dim: u64 },

    // eval
    #[error("prediction file has {pred} lines, reference file has {reference}")]
    LineCountMismatch { pred: usize, reference: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
