use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input text is empty")]
    EmptyText,
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("range [{start}, {end}) is outside the text of length {len}")]
    OutOfRange { start: u64, end: u64, len: u64 },
    #[error("invalid symbol X{0}")]
    InvalidSymbol(u64),
    #[error("invalid node or label {0}")]
    InvalidNode(u64),
    #[error("invalid grammar: {0}")]
    Grammar(String),
    #[error("grammar parse error at line {line}: {msg}")]
    GrammarSyntax { line: usize, msg: String },
    #[error("{0} is not enabled on this index")]
    TrieDisabled(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sample rate must be at least 1")]
    ZeroSampleRate,
    #[error("malformed index file: {0}")]
    Format(String),
    #[error("unsupported index format version {found} (expected {expected})")]
    Version { found: u16, expected: u16 },
    #[error("index checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    Checksum { stored: u32, computed: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
