use thiserror::Error;

/// Errors raised by the codec, channel, model and file formats.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid hash configuration: {0}")]
    InvalidHashConfig(String),
    #[error("invalid codec parameters: {0}")]
    InvalidParams(String),
    #[error("message value {value:#x} does not fit in {bits} data bits")]
    MessageOutOfRange { value: u64, bits: u32 },
    #[error("empty input")]
    EmptyInput,
    #[error("codeword length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("interval [{start}, {start}+{len}) is outside a codeword of {codeword_len} bits")]
    OutOfRange {
        start: usize,
        len: usize,
        codeword_len: usize,
    },
    #[error("invalid gap mask: {0}")]
    InvalidGapMask(String),
    #[error("cannot place {count} distinct marks in {codeword_len} positions")]
    TooManyMarks { count: usize, codeword_len: usize },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("experiment error: {0}")]
    Experiment(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
