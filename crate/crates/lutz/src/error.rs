use std::io;

/// Errors produced by normalization, the two coding stages, the container
/// format and the benchmark harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("byte 0x{byte:02x} at offset {offset} is not a recognized sequence symbol")]
    UnknownSymbol { byte: u8, offset: u64 },

    #[error("byte 0x{byte:02x} is not a code character")]
    InvalidCodeChar { byte: u8 },

    #[error("pre-coded stream has an unexpected byte at offset {offset}")]
    CorruptPrecoded { offset: u64 },

    #[error("malformed unknown-base run escape at offset {offset}")]
    MalformedNRun { offset: u64 },

    #[error("unknown-base run count does not fit in 64 bits")]
    NRunOverflow,

    #[error("match token points before the start of the recovered data")]
    CorruptTokenStream,

    #[error("cannot build a prefix code over an empty alphabet")]
    EmptyAlphabet,

    #[error("symbol 0x{symbol:02x} has no codeword")]
    UncodableSymbol { symbol: u8 },

    #[error("bit stream ended after {decoded} of {expected} symbols")]
    TruncatedStream { expected: u64, decoded: u64 },

    #[error("bit pattern does not match any codeword")]
    InvalidCodeword,

    #[error("code length table is over-subscribed")]
    OversubscribedCode,

    #[error("not a container: magic bytes mismatch")]
    BadMagic,

    #[error("unsupported container version {found}")]
    UnsupportedVersion { found: u8 },

    #[error("reserved container flag bits are set: 0x{flags:02x}")]
    ReservedFlags { flags: u8 },

    #[error("payload checksum mismatch: stored 0x{stored:08x}, computed 0x{computed:08x}")]
    ChecksumMismatch { stored: u32, computed: u32 },

    #[error("container truncated while reading {context}")]
    TruncatedContainer { context: &'static str },

    #[error("token payload is inconsistent: {context}")]
    CorruptStage2 { context: &'static str },

    #[error("payload too large: {what} exceeds the 32-bit field")]
    PayloadTooLarge { what: &'static str },

    #[error("decoded {actual} bases but the header promises {expected}")]
    BaseCountMismatch { expected: u64, actual: u64 },

    #[error("bits per base is undefined for an empty sequence")]
    DivisionByZero,

    #[error("manifest line {line}: {reason}")]
    BadManifest { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
