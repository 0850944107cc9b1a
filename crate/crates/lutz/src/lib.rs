//! Lossless compression for DNA sequence text.
//!
//! Stage one rewrites each triplet of non-N bases as a single printable
//! byte from a fixed 64-entry table, escaping runs of N as `/count/`.
//! Stage two runs a sliding-window dictionary coder over that stream and
//! entropy-codes the remaining literals with canonical prefix codes. The
//! result is framed in a small checksummed container that records how to
//! get the exact original sequence back.

pub mod bench;
pub mod cli;
pub mod container;
pub mod entropy;
pub mod error;
pub mod lut;
pub mod lz77;
pub mod pipeline;
pub mod precoder;

pub use error::{Error, Result};
pub use lut::Base;
pub use pipeline::{decode, encode, EncodeOptions};
