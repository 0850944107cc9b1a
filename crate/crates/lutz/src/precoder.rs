//! First coding stage: input normalization and the streaming pre-coder
//! that rewrites base triplets as single code characters.
//!
//! Runs of N bases are escaped as `/count/` with a decimal count, and the
//! one or two non-N bases left over before a run or at end of input pass
//! through as raw `A`/`C`/`G`/`T` bytes. Triplet grouping restarts after
//! every run, so the same bases always regroup the same way on decode.

use std::io::Write;

use crate::error::{Error, Result};
use crate::lut::{self, Base, CodeChar, Triplet};

const N_RUN_DELIMITER: u8 = b'/';

/// What to do with input bytes that are not bases, line breaks, or (in
/// FASTA mode) header lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownPolicy {
    /// Fail with the byte and its offset.
    #[default]
    Reject,
    /// Fold the byte into the surrounding N run.
    TreatAsN,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NormalizationOptions {
    /// Skip `>` header lines entirely.
    pub fasta_mode: bool,
    pub unknown_policy: UnknownPolicy,
}

/// Byte-at-a-time input normalizer. Tracks the raw-byte offset so errors
/// point at the offending position in the original file.
#[derive(Debug)]
pub struct Normalizer {
    opts: NormalizationOptions,
    offset: u64,
    at_line_start: bool,
    in_header: bool,
}

impl Normalizer {
    pub fn new(opts: NormalizationOptions) -> Normalizer {
        Normalizer {
            opts,
            offset: 0,
            at_line_start: true,
            in_header: false,
        }
    }

    /// Feeds one raw byte and returns the base it normalizes to, if any.
    pub fn push(&mut self, byte: u8) -> Result<Option<Base>> {
        let offset = self.offset;
        self.offset += 1;
        if byte == b'\n' {
            self.at_line_start = true;
            self.in_header = false;
            return Ok(None);
        }
        if byte == b'\r' {
            return Ok(None);
        }
        let line_start = self.at_line_start;
        self.at_line_start = false;
        if self.in_header {
            return Ok(None);
        }
        if self.opts.fasta_mode && line_start && byte == b'>' {
            self.in_header = true;
            return Ok(None);
        }
        match Base::from_ascii(byte) {
            Some(base) => Ok(Some(base)),
            None => match self.opts.unknown_policy {
                UnknownPolicy::Reject => Err(Error::UnknownSymbol { byte, offset }),
                UnknownPolicy::TreatAsN => Ok(Some(Base::N)),
            },
        }
    }
}

pub fn normalize(raw: &[u8], opts: NormalizationOptions) -> Result<Vec<Base>> {
    let mut normalizer = Normalizer::new(opts);
    let mut bases = Vec::with_capacity(raw.len());
    for &byte in raw {
        if let Some(base) = normalizer.push(byte)? {
            bases.push(base);
        }
    }
    Ok(bases)
}

/// One unit of pre-coded output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecodedToken {
    /// Three non-N bases coded as one table byte.
    Coded(CodeChar),
    /// A leftover non-N base written through unchanged.
    Raw(Base),
    /// A maximal run of `1..` consecutive N bases.
    NRun(u64),
}

/// Streaming triplet grouper. Holds at most two pending bases and the
/// length of the N run in progress between steps.
#[derive(Debug)]
pub struct Precoder {
    pending: [Base; 2],
    pending_len: usize,
    n_count: u64,
    base_count: u64,
}

impl Default for Precoder {
    fn default() -> Precoder {
        Precoder::new()
    }
}

impl Precoder {
    pub fn new() -> Precoder {
        Precoder {
            pending: [Base::A; 2],
            pending_len: 0,
            n_count: 0,
            base_count: 0,
        }
    }

    /// Total bases consumed so far, N included.
    pub fn base_count(&self) -> u64 {
        self.base_count
    }

    pub fn push(&mut self, base: Base, out: &mut Vec<PrecodedToken>) {
        self.base_count += 1;
        if base.is_n() {
            // A starting run flushes pending bases first, so the bases
            // before the run are never silently dropped.
            if self.n_count == 0 {
                self.flush_pending(out);
            }
            self.n_count += 1;
            return;
        }
        if self.n_count > 0 {
            out.push(PrecodedToken::NRun(self.n_count));
            self.n_count = 0;
        }
        if self.pending_len == 2 {
            let triplet = Triplet::new(self.pending[0], self.pending[1], base)
                .expect("pending bases are never N");
            out.push(PrecodedToken::Coded(lut::encode_triplet(triplet)));
            self.pending_len = 0;
        } else {
            self.pending[self.pending_len] = base;
            self.pending_len += 1;
        }
    }

    /// Emits whatever the end of input leaves behind.
    pub fn finish(&mut self, out: &mut Vec<PrecodedToken>) {
        if self.n_count > 0 {
            out.push(PrecodedToken::NRun(self.n_count));
            self.n_count = 0;
        }
        self.flush_pending(out);
    }

    fn flush_pending(&mut self, out: &mut Vec<PrecodedToken>) {
        for i in 0..self.pending_len {
            out.push(PrecodedToken::Raw(self.pending[i]));
        }
        self.pending_len = 0;
    }
}

pub fn precode(bases: &[Base]) -> Vec<PrecodedToken> {
    let mut precoder = Precoder::new();
    let mut tokens = Vec::with_capacity(bases.len() / 3 + 2);
    for &base in bases {
        precoder.push(base, &mut tokens);
    }
    precoder.finish(&mut tokens);
    tokens
}

pub fn serialize_precoded(tokens: &[PrecodedToken]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(tokens.len() + 8);
    for &token in tokens {
        match token {
            PrecodedToken::Coded(code) => bytes.push(code.as_byte()),
            PrecodedToken::Raw(base) => {
                debug_assert!(!base.is_n());
                bytes.push(base.to_ascii());
            }
            PrecodedToken::NRun(count) => {
                debug_assert!(count >= 1);
                bytes.push(N_RUN_DELIMITER);
                write!(&mut bytes, "{count}").expect("writing to a Vec cannot fail");
                bytes.push(N_RUN_DELIMITER);
            }
        }
    }
    bytes
}

/// Expands serialized pre-coded bytes, calling `emit` once per base.
pub fn predecode_each(bytes: &[u8], mut emit: impl FnMut(Base) -> Result<()>) -> Result<()> {
    let mut i = 0usize;
    while i < bytes.len() {
        let byte = bytes[i];
        if let Some(triplet) = lut::decode_byte(byte) {
            for base in triplet.bases() {
                emit(base)?;
            }
            i += 1;
            continue;
        }
        match byte {
            b'A' | b'C' | b'G' | b'T' => {
                emit(Base::from_ascii(byte).expect("raw byte is a base"))?;
                i += 1;
            }
            N_RUN_DELIMITER => {
                // The count is one nonzero decimal digit followed by more
                // digits; the serializer never writes zero, leading zeros,
                // or an empty count.
                let start = i as u64;
                i += 1;
                if !matches!(bytes.get(i), Some(b'1'..=b'9')) {
                    return Err(Error::MalformedNRun { offset: start });
                }
                let mut count: u64 = 0;
                while let Some(&digit) = bytes.get(i).filter(|b| b.is_ascii_digit()) {
                    count = count
                        .checked_mul(10)
                        .and_then(|c| c.checked_add(u64::from(digit - b'0')))
                        .ok_or(Error::NRunOverflow)?;
                    i += 1;
                }
                if bytes.get(i) != Some(&N_RUN_DELIMITER) {
                    return Err(Error::MalformedNRun { offset: start });
                }
                i += 1;
                for _ in 0..count {
                    emit(Base::N)?;
                }
            }
            _ => return Err(Error::CorruptPrecoded { offset: i as u64 }),
        }
    }
    Ok(())
}

pub fn predecode(bytes: &[u8]) -> Result<Vec<Base>> {
    let mut bases = Vec::with_capacity(bytes.len() * 3);
    predecode_each(bytes, |base| {
        bases.push(base);
        Ok(())
    })?;
    Ok(bases)
}

pub fn bases_to_ascii(bases: &[Base]) -> Vec<u8> {
    bases.iter().map(|b| b.to_ascii()).collect()
}
