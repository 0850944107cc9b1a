//! End-to-end composition of the coding stages behind the container
//! format: normalize, pre-code, optionally tokenize and pack, frame.

use std::borrow::Cow;

use crate::container::{self, ContainerHeader};
use crate::error::{Error, Result};
use crate::lut::Base;
use crate::lz77::{self, Lz77Params};
use crate::precoder::{self, NormalizationOptions, UnknownPolicy};

#[derive(Debug, Clone, Copy, Default)]
pub struct EncodeOptions {
    pub normalization: NormalizationOptions,
    /// Run the dictionary and entropy stage; off stores the bare
    /// pre-coded stream.
    pub stage2: bool,
    pub lz77: Lz77Params,
}

impl EncodeOptions {
    pub fn full() -> EncodeOptions {
        EncodeOptions {
            stage2: true,
            ..EncodeOptions::default()
        }
    }

    pub fn precode_only() -> EncodeOptions {
        EncodeOptions::default()
    }
}

pub fn encode(raw: &[u8], opts: &EncodeOptions) -> Result<Vec<u8>> {
    let bases = precoder::normalize(raw, opts.normalization)?;
    encode_bases(&bases, opts)
}

/// Encodes an already-normalized sequence.
pub fn encode_bases(bases: &[Base], opts: &EncodeOptions) -> Result<Vec<u8>> {
    let precoded = precoder::serialize_precoded(&precoder::precode(bases));
    let mut flags = 0u8;
    if opts.normalization.fasta_mode {
        flags |= container::FLAG_FASTA_STRIPPED;
    }
    if opts.normalization.unknown_policy == UnknownPolicy::TreatAsN {
        flags |= container::FLAG_UNKNOWN_AS_N;
    }
    let payload = if opts.stage2 {
        flags |= container::FLAG_STAGE2;
        container::build_stage2_payload(&lz77::compress(&precoded, opts.lz77))?
    } else {
        precoded
    };
    let header = ContainerHeader::for_payload(flags, bases.len() as u64, &payload);
    Ok(container::write_container(&header, &payload))
}

/// The stage-1 interchange form: the serialized pre-coded stream and its
/// base count, suitable for feeding to any general-purpose compressor.
pub fn precode_payload(raw: &[u8], opts: NormalizationOptions) -> Result<(Vec<u8>, u64)> {
    let bases = precoder::normalize(raw, opts)?;
    let precoded = precoder::serialize_precoded(&precoder::precode(&bases));
    Ok((precoded, bases.len() as u64))
}

/// Decodes a container, calling `emit` once per base. The base count in
/// the header must match exactly.
pub fn decode_each(bytes: &[u8], mut emit: impl FnMut(Base) -> Result<()>) -> Result<()> {
    let (header, payload) = container::read_container(bytes)?;
    let precoded: Cow<[u8]> = if header.stage2() {
        let tokens = container::parse_stage2_payload(payload)?;
        Cow::Owned(lz77::expand(&tokens)?)
    } else {
        Cow::Borrowed(payload)
    };
    let expected = header.base_count;
    let mut actual: u64 = 0;
    precoder::predecode_each(&precoded, |base| {
        if actual == expected {
            return Err(Error::BaseCountMismatch {
                expected,
                actual: actual + 1,
            });
        }
        actual += 1;
        emit(base)
    })?;
    if actual != expected {
        return Err(Error::BaseCountMismatch { expected, actual });
    }
    Ok(())
}

pub fn decode(bytes: &[u8]) -> Result<Vec<Base>> {
    let mut bases = Vec::new();
    decode_each(bytes, |base| {
        bases.push(base);
        Ok(())
    })?;
    Ok(bases)
}
