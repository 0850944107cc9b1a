//! On-disk framing: a fixed 18-byte header followed by either the raw
//! pre-coded stream or the packed token payload, checksummed with CRC-32.
//!
//! All multi-byte integers are little-endian.

use crate::entropy::{self, BitStream, CodeLengths};
use crate::error::{Error, Result};
use crate::lz77::{Lz77Token, MAX_MATCH, MIN_MATCH, WINDOW_SIZE};

pub const MAGIC: [u8; 4] = *b"LUTZ";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 18;

/// Payload is the packed token form rather than the bare pre-coded bytes.
pub const FLAG_STAGE2: u8 = 1 << 0;
/// Header lines were stripped from the input.
pub const FLAG_FASTA_STRIPPED: u8 = 1 << 1;
/// Unrecognized input bytes were folded into N runs.
pub const FLAG_UNKNOWN_AS_N: u8 = 1 << 2;

const KNOWN_FLAGS: u8 = FLAG_STAGE2 | FLAG_FASTA_STRIPPED | FLAG_UNKNOWN_AS_N;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainerHeader {
    pub version: u8,
    pub flags: u8,
    /// Bases in the original sequence, N included.
    pub base_count: u64,
    pub payload_crc: u32,
}

impl ContainerHeader {
    pub fn for_payload(flags: u8, base_count: u64, payload: &[u8]) -> ContainerHeader {
        ContainerHeader {
            version: VERSION,
            flags,
            base_count,
            payload_crc: crc32(payload),
        }
    }

    pub fn stage2(&self) -> bool {
        self.flags & FLAG_STAGE2 != 0
    }

    pub fn fasta_stripped(&self) -> bool {
        self.flags & FLAG_FASTA_STRIPPED != 0
    }

    pub fn unknown_as_n(&self) -> bool {
        self.flags & FLAG_UNKNOWN_AS_N != 0
    }
}

pub fn write_container(header: &ContainerHeader, payload: &[u8]) -> Vec<u8> {
    debug_assert_eq!(header.payload_crc, crc32(payload));
    let mut bytes = Vec::with_capacity(HEADER_LEN + payload.len());
    bytes.extend_from_slice(&MAGIC);
    bytes.push(header.version);
    bytes.push(header.flags);
    bytes.extend_from_slice(&header.base_count.to_le_bytes());
    bytes.extend_from_slice(&header.payload_crc.to_le_bytes());
    bytes.extend_from_slice(payload);
    bytes
}

/// Splits a container into its validated header and payload slice.
pub fn read_container(bytes: &[u8]) -> Result<(ContainerHeader, &[u8])> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedContainer { context: "header" });
    }
    if bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = bytes[4];
    if version != VERSION {
        return Err(Error::UnsupportedVersion { found: version });
    }
    let flags = bytes[5];
    if flags & !KNOWN_FLAGS != 0 {
        return Err(Error::ReservedFlags { flags });
    }
    let base_count = u64::from_le_bytes(bytes[6..14].try_into().expect("slice is 8 bytes"));
    let stored = u32::from_le_bytes(bytes[14..18].try_into().expect("slice is 4 bytes"));
    let payload = &bytes[HEADER_LEN..];
    let computed = crc32(payload);
    if stored != computed {
        return Err(Error::ChecksumMismatch { stored, computed });
    }
    let header = ContainerHeader {
        version,
        flags,
        base_count,
        payload_crc: stored,
    };
    Ok((header, payload))
}

const CRC_POLY: u32 = 0xEDB8_8320;

const CRC_TABLE: [u32; 256] = {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u32;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & 1 != 0 { (crc >> 1) ^ CRC_POLY } else { crc >> 1 };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
};

/// CRC-32, reflected form, init and final xor both `0xFFFFFFFF`.
pub fn crc32(bytes: &[u8]) -> u32 {
    let mut crc = u32::MAX;
    for &byte in bytes {
        crc = (crc >> 8) ^ CRC_TABLE[((crc ^ u32::from(byte)) & 0xFF) as usize];
    }
    crc ^ u32::MAX
}

/// Packs tokens into the stage-2 payload layout: token count, match flag
/// bits, then the entropy-coded literals and the raw match records.
pub fn build_stage2_payload(tokens: &[Lz77Token]) -> Result<Vec<u8>> {
    let token_count =
        u32::try_from(tokens.len()).map_err(|_| Error::PayloadTooLarge { what: "token count" })?;
    let mut flag_bytes = vec![0u8; tokens.len().div_ceil(8)];
    let mut literals = Vec::new();
    let mut match_records = Vec::new();
    for (i, &token) in tokens.iter().enumerate() {
        match token {
            Lz77Token::Literal(byte) => literals.push(byte),
            Lz77Token::Match { length, distance } => {
                debug_assert!((MIN_MATCH..=MAX_MATCH).contains(&(length as usize)));
                debug_assert!((1..=WINDOW_SIZE).contains(&(distance as usize)));
                flag_bytes[i / 8] |= 1 << (i % 8);
                match_records.extend_from_slice(&(distance - 1).to_le_bytes());
                match_records.push((length as usize - MIN_MATCH) as u8);
            }
        }
    }
    let literal_count = u32::try_from(literals.len())
        .map_err(|_| Error::PayloadTooLarge { what: "literal count" })?;
    let (packed_lengths, bits) = if literals.is_empty() {
        ([0u8; 128], BitStream::new())
    } else {
        let mut freqs = [0u64; 256];
        for &byte in &literals {
            freqs[byte as usize] += 1;
        }
        let code = entropy::build_code(&freqs)?;
        let bits = entropy::huff_encode(&literals, &code)?;
        (pack_code_lengths(&code), bits)
    };
    let bit_len = u32::try_from(bits.bit_len())
        .map_err(|_| Error::PayloadTooLarge { what: "literal bit stream" })?;
    let mut payload = Vec::with_capacity(
        4 + flag_bytes.len() + 4 + 128 + 4 + bits.bytes().len() + match_records.len(),
    );
    payload.extend_from_slice(&token_count.to_le_bytes());
    payload.extend_from_slice(&flag_bytes);
    payload.extend_from_slice(&literal_count.to_le_bytes());
    payload.extend_from_slice(&packed_lengths);
    payload.extend_from_slice(&bit_len.to_le_bytes());
    payload.extend_from_slice(bits.bytes());
    payload.extend_from_slice(&match_records);
    Ok(payload)
}

/// Two code lengths per byte: even symbol in the low nibble, odd in the
/// high nibble.
pub fn pack_code_lengths(code: &CodeLengths) -> [u8; 128] {
    let lengths = code.as_array();
    let mut packed = [0u8; 128];
    for (i, slot) in packed.iter_mut().enumerate() {
        *slot = lengths[2 * i] | lengths[2 * i + 1] << 4;
    }
    packed
}

pub fn unpack_code_lengths(packed: &[u8; 128]) -> [u8; 256] {
    let mut lengths = [0u8; 256];
    for (i, &byte) in packed.iter().enumerate() {
        lengths[2 * i] = byte & 0x0F;
        lengths[2 * i + 1] = byte >> 4;
    }
    lengths
}

fn take<'a>(rest: &mut &'a [u8], n: usize, context: &'static str) -> Result<&'a [u8]> {
    if rest.len() < n {
        return Err(Error::TruncatedContainer { context });
    }
    let (head, tail) = rest.split_at(n);
    *rest = tail;
    Ok(head)
}

/// Parses and fully validates a stage-2 payload back into tokens.
pub fn parse_stage2_payload(payload: &[u8]) -> Result<Vec<Lz77Token>> {
    let rest = &mut &payload[..];

    let token_count = u32::from_le_bytes(
        take(rest, 4, "token count")?.try_into().expect("slice is 4 bytes"),
    ) as usize;
    let flag_bytes = take(rest, token_count.div_ceil(8), "match flag bits")?;
    if token_count % 8 != 0 {
        let last = flag_bytes[flag_bytes.len() - 1];
        if last >> (token_count % 8) != 0 {
            return Err(Error::CorruptStage2 {
                context: "flag padding bits are not zero",
            });
        }
    }
    let match_count = flag_bytes.iter().map(|b| b.count_ones() as usize).sum::<usize>();
    let literal_count = u32::from_le_bytes(
        take(rest, 4, "literal count")?.try_into().expect("slice is 4 bytes"),
    ) as usize;
    if literal_count + match_count != token_count {
        return Err(Error::CorruptStage2 {
            context: "literal count does not agree with the flag bits",
        });
    }
    let packed_lengths: &[u8; 128] = take(rest, 128, "code length table")?
        .try_into()
        .expect("slice is 128 bytes");
    let bit_len = u32::from_le_bytes(
        take(rest, 4, "literal bit length")?.try_into().expect("slice is 4 bytes"),
    ) as u64;
    let bit_bytes = take(rest, bit_len.div_ceil(8) as usize, "literal bit stream")?;
    let lengths = unpack_code_lengths(packed_lengths);
    let literals = if literal_count == 0 {
        if lengths.iter().any(|&l| l > 0) || bit_len != 0 {
            return Err(Error::CorruptStage2 {
                context: "literal sections must be empty when no literals exist",
            });
        }
        Vec::new()
    } else {
        let code = CodeLengths::new(lengths)
            .map_err(|_| Error::CorruptStage2 { context: "invalid code length table" })?;
        let bits = BitStream::from_parts(bit_bytes.to_vec(), bit_len)?;
        let literals = entropy::huff_decode(&bits, &code, literal_count as u64)?;
        // every stored bit must belong to some codeword
        let used: u64 = literals.iter().map(|&s| u64::from(code.length(s))).sum();
        if used != bit_len {
            return Err(Error::CorruptStage2 {
                context: "literal bit stream has trailing data",
            });
        }
        literals
    };
    let match_bytes = take(rest, 3 * match_count, "match records")?;
    if !rest.is_empty() {
        return Err(Error::CorruptStage2 { context: "trailing payload bytes" });
    }

    let mut tokens = Vec::with_capacity(token_count);
    let mut next_literal = literals.iter();
    let mut next_match = match_bytes.chunks_exact(3);
    for i in 0..token_count {
        let is_match = flag_bytes[i / 8] >> (i % 8) & 1 == 1;
        if is_match {
            let record = next_match.next().expect("record count was validated");
            let stored_distance = u16::from_le_bytes([record[0], record[1]]);
            if stored_distance as usize >= WINDOW_SIZE {
                return Err(Error::CorruptStage2 {
                    context: "match distance exceeds the window",
                });
            }
            let distance = stored_distance + 1;
            let length = u16::from(record[2]) + MIN_MATCH as u16;
            tokens.push(Lz77Token::Match { length, distance });
        } else {
            let &byte = next_literal.next().expect("literal count was validated");
            tokens.push(Lz77Token::Literal(byte));
        }
    }
    Ok(tokens)
}
