//! Order-0 prefix coding of literal bytes with canonical codes.
//!
//! Code lengths come from the package-merge construction, so they are
//! optimal among all prefix codes no longer than [`MAX_CODE_LEN`] bits.
//! Only the lengths are ever stored; codewords are reassigned canonically
//! in (length, symbol) order on both sides.

use crate::error::{Error, Result};

/// Longest permitted codeword, in bits.
pub const MAX_CODE_LEN: u8 = 15;

/// Per-symbol codeword lengths. Zero marks a symbol with no codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLengths {
    lengths: [u8; 256],
}

impl CodeLengths {
    /// Validates externally supplied lengths: each at most 15 bits and
    /// the whole set within the prefix-code budget.
    pub fn new(lengths: [u8; 256]) -> Result<CodeLengths> {
        let mut budget: u64 = 0;
        for &len in lengths.iter() {
            if len > MAX_CODE_LEN {
                return Err(Error::OversubscribedCode);
            }
            if len > 0 {
                budget += 1 << (MAX_CODE_LEN - len);
            }
        }
        if budget > 1 << MAX_CODE_LEN {
            return Err(Error::OversubscribedCode);
        }
        Ok(CodeLengths { lengths })
    }

    pub fn length(&self, symbol: u8) -> u8 {
        self.lengths[symbol as usize]
    }

    pub fn as_array(&self) -> &[u8; 256] {
        &self.lengths
    }
}

/// Builds optimal length-limited code lengths for the nonzero
/// frequencies. A single-symbol alphabet still gets a one-bit codeword.
pub fn build_code(freqs: &[u64; 256]) -> Result<CodeLengths> {
    let mut present: Vec<(u64, usize)> = freqs
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f > 0)
        .map(|(symbol, &f)| (f, symbol))
        .collect();
    if present.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let mut lengths = [0u8; 256];
    if present.len() == 1 {
        lengths[present[0].1] = 1;
        return Ok(CodeLengths { lengths });
    }
    // sort by (frequency, symbol) so equal frequencies still produce one
    // deterministic answer
    present.sort_unstable();
    package_merge(&present, &mut lengths);
    Ok(CodeLengths { lengths })
}

#[derive(Clone)]
struct Node {
    weight: u128,
    symbols: Vec<usize>,
}

/// Package-merge: repeatedly pair up the cheapest nodes and re-merge with
/// the singletons; after `MAX_CODE_LEN - 1` rounds the first `2n - 2`
/// nodes select each symbol once per bit of its code length.
fn package_merge(items: &[(u64, usize)], lengths: &mut [u8; 256]) {
    let singles: Vec<Node> = items
        .iter()
        .map(|&(weight, symbol)| Node {
            weight: u128::from(weight),
            symbols: vec![symbol],
        })
        .collect();
    let mut current = singles.clone();
    for _ in 1..MAX_CODE_LEN {
        let mut merged = Vec::with_capacity(singles.len() + current.len() / 2);
        let mut packages = current.chunks_exact(2).map(|pair| Node {
            weight: pair[0].weight + pair[1].weight,
            symbols: pair[0].symbols.iter().chain(&pair[1].symbols).copied().collect(),
        });
        // both inputs are sorted; singles win ties so the merge is stable
        let mut next_package = packages.next();
        for single in &singles {
            while let Some(p) = next_package.take() {
                if p.weight < single.weight {
                    merged.push(p);
                    next_package = packages.next();
                } else {
                    next_package = Some(p);
                    break;
                }
            }
            merged.push(single.clone());
        }
        if let Some(p) = next_package {
            merged.push(p);
        }
        merged.extend(packages);
        current = merged;
    }
    for node in current.iter().take(2 * items.len() - 2) {
        for &symbol in &node.symbols {
            lengths[symbol] += 1;
        }
    }
}

/// Canonical codewords for the given lengths, assigned in
/// (length, symbol) order.
pub(crate) fn canonical_codes(code: &CodeLengths) -> [u16; 256] {
    let (first_code, _) = length_classes(code);
    let mut next = first_code;
    let mut codes = [0u16; 256];
    for symbol in 0..256 {
        let len = code.lengths[symbol] as usize;
        if len > 0 {
            codes[symbol] = next[len] as u16;
            next[len] += 1;
        }
    }
    codes
}

/// First codeword value and symbol count for each length class.
fn length_classes(code: &CodeLengths) -> ([u32; 16], [u32; 16]) {
    let mut counts = [0u32; 16];
    for &len in code.lengths.iter() {
        counts[len as usize] += 1;
    }
    counts[0] = 0;
    let mut first_code = [0u32; 16];
    let mut value = 0u32;
    for len in 1..=MAX_CODE_LEN as usize {
        value = (value + counts[len - 1]) << 1;
        first_code[len] = value;
    }
    (first_code, counts)
}

/// Packed bits, most significant bit first within each byte. The final
/// partial byte is padded with zero bits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitStream {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitStream {
    pub fn new() -> BitStream {
        BitStream::default()
    }

    /// Reassembles a stream parsed from storage. The byte count must
    /// match the bit length and padding bits must be zero.
    pub fn from_parts(bytes: Vec<u8>, bit_len: u64) -> Result<BitStream> {
        if bytes.len() as u64 != bit_len.div_ceil(8) {
            return Err(Error::CorruptStage2 {
                context: "bit stream byte count does not match its bit length",
            });
        }
        if bit_len % 8 != 0 {
            let last = bytes[bytes.len() - 1];
            if last & (0xFF >> (bit_len % 8)) != 0 {
                return Err(Error::CorruptStage2 {
                    context: "bit stream padding bits are not zero",
                });
            }
        }
        Ok(BitStream { bytes, bit_len })
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    fn push_bits(&mut self, code: u16, len: u8) {
        debug_assert!(len > 0 && len <= MAX_CODE_LEN);
        debug_assert_eq!(code >> len, 0);
        for i in (0..len).rev() {
            let bit_pos = (self.bit_len % 8) as u8;
            if bit_pos == 0 {
                self.bytes.push(0);
            }
            if code >> i & 1 == 1 {
                *self.bytes.last_mut().expect("byte was just pushed") |= 0x80 >> bit_pos;
            }
            self.bit_len += 1;
        }
    }
}

struct BitReader<'a> {
    stream: &'a BitStream,
    pos: u64,
}

impl<'a> BitReader<'a> {
    fn new(stream: &'a BitStream) -> BitReader<'a> {
        BitReader { stream, pos: 0 }
    }

    fn read_bit(&mut self) -> Option<bool> {
        if self.pos >= self.stream.bit_len {
            return None;
        }
        let byte = self.stream.bytes[(self.pos / 8) as usize];
        let bit = byte >> (7 - self.pos % 8) & 1;
        self.pos += 1;
        Some(bit == 1)
    }
}

pub fn huff_encode(data: &[u8], code: &CodeLengths) -> Result<BitStream> {
    let codes = canonical_codes(code);
    let mut bits = BitStream::new();
    for &symbol in data {
        let len = code.length(symbol);
        if len == 0 {
            return Err(Error::UncodableSymbol { symbol });
        }
        bits.push_bits(codes[symbol as usize], len);
    }
    Ok(bits)
}

/// Decodes exactly `count` symbols by walking length classes: a prefix of
/// length L is a codeword when it falls inside class L's canonical range.
pub fn huff_decode(bits: &BitStream, code: &CodeLengths, count: u64) -> Result<Vec<u8>> {
    let (first_code, counts) = length_classes(code);
    let mut first_index = [0u32; 16];
    let mut running = 0u32;
    for len in 1..=MAX_CODE_LEN as usize {
        first_index[len] = running;
        running += counts[len];
    }
    let mut ordered = Vec::with_capacity(running as usize);
    for len in 1..=MAX_CODE_LEN {
        for symbol in 0..=255u8 {
            if code.length(symbol) == len {
                ordered.push(symbol);
            }
        }
    }
    let mut reader = BitReader::new(bits);
    let mut out = Vec::with_capacity(count.min(1 << 20) as usize);
    for decoded in 0..count {
        let mut acc = 0u32;
        let mut len = 0usize;
        loop {
            let bit = reader.read_bit().ok_or(Error::TruncatedStream {
                expected: count,
                decoded,
            })?;
            acc = acc << 1 | u32::from(bit);
            len += 1;
            if len > MAX_CODE_LEN as usize {
                return Err(Error::InvalidCodeword);
            }
            let offset = acc.wrapping_sub(first_code[len]);
            if offset < counts[len] {
                out.push(ordered[(first_index[len] + offset) as usize]);
                break;
            }
        }
    }
    Ok(out)
}
