//! Fixed 64-entry mapping between base triplets and single printable bytes.
//!
//! Every triplet over {A, T, C, G} has exactly one code byte, and the code
//! bytes avoid `/`, `A`, `C`, `G` and `T` so a pre-coded stream can carry
//! raw leftover bases and run escapes without ambiguity.

use crate::error::{Error, Result};

/// One sequence symbol after input normalization.
///
/// The discriminant is also the digit used to index the triplet table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Base {
    A = 0,
    T = 1,
    C = 2,
    G = 3,
    /// Unknown or masked base.
    N = 4,
}

impl Base {
    /// Maps a raw input byte to a base, folding lower case to upper case.
    pub fn from_ascii(byte: u8) -> Option<Base> {
        match byte {
            b'A' | b'a' => Some(Base::A),
            b'T' | b't' => Some(Base::T),
            b'C' | b'c' => Some(Base::C),
            b'G' | b'g' => Some(Base::G),
            b'N' | b'n' => Some(Base::N),
            _ => None,
        }
    }

    pub fn to_ascii(self) -> u8 {
        match self {
            Base::A => b'A',
            Base::T => b'T',
            Base::C => b'C',
            Base::G => b'G',
            Base::N => b'N',
        }
    }

    pub fn is_n(self) -> bool {
        self == Base::N
    }
}

/// Three consecutive non-N bases, the unit the table codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet([Base; 3]);

impl Triplet {
    /// Returns `None` when any component is N.
    pub fn new(b0: Base, b1: Base, b2: Base) -> Option<Triplet> {
        if b0.is_n() || b1.is_n() || b2.is_n() {
            None
        } else {
            Some(Triplet([b0, b1, b2]))
        }
    }

    pub fn bases(self) -> [Base; 3] {
        self.0
    }

    /// Row number in the table: base-4 value of the three digits.
    fn index(self) -> usize {
        (self.0[0] as usize) * 16 + (self.0[1] as usize) * 4 + self.0[2] as usize
    }

    fn from_index(index: usize) -> Triplet {
        debug_assert!(index < 64);
        const DIGITS: [Base; 4] = [Base::A, Base::T, Base::C, Base::G];
        Triplet([
            DIGITS[(index >> 4) & 3],
            DIGITS[(index >> 2) & 3],
            DIGITS[index & 3],
        ])
    }
}

/// A byte known to be one of the 64 triplet codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeChar(u8);

impl CodeChar {
    pub fn new(byte: u8) -> Result<CodeChar> {
        if is_code_char(byte) {
            Ok(CodeChar(byte))
        } else {
            Err(Error::InvalidCodeChar { byte })
        }
    }

    pub fn as_byte(self) -> u8 {
        self.0
    }
}

/// Code byte for each triplet index. Row order runs AAA, AAT, AAC, AAG,
/// ATA, ... through GGG, i.e. base-4 counting with digits A, T, C, G.
#[rustfmt::skip]
const ENCODE: [u8; 64] = [
    // AAx  ATx  ACx  AGx
    b'!', b'b', b'"', b'd', b'e', b'f', b'#', b'h',
    b'i', b'j', b'k', b'l', b'm', b'n', b'o', b'p',
    // TAx  TTx  TCx  TGx
    b'q', b'r', b's', b'$', b'u', b'v', b'w', b'x',
    b'y', b'z', b'%', b'B', b'&', b'D', b'E', b'F',
    // CAx  CTx  CCx  CGx
    b'\'', b'H', b'I', b'J', b'K', b'L', b'M', b'N',
    b'O', b'P', b'Q', b'R', b'S', b'(', b'U', b'V',
    // GAx  GTx  GCx  GGx
    b'W', b'X', b'Y', b'Z', b'0', b'1', b'2', b'3',
    b'4', b'5', b'6', b'7', b'8', b'9', b'+', b'-',
];

const NO_CODE: u8 = 0xFF;

/// Triplet index for each byte value; `NO_CODE` marks non-members.
const DECODE: [u8; 256] = {
    let mut table = [NO_CODE; 256];
    let mut index = 0;
    while index < 64 {
        table[ENCODE[index] as usize] = index as u8;
        index += 1;
    }
    table
};

pub fn encode_triplet(triplet: Triplet) -> CodeChar {
    CodeChar(ENCODE[triplet.index()])
}

pub fn decode_code(code: CodeChar) -> Triplet {
    Triplet::from_index(DECODE[code.0 as usize] as usize)
}

/// Triplet for a raw byte, or `None` when the byte is not a code character.
pub fn decode_byte(byte: u8) -> Option<Triplet> {
    match DECODE[byte as usize] {
        NO_CODE => None,
        index => Some(Triplet::from_index(index as usize)),
    }
}

pub fn is_code_char(byte: u8) -> bool {
    DECODE[byte as usize] != NO_CODE
}

/// All 64 `(code byte, triplet)` pairs in table row order.
pub fn table_entries() -> impl Iterator<Item = (u8, Triplet)> {
    (0..64).map(|index| (ENCODE[index], Triplet::from_index(index)))
}
