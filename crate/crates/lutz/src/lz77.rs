//! Second-stage dictionary coder: greedy longest-match tokenization over a
//! sliding window, with hash chains to find candidate positions.

use crate::error::{Error, Result};

/// How far back a match may reach.
pub const WINDOW_SIZE: usize = 32 * 1024;
/// Shortest run worth a match token.
pub const MIN_MATCH: usize = 3;
/// Longest run one token can carry.
pub const MAX_MATCH: usize = 258;

const HASH_BITS: u32 = 15;
const HASH_SIZE: usize = 1 << HASH_BITS;
const WINDOW_MASK: usize = WINDOW_SIZE - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lz77Token {
    Literal(u8),
    /// `length` in 3..=258 bytes copied from `distance` in 1..=32768
    /// bytes behind the current position. Sources may overlap the
    /// destination.
    Match { length: u16, distance: u16 },
}

#[derive(Debug, Clone, Copy)]
pub struct Lz77Params {
    /// Cap on candidates examined per position. Raising it trades speed
    /// for match quality; `usize::MAX` makes the search exhaustive.
    pub max_chain: usize,
}

impl Default for Lz77Params {
    fn default() -> Lz77Params {
        Lz77Params { max_chain: 128 }
    }
}

/// Reusable tokenizer state.
///
/// The hash tables store absolute stream positions. Between inputs the
/// base offset jumps past a full window, so entries left over from
/// earlier inputs always fail the distance check and the tables never
/// need clearing.
pub struct Compressor {
    params: Lz77Params,
    head: Vec<u64>,
    prev: Vec<u64>,
    base: u64,
}

impl Compressor {
    pub fn new(params: Lz77Params) -> Compressor {
        Compressor {
            params,
            head: vec![0; HASH_SIZE],
            prev: vec![0; WINDOW_SIZE],
            // positions start past window + 1 so 0 can mean "empty chain"
            base: WINDOW_SIZE as u64 + 1,
        }
    }

    pub fn compress(&mut self, data: &[u8]) -> Vec<Lz77Token> {
        let mut tokens = Vec::with_capacity(data.len() / 4 + 1);
        let mut pos = 0usize;
        while pos < data.len() {
            let (len, dist) = if data.len() - pos >= MIN_MATCH {
                self.longest_match(data, pos)
            } else {
                (0, 0)
            };
            if len >= MIN_MATCH {
                tokens.push(Lz77Token::Match {
                    length: len as u16,
                    distance: dist as u16,
                });
                for p in pos..pos + len {
                    self.insert(data, p);
                }
                pos += len;
            } else {
                tokens.push(Lz77Token::Literal(data[pos]));
                self.insert(data, pos);
                pos += 1;
            }
        }
        // jump the base past this input plus a whole window so stale
        // chain entries can never pass the distance check
        self.base += data.len() as u64 + WINDOW_SIZE as u64;
        tokens
    }

    fn hash(data: &[u8], pos: usize) -> usize {
        let v = u32::from(data[pos])
            | u32::from(data[pos + 1]) << 8
            | u32::from(data[pos + 2]) << 16;
        (v.wrapping_mul(0x9E37_79B1) >> (32 - HASH_BITS)) as usize
    }

    fn insert(&mut self, data: &[u8], pos: usize) {
        // the last two positions have no full prefix to hash
        if pos + MIN_MATCH <= data.len() {
            let hash = Self::hash(data, pos);
            let abs = self.base + pos as u64;
            self.prev[abs as usize & WINDOW_MASK] = self.head[hash];
            self.head[hash] = abs;
        }
    }

    /// Longest match at `pos`. Chains run most-recent first, so of equal
    /// lengths the smallest distance wins.
    fn longest_match(&self, data: &[u8], pos: usize) -> (usize, usize) {
        let abs = self.base + pos as u64;
        let max_len = MAX_MATCH.min(data.len() - pos);
        let mut best_len = MIN_MATCH - 1;
        let mut best_dist = 0usize;
        let mut candidate = self.head[Self::hash(data, pos)];
        let mut budget = self.params.max_chain;
        while budget > 0 && candidate != 0 && abs.saturating_sub(candidate) <= WINDOW_SIZE as u64 {
            debug_assert!(candidate >= self.base && candidate < abs);
            let cand_pos = (candidate - self.base) as usize;
            let mut len = 0usize;
            while len < max_len && data[cand_pos + len] == data[pos + len] {
                len += 1;
            }
            if len > best_len {
                best_len = len;
                best_dist = pos - cand_pos;
                if len == max_len {
                    break;
                }
            }
            let next = self.prev[candidate as usize & WINDOW_MASK];
            if next >= candidate {
                break; // chain slot was overwritten by a newer lap
            }
            candidate = next;
            budget -= 1;
        }
        if best_len >= MIN_MATCH {
            (best_len, best_dist)
        } else {
            (0, 0)
        }
    }
}

/// One-shot compression with fresh state.
pub fn compress(data: &[u8], params: Lz77Params) -> Vec<Lz77Token> {
    Compressor::new(params).compress(data)
}

/// Replays a token stream back into bytes.
pub fn expand(tokens: &[Lz77Token]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(tokens.len() * 2);
    for &token in tokens {
        match token {
            Lz77Token::Literal(byte) => out.push(byte),
            Lz77Token::Match { length, distance } => {
                let distance = distance as usize;
                if distance == 0 || distance > out.len() {
                    return Err(Error::CorruptTokenStream);
                }
                // byte-at-a-time so overlapping copies replicate
                let mut src = out.len() - distance;
                for _ in 0..length {
                    let byte = out[src];
                    out.push(byte);
                    src += 1;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn round_trip(data: &[u8], params: Lz77Params) -> Vec<Lz77Token> {
        let tokens = compress(data, params);
        assert_eq!(expand(&tokens).unwrap(), data, "round trip of {data:?}");
        tokens
    }

    #[test]
    fn short_inputs_are_all_literals() {
        for data in [&b""[..], b"a", b"ab", b"abc"] {
            let tokens = round_trip(data, Lz77Params::default());
            assert_eq!(tokens.len(), data.len());
            assert!(tokens.iter().all(|t| matches!(t, Lz77Token::Literal(_))));
        }
    }

    #[test]
    fn repeats_become_matches() {
        let tokens = round_trip(b"abcabcabc", Lz77Params::default());
        assert_eq!(
            tokens,
            vec![
                Lz77Token::Literal(b'a'),
                Lz77Token::Literal(b'b'),
                Lz77Token::Literal(b'c'),
                Lz77Token::Match { length: 6, distance: 3 },
            ]
        );
    }

    #[test]
    fn overlapping_match_replicates_a_single_byte() {
        let data = vec![b'x'; 50];
        let tokens = round_trip(&data, Lz77Params::default());
        assert_eq!(
            tokens,
            vec![
                Lz77Token::Literal(b'x'),
                Lz77Token::Match { length: 49, distance: 1 },
            ]
        );
    }

    #[test]
    fn match_length_caps_at_258() {
        let data = vec![b'y'; 1 + 258 + 258 + 10];
        let tokens = round_trip(&data, Lz77Params::default());
        assert_eq!(
            tokens,
            vec![
                Lz77Token::Literal(b'y'),
                Lz77Token::Match { length: 258, distance: 1 },
                Lz77Token::Match { length: 258, distance: 1 },
                Lz77Token::Match { length: 10, distance: 1 },
            ]
        );
    }

    #[test]
    fn ties_prefer_the_closest_candidate() {
        // "abcd" appears twice before the final occurrence; both give
        // length 4, so the second (distance 4) must win
        let tokens = round_trip(b"abcdxabcdxabcdx", Lz77Params::default());
        assert_eq!(
            tokens[5..],
            [Lz77Token::Match { length: 10, distance: 5 }]
        );
        // both earlier "abc" occurrences give length 3; distance 6 beats 12
        let tokens = round_trip(b"abcZ12abcY34abc", Lz77Params::default());
        assert_eq!(
            *tokens.last().unwrap(),
            Lz77Token::Match { length: 3, distance: 6 }
        );
    }

    #[test]
    fn longer_match_beats_closer_shorter_one() {
        let tokens = round_trip(b"abcde12345abcdX67890abcde", Lz77Params::default());
        assert_eq!(
            *tokens.last().unwrap(),
            Lz77Token::Match { length: 5, distance: 20 }
        );
    }

    #[test]
    fn matches_never_cross_the_window() {
        let mut data = b"needle".to_vec();
        data.extend(std::iter::repeat(b'.').take(WINDOW_SIZE));
        data.extend_from_slice(b"needle");
        let tokens = round_trip(&data, Lz77Params { max_chain: usize::MAX });
        for &token in &tokens {
            if let Lz77Token::Match { distance, .. } = token {
                assert!(distance as usize <= WINDOW_SIZE);
            }
        }
        // the trailing "needle" is out of range of the leading one, and
        // the dot run in between hides nothing at that hash, so the last
        // six bytes cannot all come from one far match
        let replay = expand(&tokens).unwrap();
        assert_eq!(replay, data);
    }

    #[test]
    fn state_reuse_does_not_leak_between_inputs() {
        let mut compressor = Compressor::new(Lz77Params::default());
        let first = compressor.compress(b"abcabcabc");
        // same content again: a fresh stream must see no history
        let second = compressor.compress(b"abcabcabc");
        assert_eq!(first, second);
        let fresh = compress(b"abcabcabc", Lz77Params::default());
        assert_eq!(second, fresh);
    }

    #[test]
    fn expand_rejects_bad_distances() {
        assert!(matches!(
            expand(&[Lz77Token::Match { length: 3, distance: 1 }]),
            Err(Error::CorruptTokenStream)
        ));
        assert!(matches!(
            expand(&[
                Lz77Token::Literal(b'a'),
                Lz77Token::Match { length: 3, distance: 2 },
            ]),
            Err(Error::CorruptTokenStream)
        ));
        assert!(matches!(
            expand(&[Lz77Token::Match { length: 5, distance: 0 }]),
            Err(Error::CorruptTokenStream)
        ));
    }

    #[test]
    fn token_invariants_hold() {
        let mut data = Vec::new();
        for i in 0..4000u32 {
            data.push((i % 7) as u8 + b'a');
            if i % 11 == 0 {
                data.extend_from_slice(b"pattern");
            }
        }
        for &token in &compress(&data, Lz77Params::default()) {
            if let Lz77Token::Match { length, distance } = token {
                assert!((MIN_MATCH..=MAX_MATCH).contains(&(length as usize)));
                assert!((1..=WINDOW_SIZE).contains(&(distance as usize)));
            }
        }
    }

    proptest! {
        #[test]
        fn round_trips_random_bytes(data in proptest::collection::vec(any::<u8>(), 0..3000)) {
            round_trip(&data, Lz77Params::default());
        }

        #[test]
        fn round_trips_repetitive_bytes(
            unit in proptest::collection::vec(prop::sample::select(vec![b'a', b'b', b'c']), 1..12),
            reps in 1usize..200,
            chain in prop::sample::select(vec![1usize, 4, 128, usize::MAX]),
        ) {
            let data: Vec<u8> = unit.iter().copied().cycle().take(unit.len() * reps).collect();
            round_trip(&data, Lz77Params { max_chain: chain });
        }

        #[test]
        fn tokens_always_advance(data in proptest::collection::vec(any::<u8>(), 0..2000)) {
            // total token coverage equals the input length
            let tokens = compress(&data, Lz77Params::default());
            let covered: usize = tokens
                .iter()
                .map(|t| match t {
                    Lz77Token::Literal(_) => 1,
                    Lz77Token::Match { length, .. } => *length as usize,
                })
                .sum();
            prop_assert_eq!(covered, data.len());
        }

        #[test]
        fn greedy_effort_declines_by_at_most_one(
            data in proptest::collection::vec(prop::sample::select(vec![b'a', b'b']), 0..600),
        ) {
            // longest-match length at consecutive positions can drop by
            // at most 1: dropping the first byte of a match leaves a
            // match one shorter
            let mut lens = Vec::with_capacity(data.len());
            for pos in 0..data.len() {
                let mut best = 0usize;
                let lo = pos.saturating_sub(WINDOW_SIZE);
                let cap = MAX_MATCH.min(data.len() - pos);
                for cand in lo..pos {
                    let mut l = 0;
                    while l < cap && data[cand + l] == data[pos + l] {
                        l += 1;
                    }
                    best = best.max(l);
                }
                lens.push(best);
            }
            for w in lens.windows(2) {
                if w[0] > 0 && w[0] < MAX_MATCH {
                    prop_assert!(w[1] + 1 >= w[0], "effort fell from {} to {}", w[0], w[1]);
                }
            }
        }

        #[test]
        fn deeper_search_never_loses_at_a_shared_position(
            unit in proptest::collection::vec(prop::sample::select(vec![b'a', b'b', b'c', b'd']), 1..40),
            reps in 1usize..120,
            noise in proptest::collection::vec(prop::sample::select(vec![b'a', b'b', b'c', b'd', b'e']), 0..200),
        ) {
            // the hash table state at a position depends only on the
            // position (every covered byte is inserted), so wherever
            // the two parses line up, the single-probe walk examines a
            // prefix of the candidates the unbounded walk examines and
            // cannot reach further
            let mut data: Vec<u8> = unit.iter().copied().cycle().take(unit.len() * reps).collect();
            data.extend_from_slice(&noise);
            let reaches = |params: Lz77Params| {
                let mut map = std::collections::HashMap::new();
                let mut pos = 0usize;
                for token in compress(&data, params) {
                    let step = match token {
                        Lz77Token::Literal(_) => 1,
                        Lz77Token::Match { length, .. } => length as usize,
                    };
                    map.insert(pos, step);
                    pos += step;
                }
                map
            };
            let shallow = reaches(Lz77Params { max_chain: 1 });
            let deep = reaches(Lz77Params { max_chain: usize::MAX });
            for (pos, step) in &shallow {
                if let Some(deep_step) = deep.get(pos) {
                    prop_assert!(
                        deep_step >= step,
                        "at {pos} the unbounded walk stepped {deep_step}, the single probe {step}"
                    );
                }
            }
        }
    }

    #[test]
    fn greedy_parsing_is_not_globally_optimal() {
        // a longer local step can land just short of a long repeat:
        // here the unbounded search takes "cdea" at 27 and strands
        // itself at 31 with four literals ("aa" is below the minimum
        // match), while the single probe takes "cde", lands on "aaa",
        // and finishes a token ahead
        let data = b"aaadaaaabaadbabcdeabaaabcdecdeaaaca";
        let deep = compress(data, Lz77Params { max_chain: usize::MAX });
        let shallow = compress(data, Lz77Params { max_chain: 1 });
        assert_eq!(expand(&deep).unwrap(), data);
        assert_eq!(expand(&shallow).unwrap(), data);
        assert_eq!(deep.len(), 21);
        assert_eq!(shallow.len(), 20);
        assert_eq!(
            &deep[16..19],
            &[
                Lz77Token::Match { length: 4, distance: 12 },
                Lz77Token::Literal(b'a'),
                Lz77Token::Literal(b'a'),
            ]
        );
        assert_eq!(
            &shallow[16..18],
            &[
                Lz77Token::Match { length: 3, distance: 3 },
                Lz77Token::Match { length: 3, distance: 10 },
            ]
        );
    }
}
