//! Helpers shared by the integration tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform random bases, no layout bytes.
pub fn uniform_bases(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| b"ATCG"[rng.gen_range(0..4)]).collect()
}

/// Sequence text with the broad statistics of real genomic data: an
/// AT-rich composition and occasional long, lightly mutated repeats of
/// earlier segments (around a quarter of the output), with two thirds of
/// the repeats starting a multiple of three bases back.
pub fn genome_like(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq: Vec<u8> = Vec::with_capacity(len);
    while seq.len() < len {
        if seq.len() > 2000 && rng.gen_bool(0.0005) {
            let span = rng.gen_range(150..=1500.min(seq.len() / 2));
            // repeats are local, as in real genomes
            let mut back = rng.gen_range(span..=60_000.min(seq.len()));
            if rng.gen_bool(2.0 / 3.0) {
                // a copy distance divisible by three keeps the triplet
                // frames of source and copy in step
                back -= back % 3;
            }
            let start = seq.len() - back;
            for i in start..start + span {
                if seq.len() == len {
                    break;
                }
                let byte = if rng.gen_bool(0.015) {
                    random_base(&mut rng)
                } else {
                    seq[i]
                };
                seq.push(byte);
            }
        } else {
            let b = random_base(&mut rng);
            seq.push(b);
        }
    }
    seq
}

fn random_base(rng: &mut ChaCha8Rng) -> u8 {
    // roughly 31% A, 33% T, 18% C, 18% G
    let roll = rng.gen_range(0u32..100);
    if roll < 31 {
        b'A'
    } else if roll < 64 {
        b'T'
    } else if roll < 82 {
        b'C'
    } else {
        b'G'
    }
}
