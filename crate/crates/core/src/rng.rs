//! Counter-based random streams.
//!
//! Every random number used by a sweep is addressed by
//! `(master_seed, stream, substream)`: the ChaCha key comes from the master
//! seed, the 64-bit ChaCha stream id selects e.g. the disorder realization and
//! the word position selects e.g. the site. Draws therefore never depend on
//! how work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream ids reserved for non-disorder uses, kept far from realization ids.
pub const BOOTSTRAP_STREAM_BASE: u64 = 1 << 62;

const SUBSTREAM_WORDS: u32 = 32;

pub fn substream_rng(master_seed: u64, stream: u64, substream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(substream) << SUBSTREAM_WORDS);
    rng
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}
