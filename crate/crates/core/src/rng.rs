//! Deterministic random numbers.
//!
//! Two flavours live here. [`SeqRng`] is a plain sequential SplitMix64 stream
//! used by the graph generators. [`EntityStream`] is counter based: every value
//! is a pure function of `(master seed, entity, purpose, index)`, so an entity's
//! draws never depend on which logical process hosts it, on worker scheduling,
//! or on how many other draws happened elsewhere in the run.

use crate::graph::NodeId;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn combine(acc: u64, word: u64) -> u64 {
    mix64(acc ^ mix64(word.wrapping_add(GOLDEN)))
}

/// Seed for member `index` of a family keyed by `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    combine(mix64(master ^ 0x6C75_6E65_735F_6B21), index)
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unbiased integer in `[0, bound)` from a source of 64-bit words (Lemire).
#[inline]
fn below_with(bound: u64, mut next: impl FnMut() -> u64) -> u64 {
    debug_assert!(bound > 0);
    loop {
        let wide = (next() as u128) * (bound as u128);
        let low = wide as u64;
        if low >= bound.wrapping_neg() % bound {
            return (wide >> 64) as u64;
        }
    }
}

/// Sequential SplitMix64 generator.
#[derive(Clone, Debug)]
pub struct SeqRng {
    state: u64,
}

impl SeqRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform integer in `[0, bound)`. `bound` must be non-zero.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        below_with(bound, || self.next_u64())
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }
}

/// What a draw is for. The tag and its fields become part of the stream key,
/// so decisions about different things never share random values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Purpose {
    /// Per-timestep message generation coin.
    Generate { t: u32 },
    /// Per-neighbor forwarding coins for one message.
    Forward { origin: NodeId, seq: u32 },
    /// Random stimulus recipient when no provider is known.
    StimulusTarget { origin: NodeId, t: u32 },
    /// Free-form tag for protocols outside this crate.
    Custom(u64),
}

impl Purpose {
    fn words(self) -> [u64; 2] {
        match self {
            Purpose::Generate { t } => [1, t as u64],
            Purpose::Forward { origin, seq } => [2, ((origin as u64) << 32) | seq as u64],
            Purpose::StimulusTarget { origin, t } => [3, ((origin as u64) << 32) | t as u64],
            Purpose::Custom(tag) => [4, tag],
        }
    }
}

/// Counter-based stream keyed by `(master seed, entity, purpose)`.
#[derive(Clone, Debug)]
pub struct EntityStream {
    key: u64,
    counter: u64,
}

impl EntityStream {
    pub fn new(seed: u64, entity: NodeId, purpose: Purpose) -> Self {
        let [tag, body] = purpose.words();
        let key = combine(combine(combine(mix64(seed), entity as u64), tag), body);
        Self { key, counter: 0 }
    }

    #[inline]
    fn word_at(&self, index: u64) -> u64 {
        mix64(self.key ^ mix64(index.wrapping_mul(GOLDEN).wrapping_add(1)))
    }

    /// Uniform value in `[0, 1)` at position `index`, without advancing.
    #[inline]
    pub fn at(&self, index: u64) -> f64 {
        unit_f64(self.word_at(index))
    }

    /// Next value in `[0, 1)`; advances only this stream's counter.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        let v = self.at(self.counter);
        self.counter += 1;
        v
    }

    /// Next uniform integer in `[0, bound)`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        below_with(bound, || {
            let w = self.word_at(self.counter);
            self.counter += 1;
            w
        })
    }

    pub fn draws(&self) -> u64 {
        self.counter
    }
}

/// Draw number `index` of `entity`'s stream for `purpose`.
pub fn entity_rng_draw(seed: u64, entity: NodeId, purpose: Purpose, index: u64) -> f64 {
    EntityStream::new(seed, entity, purpose).at(index)
}
