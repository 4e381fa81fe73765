//! Deterministic, splittable pseudo-random streams and the distribution
//! samplers the simulation harness needs.
//!
//! A stream is a pure function of `(master_seed, derivation path)`, so any
//! unit of work (a replicate, a fold, a fit attempt) can re-create its own
//! stream no matter which worker thread picks it up. The generator is
//! counter-based in the SplitMix64 / SplittableRandom style: each stream
//! owns a mixed 64-bit state origin and an odd per-stream gamma, and output
//! `i` is `mix64(state0 + i * gamma)`.
//!
//! Normal variates use the Marsaglia polar method. The choice is pinned:
//! sequences are bit-reproducible within a build, not across algorithm
//! changes.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const MIX_MUL_1: u64 = 0xbf58_476d_1ce4_e5b9;
const MIX_MUL_2: u64 = 0x94d0_49bb_1331_11eb;

// Domain-separation tweaks so key, state and gamma derivations never alias.
const KEY_TWEAK: u64 = 0xa076_1d64_78bd_642f;
const STATE_TWEAK: u64 = 0xe703_7ed1_a0b4_28db;
const GAMMA_TWEAK: u64 = 0x8ebc_6af0_9c88_c6e3;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

fn derive_key(parent_key: u64, tag: u64) -> u64 {
    mix64(parent_key ^ mix64(tag.wrapping_add(GOLDEN_GAMMA) ^ KEY_TWEAK))
}

/// A splittable, counter-based random stream.
///
/// Streams derived from the same master seed with different paths never
/// share state and may be used concurrently. A single stream is
/// single-owner: all sampling methods take `&mut self`.
#[derive(Debug, Clone)]
pub struct RngStream {
    /// Derivation key; children are keyed off this, not off the counter.
    key: u64,
    state0: u64,
    gamma: u64,
    counter: u64,
    /// Second output of the last polar-method round, if unconsumed.
    spare_normal: Option<f64>,
}

impl RngStream {
    fn with_key(key: u64) -> Self {
        RngStream {
            key,
            state0: mix64(key ^ STATE_TWEAK),
            gamma: mix64(key ^ GAMMA_TWEAK) | 1,
            counter: 0,
            spare_normal: None,
        }
    }

    /// Root stream for a master seed (the empty derivation path).
    pub fn from_master(master_seed: u64) -> Self {
        Self::with_key(mix64(master_seed ^ KEY_TWEAK))
    }

    /// Child stream keyed by `tag`. Pure in the parent's identity: the
    /// child does not depend on how many draws the parent has produced,
    /// and the same tag always yields the same child.
    pub fn child(&self, tag: u64) -> RngStream {
        Self::with_key(derive_key(self.key, tag))
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(self.state0.wrapping_add(self.counter.wrapping_mul(self.gamma)));
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Unbiased uniform integer in `[0, bound)` (Lemire's method).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below bound must be positive");
        let mut x = self.next_u64();
        let mut m = u128::from(x) * u128::from(bound);
        let mut lo = m as u64;
        if lo < bound {
            let threshold = bound.wrapping_neg() % bound;
            while lo < threshold {
                x = self.next_u64();
                m = u128::from(x) * u128::from(bound);
                lo = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// One standard-normal draw (polar method; the spare of each accepted
    /// pair is cached and returned on the following call).
    pub fn next_std_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// `count` i.i.d. draws from N(0, 1).
    pub fn sample_std_normal(&mut self, count: usize) -> Vec<f64> {
        assert!(count >= 1, "sample count must be positive");
        (0..count).map(|_| self.next_std_normal()).collect()
    }

    /// One draw distributed as t with 3 degrees of freedom scaled to unit
    /// variance. With V the sum of three squared standard normals,
    /// Z / sqrt(V / 3) / sqrt(3) simplifies to Z / sqrt(V).
    pub fn next_scaled_t3(&mut self) -> f64 {
        let z = self.next_std_normal();
        loop {
            let a = self.next_std_normal();
            let b = self.next_std_normal();
            let c = self.next_std_normal();
            let v = a * a + b * b + c * c;
            if v > 0.0 {
                return z / v.sqrt();
            }
        }
    }

    /// `count` i.i.d. draws from the unit-variance scaled t3 distribution.
    pub fn sample_scaled_t3(&mut self, count: usize) -> Vec<f64> {
        assert!(count >= 1, "sample count must be positive");
        (0..count).map(|_| self.next_scaled_t3()).collect()
    }
}

/// Derive the stream identified by `path` under `master_seed`.
///
/// Distinct paths yield distinct, statistically independent streams; the
/// same `(master_seed, path)` always reproduces the same sequence.
pub fn derive_stream(master_seed: u64, path: &[u64]) -> RngStream {
    let mut stream = RngStream::from_master(master_seed);
    for &tag in path {
        stream = stream.child(tag);
    }
    stream
}

/// Stable 64-bit digest of a name, for deriving streams keyed by dataset
/// or scenario identifiers rather than positional indices.
pub fn hash_name(name: &str) -> u64 {
    let mut h = 0x51ab_7c3e_0d94_f2a6u64;
    for &b in name.as_bytes() {
        h = mix64(h ^ u64::from(b).wrapping_add(GOLDEN_GAMMA));
    }
    mix64(h ^ name.len() as u64)
}
