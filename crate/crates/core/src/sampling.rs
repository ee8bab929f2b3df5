//! Fair coins and geometric random variables.
//!
//! Every random decision a protocol makes goes through a [`CoinSource`], so a
//! transition function fed a [`ScriptedCoin`] is fully deterministic. The
//! seeded source is a ChaCha8 stream: portable, counter based, and splittable
//! into independent per-run streams via [`SeededCoin::for_run`].

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("coin exhausted")]
    CoinExhausted,
    #[error("k must be positive")]
    ZeroBatch,
}

/// A geometric random variable with parameter 1/2: the number of flips up to
/// and including the first tails. Always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grv(u32);

impl Grv {
    pub fn new(value: u32) -> Option<Self> {
        (value >= 1).then_some(Self(value))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Grv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Provider of independent fair bits. `true` is heads.
pub trait CoinSource {
    fn flip(&mut self) -> Result<bool, SamplingError>;

    /// Counts heads until the first tails. Implementations may override this
    /// with a faster path, but must consume exactly the same bits as repeated
    /// calls to [`CoinSource::flip`] would.
    fn geometric(&mut self) -> Result<Grv, SamplingError> {
        let mut value = 1;
        while self.flip()? {
            value += 1;
        }
        Ok(Grv(value))
    }
}

impl<C: CoinSource + ?Sized> CoinSource for &mut C {
    fn flip(&mut self) -> Result<bool, SamplingError> {
        (**self).flip()
    }

    fn geometric(&mut self) -> Result<Grv, SamplingError> {
        (**self).geometric()
    }
}

/// PRNG-backed coin. Bits are drawn from 64-bit words least-significant bit
/// first, so the flip sequence is identical on every platform.
#[derive(Debug, Clone)]
pub struct SeededCoin {
    rng: ChaCha8Rng,
    bits: u64,
    available: u32,
}

impl SeededCoin {
    pub fn new(seed: u64) -> Self {
        Self::from_rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent stream for run `run` of a batch seeded with `master`.
    /// Streams do not depend on the order in which runs execute.
    pub fn for_run(master: u64, run: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master);
        rng.set_stream(run);
        Self::from_rng(rng)
    }

    fn from_rng(rng: ChaCha8Rng) -> Self {
        Self {
            rng,
            bits: 0,
            available: 0,
        }
    }

    /// Uniform integer in `[0, bound)`. Panics if `bound == 0`.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        self.rng.random_range(0..bound)
    }

    #[inline]
    fn refill(&mut self) {
        self.bits = self.rng.next_u64();
        self.available = 64;
    }
}

impl CoinSource for SeededCoin {
    #[inline]
    fn flip(&mut self) -> Result<bool, SamplingError> {
        if self.available == 0 {
            self.refill();
        }
        let heads = self.bits & 1 == 1;
        self.bits >>= 1;
        self.available -= 1;
        Ok(heads)
    }

    fn geometric(&mut self) -> Result<Grv, SamplingError> {
        let mut value = 1;
        loop {
            if self.available == 0 {
                self.refill();
            }
            let heads = self.bits.trailing_ones().min(self.available);
            if heads < self.available {
                // heads, then the tails bit
                self.bits = self.bits.checked_shr(heads + 1).unwrap_or(0);
                self.available -= heads + 1;
                return Ok(Grv(value + heads));
            }
            value += self.available;
            self.available = 0;
        }
    }
}

/// A fixed, finite bit sequence. Errors once exhausted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptedCoin {
    bits: VecDeque<bool>,
}

impl ScriptedCoin {
    pub fn new(bits: impl IntoIterator<Item = bool>) -> Self {
        Self {
            bits: bits.into_iter().collect(),
        }
    }

    /// Script that makes successive geometric samples return `values`.
    /// Panics on a zero value, which no coin sequence can produce.
    pub fn from_grvs(values: &[u32]) -> Self {
        let mut bits = VecDeque::new();
        for &v in values {
            assert!(v >= 1, "a GRV is at least 1");
            bits.extend(std::iter::repeat(true).take(v as usize - 1));
            bits.push_back(false);
        }
        Self { bits }
    }

    /// Script for successive `grv_max(k)` calls returning `maxima`, each
    /// realised as one draw of the maximum followed by `k - 1` ones.
    pub fn from_grv_maxima(k: u32, maxima: &[u32]) -> Self {
        let mut values = Vec::with_capacity(maxima.len() * k as usize);
        for &m in maxima {
            values.push(m);
            values.extend(std::iter::repeat(1).take(k as usize - 1));
        }
        Self::from_grvs(&values)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len()
    }
}

impl CoinSource for ScriptedCoin {
    fn flip(&mut self) -> Result<bool, SamplingError> {
        self.bits.pop_front().ok_or(SamplingError::CoinExhausted)
    }
}

pub fn geometric_sample<C: CoinSource + ?Sized>(coin: &mut C) -> Result<Grv, SamplingError> {
    coin.geometric()
}

/// Maximum of `k` fresh geometric samples, all drawn within one call.
pub fn grv_max<C: CoinSource + ?Sized>(k: u32, coin: &mut C) -> Result<Grv, SamplingError> {
    if k == 0 {
        return Err(SamplingError::ZeroBatch);
    }
    let mut best = coin.geometric()?;
    for _ in 1..k {
        best = best.max(coin.geometric()?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scripted_single_tails_is_one() {
        let mut coin = ScriptedCoin::new([false]);
        assert_eq!(geometric_sample(&mut coin).unwrap().get(), 1);
    }

    #[test]
    fn scripted_two_heads_then_tails_is_three() {
        let mut coin = ScriptedCoin::new([true, true, false]);
        assert_eq!(geometric_sample(&mut coin).unwrap().get(), 3);
        assert_eq!(coin.remaining(), 0);
    }

    #[test]
    fn exhausted_mid_sample() {
        let mut coin = ScriptedCoin::new([true, true]);
        assert_eq!(
            geometric_sample(&mut coin),
            Err(SamplingError::CoinExhausted)
        );
        let mut empty = ScriptedCoin::default();
        assert_eq!(empty.flip(), Err(SamplingError::CoinExhausted));
        assert_eq!(SamplingError::CoinExhausted.to_string(), "coin exhausted");
    }

    #[test]
    fn grv_max_of_script() {
        let mut coin = ScriptedCoin::from_grvs(&[3, 1, 5]);
        assert_eq!(grv_max(3, &mut coin).unwrap().get(), 5);
        assert_eq!(coin.remaining(), 0);
    }

    #[test]
    fn grv_max_rejects_zero() {
        let mut coin = SeededCoin::new(1);
        assert_eq!(grv_max(0, &mut coin), Err(SamplingError::ZeroBatch));
        assert_eq!(SamplingError::ZeroBatch.to_string(), "k must be positive");
    }

    #[test]
    fn grv_max_single_draw_matches_sample() {
        let mut a = SeededCoin::new(99);
        let mut b = SeededCoin::new(99);
        for _ in 0..1000 {
            assert_eq!(
                grv_max(1, &mut a).unwrap(),
                geometric_sample(&mut b).unwrap()
            );
        }
    }

    #[test]
    fn grv_rejects_zero() {
        assert!(Grv::new(0).is_none());
        assert_eq!(Grv::new(4).unwrap().get(), 4);
    }

    #[test]
    fn seeded_is_reproducible() {
        let draw = |seed| {
            let mut c = SeededCoin::new(seed);
            (0..500)
                .map(|_| c.geometric().unwrap().get())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn run_streams_are_distinct_and_stable() {
        let first = |c: &mut SeededCoin| c.below(u64::MAX);
        assert_eq!(
            first(&mut SeededCoin::for_run(7, 3)),
            first(&mut SeededCoin::for_run(7, 3))
        );
        assert_ne!(
            first(&mut SeededCoin::for_run(7, 3)),
            first(&mut SeededCoin::for_run(7, 4))
        );
    }

    #[test]
    fn empirical_pmf_matches_half_powers() {
        let mut coin = SeededCoin::new(2024);
        let trials = 1_000_000;
        let mut counts = [0u32; 3];
        for _ in 0..trials {
            let g = coin.geometric().unwrap().get() as usize;
            if g <= 2 {
                counts[g] += 1;
            }
        }
        let p1 = counts[1] as f64 / trials as f64;
        let p2 = counts[2] as f64 / trials as f64;
        assert!((0.498..=0.502).contains(&p1), "Pr[G=1] = {p1}");
        assert!((0.248..=0.252).contains(&p2), "Pr[G=2] = {p2}");
    }

    #[test]
    fn memoryless() {
        let mut coin = SeededCoin::new(5);
        let samples: Vec<u32> = (0..1_000_000)
            .map(|_| coin.geometric().unwrap().get())
            .collect();
        let tail = |t: u32| samples.iter().filter(|&&g| g > t).count() as f64;
        for a in 1..=3 {
            for b in 1..=3 {
                let conditional = tail(a + b) / tail(a);
                let unconditional = tail(b) / samples.len() as f64;
                assert!(
                    (conditional - unconditional).abs() <= 0.02,
                    "a={a} b={b}: {conditional} vs {unconditional}"
                );
            }
        }
    }

    #[test]
    fn larger_batches_dominate() {
        let trials = 100_000;
        let cdf = |k: u32, seed: u64| {
            let mut coin = SeededCoin::new(seed);
            let mut hist = vec![0u32; 80];
            for _ in 0..trials {
                hist[grv_max(k, &mut coin).unwrap().get().min(79) as usize] += 1;
            }
            let mut acc = 0.0;
            hist.iter()
                .map(|&h| {
                    acc += h as f64 / trials as f64;
                    acc
                })
                .collect::<Vec<_>>()
        };
        for k in 2..=4 {
            let hi = cdf(k, 10 + k as u64);
            let lo = cdf(k - 1, 20 + k as u64);
            for (x, (h, l)) in hi.iter().zip(&lo).enumerate() {
                assert!(*h <= l + 0.01, "k={k} x={x}: F_k={h} F_k-1={l}");
            }
        }
    }

    proptest! {
        #[test]
        fn fast_geometric_consumes_like_flips(seed in any::<u64>(), draws in 1usize..200) {
            let mut fast = SeededCoin::new(seed);
            let mut slow = SeededCoin::new(seed);
            for _ in 0..draws {
                let expected = {
                    let mut v = 1;
                    while slow.flip().unwrap() { v += 1; }
                    v
                };
                prop_assert_eq!(fast.geometric().unwrap().get(), expected);
            }
            // both streams must be at the same position afterwards
            for _ in 0..70 {
                prop_assert_eq!(fast.flip().unwrap(), slow.flip().unwrap());
            }
        }

        #[test]
        fn samples_are_positive(seed in any::<u64>()) {
            let mut coin = SeededCoin::new(seed);
            for _ in 0..100 {
                prop_assert!(coin.geometric().unwrap().get() >= 1);
            }
        }
    }
}
