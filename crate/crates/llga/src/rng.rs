//! Deterministic pseudo-randomness.
//!
//! Every stochastic component in this crate draws from [`RandomSource`], a
//! xoshiro256** generator seeded through SplitMix64. Both recurrences are
//! spelled out here rather than pulled from a crate so that the exact streams
//! are pinned by this source file and can be reproduced in any language.
//!
//! Stream contract:
//! - `next_u64` is the xoshiro256** output function.
//! - `next_f64` maps one `next_u64` to a uniform real in [0,1) using the top
//!   53 bits: `(u >> 11) * 2^-53`.
//! - `next_below` uses rejection from `next_u64`; it consumes a variable but
//!   deterministic number of outputs.
//! - `sample_binomial` consumes exactly one uniform real.
//! - `sample_distinct` consumes only `next_below` draws.

use std::collections::HashSet;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step evaluated at state `x`: add the golden-ratio increment,
/// then apply the 64-bit finalizer. Used for seed derivation so that related
/// seeds (base, base+1, ...) produce unrelated streams.
pub fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base` with [`mix`], giving every (experiment, cell,
/// run) coordinate its own well-separated seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(base, |acc, &p| mix(acc ^ p))
}

/// xoshiro256** generator. State is never all zero: the four words are
/// distinct SplitMix64 outputs and the finalizer is a bijection, so at most
/// one of them can be zero.
#[derive(Debug, Clone)]
pub struct RandomSource {
    s: [u64; 4],
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        let mut state = seed;
        let mut word = || {
            state = state.wrapping_add(GOLDEN_GAMMA);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        let s = [word(), word(), word(), word()];
        debug_assert!(s.iter().any(|&w| w != 0));
        RandomSource { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform real in [0,1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound). Rejection sampling, so the result is
    /// exactly uniform. Panics if `bound` is zero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below requires a positive bound");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % bound;
            }
        }
    }
}

/// Binomial sample via inverse transform: one uniform real, then a forward
/// scan of the CDF. The scan uses the PMF recurrence
/// `pmf(k+1) = pmf(k) * (n-k)/(k+1) * p/q` in linear space while `n*p <= 64`
/// (there `q^n >= e^-65` cannot underflow) and in log space otherwise.
/// Degenerate cases return without consuming randomness.
pub fn sample_binomial(n: u64, p: f64, rng: &mut RandomSource) -> u64 {
    assert!(
        (0.0..=1.0).contains(&p),
        "binomial probability {p} outside [0,1]"
    );
    if n == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return n;
    }
    let u = rng.next_f64();
    let q = 1.0 - p;
    let nf = n as f64;
    if nf * p <= 64.0 {
        let mut pmf = (nf * q.ln()).exp();
        let mut cdf = pmf;
        for k in 0..n {
            if u < cdf {
                return k;
            }
            pmf *= ((n - k) as f64 / (k + 1) as f64) * (p / q);
            cdf += pmf;
        }
    } else {
        let mut log_pmf = nf * q.ln();
        let log_ratio = p.ln() - q.ln();
        let mut cdf = log_pmf.exp();
        for k in 0..n {
            if u < cdf {
                return k;
            }
            log_pmf += ((n - k) as f64 / (k + 1) as f64).ln() + log_ratio;
            cdf += log_pmf.exp();
        }
    }
    n
}

/// Samples `k` distinct indices from `0..n`, returned in ascending order.
///
/// Two regimes, chosen by a fixed rule so streams stay reproducible:
/// rejection into a hash set while `2k <= n` (expected < 2 draws per index),
/// otherwise a partial Fisher-Yates shuffle of `0..n` consuming exactly `k`
/// draws. The hash set is only ever tested for membership, never iterated,
/// so platform hash order cannot leak into results.
pub fn sample_distinct(n: usize, k: usize, rng: &mut RandomSource) -> Vec<usize> {
    let mut picked = Vec::with_capacity(k);
    sample_distinct_into(n, k, rng, &mut picked);
    picked
}

/// [`sample_distinct`] into a caller-owned buffer, for hot loops that draw
/// many flip sets. The buffer is cleared first; the stream consumed is
/// identical to `sample_distinct`.
pub fn sample_distinct_into(n: usize, k: usize, rng: &mut RandomSource, out: &mut Vec<usize>) {
    assert!(k <= n, "cannot sample {k} distinct indices from 0..{n}");
    out.clear();
    if k == 0 {
        return;
    }
    if 2 * k <= n {
        let mut seen = HashSet::with_capacity(k * 2);
        while out.len() < k {
            let v = rng.next_below(n as u64) as usize;
            if seen.insert(v) {
                out.push(v);
            }
        }
    } else {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + rng.next_below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        out.extend_from_slice(&pool[..k]);
    }
    out.sort_unstable();
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::{RngCore, SeedableRng};

    #[test]
    fn stream_matches_reference_xoshiro() {
        // rand_xoshiro seeds Xoshiro256** from a u64 through the same
        // SplitMix64 expansion, so the two streams must agree bit for bit.
        for seed in [0u64, 1, 42, u64::MAX, 0xDEAD_BEEF] {
            let mut ours = RandomSource::from_seed(seed);
            let mut reference = rand_xoshiro::Xoshiro256StarStar::seed_from_u64(seed);
            for _ in 0..64 {
                assert_eq!(ours.next_u64(), reference.next_u64());
            }
        }
    }

    #[test]
    fn mix_matches_reference_splitmix() {
        for x in [0u64, 1, 7, 0x1234_5678_9ABC_DEF0, u64::MAX] {
            let mut reference = rand_xoshiro::SplitMix64::seed_from_u64(x);
            assert_eq!(mix(x), reference.next_u64());
        }
    }

    #[test]
    fn splitmix_known_answer() {
        // First outputs of the SplitMix64 stream for seed 0, from the
        // reference implementation.
        assert_eq!(mix(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::from_seed(99);
        let mut b = RandomSource::from_seed(99);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = RandomSource::from_seed(0);
        let mut b = RandomSource::from_seed(1);
        let equal = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(equal < 4);
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut rng = RandomSource::from_seed(7);
        let mut min = 1.0f64;
        let mut max = 0.0f64;
        for _ in 0..100_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
            min = min.min(u);
            max = max.max(u);
        }
        assert!(min < 0.01 && max > 0.99);
    }

    #[test]
    fn next_below_is_in_range_and_roughly_uniform() {
        let mut rng = RandomSource::from_seed(11);
        let mut counts = [0u32; 10];
        for _ in 0..100_000 {
            counts[rng.next_below(10) as usize] += 1;
        }
        for &c in &counts {
            assert!((9_300..10_700).contains(&c), "bucket count {c}");
        }
    }

    #[test]
    #[should_panic(expected = "positive bound")]
    fn next_below_zero_rejected() {
        RandomSource::from_seed(0).next_below(0);
    }

    #[test]
    fn derive_seed_separates_coordinates() {
        let mut seen = HashSet::new();
        for a in 0..8u64 {
            for b in 0..8u64 {
                for c in 0..8u64 {
                    assert!(seen.insert(derive_seed(123, &[a, b, c])));
                }
            }
        }
    }

    #[test]
    fn binomial_degenerate_cases() {
        let mut rng = RandomSource::from_seed(3);
        assert_eq!(sample_binomial(100, 0.0, &mut rng), 0);
        assert_eq!(sample_binomial(100, 1.0, &mut rng), 100);
        assert_eq!(sample_binomial(0, 0.5, &mut rng), 0);
        // None of the above consumed randomness.
        let mut fresh = RandomSource::from_seed(3);
        assert_eq!(rng.next_u64(), fresh.next_u64());
    }

    #[test]
    #[should_panic(expected = "outside [0,1]")]
    fn binomial_bad_probability_rejected() {
        sample_binomial(10, 1.5, &mut RandomSource::from_seed(0));
    }

    #[test]
    fn binomial_moments_small_np() {
        let mut rng = RandomSource::from_seed(2024);
        let n = 100u64;
        let p = 0.05;
        let draws = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..draws {
            let x = sample_binomial(n, p, &mut rng) as f64;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / draws as f64;
        let var = sum_sq / draws as f64 - mean * mean;
        assert!((4.8..=5.2).contains(&mean), "mean {mean}");
        assert!((4.4..=5.1).contains(&var), "variance {var}");
    }

    #[test]
    fn binomial_moments_log_space_branch() {
        // n*p = 200 exercises the log-space recurrence.
        let mut rng = RandomSource::from_seed(55);
        let n = 1000u64;
        let p = 0.2;
        let draws = 40_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..draws {
            let x = sample_binomial(n, p, &mut rng) as f64;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / draws as f64;
        let var = sum_sq / draws as f64 - mean * mean;
        assert!((199.0..=201.0).contains(&mean), "mean {mean}");
        assert!((152.0..=168.0).contains(&var), "variance {var} vs 160");
    }

    #[test]
    fn binomial_consumes_one_real() {
        let mut a = RandomSource::from_seed(17);
        let mut b = RandomSource::from_seed(17);
        let _ = sample_binomial(50, 0.3, &mut a);
        let _ = b.next_f64();
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn distinct_sample_is_sorted_distinct_in_range() {
        let mut rng = RandomSource::from_seed(5);
        for (n, k) in [(10, 3), (10, 9), (10, 10), (1000, 20), (64, 40)] {
            let s = sample_distinct(n, k, &mut rng);
            assert_eq!(s.len(), k);
            assert!(s.windows(2).all(|w| w[0] < w[1]), "sorted distinct");
            assert!(s.iter().all(|&v| v < n));
        }
        assert!(sample_distinct(5, 0, &mut rng).is_empty());
    }

    #[test]
    fn distinct_sample_covers_all_pairs() {
        let mut rng = RandomSource::from_seed(8);
        let mut seen = HashSet::new();
        for _ in 0..2000 {
            let s = sample_distinct(5, 2, &mut rng);
            seen.insert((s[0], s[1]));
        }
        assert_eq!(seen.len(), 10);
    }

    #[test]
    #[should_panic(expected = "distinct indices")]
    fn distinct_sample_oversize_rejected() {
        sample_distinct(3, 4, &mut RandomSource::from_seed(0));
    }
}
