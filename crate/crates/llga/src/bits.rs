//! Packed bit strings.
//!
//! Candidate solutions are fixed-length bit strings over 64-bit words.
//! Bit `i` lives in word `i / 64` at position `i % 64`; bits past the logical
//! length are kept zero so popcount-based operations need no masking.

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    n: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut b = BitString::zeros(n);
        for w in &mut b.words {
            *w = u64::MAX;
        }
        b.mask_top();
        b
    }

    /// Uniform random bit string of positive length. Word `j` is filled from
    /// the `j`-th `next_u64` draw, then trailing bits are masked off.
    pub fn uniform(n: usize, rng: &mut RandomSource) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "bit string length must be positive".into(),
            ));
        }
        let mut b = BitString::zeros(n);
        for w in &mut b.words {
            *w = rng.next_u64();
        }
        b.mask_top();
        Ok(b)
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty bit string".into()));
        }
        let mut b = BitString::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => b.set(i, true),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "bit string may contain only 0 and 1, found {other:?}"
                    )))
                }
            }
        }
        Ok(b)
    }

    fn mask_top(&mut self) {
        let tail = self.n % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.n, "bit index {i} out of range for length {}", self.n);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.n, "bit index {i} out of range for length {}", self.n);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.n, "bit index {i} out of range for length {}", self.n);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn flip_all(&mut self, positions: &[usize]) {
        for &i in positions {
            self.flip(i);
        }
    }

    pub fn with_flips(&self, positions: &[usize]) -> Self {
        let mut out = self.clone();
        out.flip_all(positions);
        out
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming distance. Both strings must have the same length.
    pub fn hamming_distance(&self, other: &BitString) -> usize {
        assert_eq!(
            self.n, other.n,
            "hamming distance requires equal lengths ({} vs {})",
            self.n, other.n
        );
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
