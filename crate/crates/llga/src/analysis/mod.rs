//! Analytical fitness models for planted 3-CNF instances.
//!
//! For a uniform random clause satisfied by the planted assignment, the
//! probability that an assignment at Hamming distance `d` from planted also
//! satisfies it is
//!
//! ```text
//! P(n, d) = (6·C(n,3) + C(n−d,3)) / (7·C(n,3))
//! ```
//!
//! (of the 7·C(n,3) satisfying clauses, those whose variables all fall in the
//! n−d coinciding positions are always satisfied; the rest behave like fresh
//! uniform clauses, 6 of 7 patterns satisfied). All quantities here are kept
//! as exact rationals; `f64` projections are provided for reporting.

mod well_behaved;

pub use well_behaved::{
    check_well_behaved, enumerate_or_sample_offspring, EllVerdict, EstimationMode,
    OffspringKind, OffspringSummary, SideStats, WellBehavedReport, DEFAULT_ENUMERATION_CAP,
    DEFAULT_SAMPLE_COUNT,
};

use crate::combinatorics::binomial_coefficient;
use crate::error::{Error, Result};
use num_rational::Ratio;

/// Exact rational over unsigned 128-bit integers. All analytical quantities
/// in this module are non-negative, so unsigned arithmetic suffices.
pub type Exact = Ratio<u128>;

pub fn exact_to_f64(r: &Exact) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_range(n: usize, d: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "satisfaction probability needs n >= 3, got {n}"
        )));
    }
    if d > n {
        return Err(Error::InvalidParameter(format!(
            "distance {d} outside 0..={n}"
        )));
    }
    Ok(())
}

/// P(n, d): probability that an assignment at distance `d` from planted
/// satisfies a uniform random planted-satisfying clause. Exact.
pub fn sat_probability(n: usize, d: usize) -> Result<Exact> {
    check_range(n, d)?;
    let total = binomial_coefficient(n as u64, 3);
    let coinciding = binomial_coefficient((n - d) as u64, 3);
    Ok(Exact::new(6 * total + coinciding, 7 * total))
}

pub fn sat_probability_f64(n: usize, d: usize) -> Result<f64> {
    Ok(exact_to_f64(&sat_probability(n, d)?))
}

/// f_avg(d) = m · P(n, d): expected fitness at distance `d`, exact.
pub fn avg_fitness_exact(n: usize, m: usize, d: usize) -> Result<Exact> {
    Ok(sat_probability(n, d)? * Exact::from_integer(m as u128))
}

pub fn avg_fitness(n: usize, m: usize, d: usize) -> Result<f64> {
    Ok(exact_to_f64(&avg_fitness_exact(n, m, d)?))
}

/// f_avg(d) − f_avg(d+ℓ), exact. Non-negative because P(n, d) is
/// non-increasing in d. Requires d + ℓ ≤ n.
pub fn avg_fitness_gap_exact(n: usize, m: usize, d: usize, ell: usize) -> Result<Exact> {
    let far = d.checked_add(ell).ok_or_else(|| {
        Error::InvalidParameter("distance overflow in fitness gap".into())
    })?;
    if far > n {
        return Err(Error::InvalidParameter(format!(
            "fitness gap needs d + ell <= n, got {d} + {ell} > {n}"
        )));
    }
    Ok(avg_fitness_exact(n, m, d)? - avg_fitness_exact(n, m, far)?)
}

pub fn avg_fitness_gap(n: usize, m: usize, d: usize, ell: usize) -> Result<f64> {
    Ok(exact_to_f64(&avg_fitness_gap_exact(n, m, d, ell)?))
}

/// The exact fitness model for one instance shape.
#[derive(Debug, Clone, Copy)]
pub struct AvgFitnessModel {
    pub n: usize,
    pub m: usize,
}

impl AvgFitnessModel {
    pub fn new(n: usize, m: usize) -> Self {
        AvgFitnessModel { n, m }
    }

    pub fn sat_probability(&self, d: usize) -> Result<Exact> {
        sat_probability(self.n, d)
    }

    pub fn avg_fitness(&self, d: usize) -> Result<f64> {
        avg_fitness(self.n, self.m, d)
    }

    pub fn avg_fitness_gap(&self, d: usize, ell: usize) -> Result<f64> {
        avg_fitness_gap(self.n, self.m, d, ell)
    }
}

/// Heuristic population cap for the self-adjusting GA on planted instances:
/// `max(1, min(⌊(m/n)^(1/4)⌋, ⌈2·ln(n+1)⌉))`. The fourth root keeps the cap
/// inside the density-dependent safe region, the logarithmic term matches the
/// cap that works well on OneMax. A starting point, not a guarantee.
pub fn recommended_cap(n: usize, m: usize) -> Result<u32> {
    if n < 3 || m < n {
        return Err(Error::InvalidParameter(format!(
            "recommended_cap needs m >= n >= 3, got n={n}, m={m}"
        )));
    }
    let density_limit = (m as f64 / n as f64).powf(0.25).floor() as u32;
    let log_limit = (2.0 * ((n + 1) as f64).ln()).ceil() as u32;
    Ok(density_limit.min(log_limit).max(1))
}
