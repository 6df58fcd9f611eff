//! Shared helpers for the integration suites: an independent brute-force
//! oracle for the clause-satisfaction probability, chi-square machinery,
//! and small order-statistic utilities.

#![allow(dead_code)]

use llga::combinatorics::for_each_combination;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Satisfaction probability by direct enumeration: walk every variable
/// triple and every sign pattern the all-ones assignment satisfies, and
/// count clauses satisfied by the assignment whose first `d` bits are zero.
/// Returns (satisfied, total) unreduced.
pub fn brute_force_sat_counts(n: usize, d: usize) -> (u128, u128) {
    assert!(n >= 3 && d <= n);
    let pool: Vec<usize> = (0..n).collect();
    let mut satisfied: u128 = 0;
    let mut total: u128 = 0;
    for_each_combination(&pool, 3, |vars: &[usize]| {
        for pattern in 0u32..8 {
            let signs = [pattern & 4 != 0, pattern & 2 != 0, pattern & 1 != 0];
            // The planted assignment (all ones) needs a positive literal.
            if !signs.iter().any(|&s| s) {
                continue;
            }
            total += 1;
            // Bit v of the probe assignment is 0 exactly when v < d, so a
            // literal holds when its sign matches that.
            let holds = vars
                .iter()
                .zip(signs)
                .any(|(&v, s)| if v < d { !s } else { s });
            if holds {
                satisfied += 1;
            }
        }
    });
    (satisfied, total)
}

/// Pearson chi-square statistic for observed counts against uniform
/// expectation.
pub fn chi_square_uniform(observed: &[u64], draws: u64) -> f64 {
    let expected = draws as f64 / observed.len() as f64;
    observed
        .iter()
        .map(|&o| {
            let diff = o as f64 - expected;
            diff * diff / expected
        })
        .sum()
}

/// Pearson statistic against arbitrary expected counts, merging adjacent
/// bins from the tails until every expected count is at least 5. Returns
/// (statistic, surviving bin count).
pub fn chi_square_merged(observed: &[u64], expected: &[f64]) -> (f64, usize) {
    assert_eq!(observed.len(), expected.len());
    let mut obs: Vec<f64> = observed.iter().map(|&o| o as f64).collect();
    let mut exp = expected.to_vec();
    // Merge forward from the left tail.
    let mut merged_obs = Vec::new();
    let mut merged_exp = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (o, e) in obs.drain(..).zip(exp.drain(..)) {
        acc_o += o;
        acc_e += e;
        if acc_e >= 5.0 {
            merged_obs.push(acc_o);
            merged_exp.push(acc_e);
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    // Whatever remains folds into the last surviving bin.
    if acc_e > 0.0 {
        if let (Some(o), Some(e)) = (merged_obs.last_mut(), merged_exp.last_mut()) {
            *o += acc_o;
            *e += acc_e;
        } else {
            merged_obs.push(acc_o);
            merged_exp.push(acc_e);
        }
    }
    let stat = merged_obs
        .iter()
        .zip(&merged_exp)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    (stat, merged_obs.len())
}

/// Upper critical value of the chi-square distribution.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .unwrap()
        .inverse_cdf(1.0 - alpha)
}

/// Lower median (index ⌊(k−1)/2⌋ of the sorted values).
pub fn lower_median_u64(values: &[u64]) -> u64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

pub fn lower_median_f64(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, var)
}
