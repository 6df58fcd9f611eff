//! Empirical offspring-separation checker.
//!
//! For a parent `x` at distance `d` from the planted assignment and a flip
//! count `ℓ`, split the exactly-ℓ-bit offspring into the bad set X⁻ (all
//! flipped bits coincide with planted) and the good set X⁺ (at least one
//! flipped bit differs). An instance is well behaved at `x` for population
//! cap λ̄ when, for every ℓ ∈ [1..λ̄], with T = f_avg(d) − f_avg(d+ℓ−1):
//!
//! - (i) at most |X⁻|/λ̄ bad offspring have f(x) − f(x⁻) ≤ T, and
//! - (ii) at most |X⁺|/2 good offspring have f(x) − f(x⁺) ≥ T.
//!
//! Small sets are enumerated exhaustively and the verdict is exact integer
//! arithmetic; large sets are sampled uniformly and the verdict comes with a
//! Wilson confidence radius.

use crate::analysis::{avg_fitness_exact, Exact};
use crate::bits::BitString;
use crate::combinatorics::{binomial_saturating, for_each_combination};
use crate::error::{Error, Result};
use crate::problems::{PlantedInstance, Problem};
use crate::rng::{sample_distinct, RandomSource};
use std::io::Write;

/// Largest offspring set that is enumerated exhaustively.
pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000;
/// Uniform samples per offspring set beyond the enumeration cap.
pub const DEFAULT_SAMPLE_COUNT: u64 = 10_000;
/// Width of the reported Wilson interval, in standard normal quantiles.
const WILSON_Z: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffspringKind {
    /// Flips only positions where `x` coincides with planted.
    Bad,
    /// Flips at least one position where `x` differs from planted.
    Good,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy)]
pub struct OffspringSummary {
    pub mode: EstimationMode,
    /// Exact cardinality of the set, clamped to `u128::MAX`.
    pub set_size: u128,
    /// Number of offspring passed to the visitor.
    pub visited: u64,
}

/// Visits the requested offspring set of `x`: exhaustively (each member once,
/// ascending flip sets) when its cardinality is at most `cap`, otherwise
/// `samples` i.i.d. uniform members. Returns `None` when the set is empty.
/// Flip sets passed to `visit` are always sorted ascending.
// All eight parameters are independent knobs of the estimator; bundling them
// into a one-off struct would only rename the problem.
#[allow(clippy::too_many_arguments)]
pub fn enumerate_or_sample_offspring(
    x: &BitString,
    planted: &BitString,
    ell: usize,
    kind: OffspringKind,
    cap: u128,
    samples: u64,
    rng: &mut RandomSource,
    mut visit: impl FnMut(&[usize]),
) -> Result<Option<OffspringSummary>> {
    let n = x.len();
    assert_eq!(n, planted.len(), "dimension mismatch");
    if ell == 0 {
        return Err(Error::InvalidParameter(
            "offspring sets are defined for ell >= 1".into(),
        ));
    }
    if ell > n {
        return Ok(None);
    }
    let mut agreeing = Vec::new();
    let mut disagreeing = Vec::new();
    for i in 0..n {
        if x.get(i) == planted.get(i) {
            agreeing.push(i);
        } else {
            disagreeing.push(i);
        }
    }
    let d = disagreeing.len();
    let bad_size = binomial_saturating((n - d) as u64, ell as u64);
    let set_size = match kind {
        OffspringKind::Bad => bad_size,
        OffspringKind::Good => {
            binomial_saturating(n as u64, ell as u64).saturating_sub(bad_size)
        }
    };
    if set_size == 0 {
        return Ok(None);
    }

    if set_size <= cap {
        match kind {
            OffspringKind::Bad => for_each_combination(&agreeing, ell, |c| visit(c)),
            OffspringKind::Good => {
                let mut merged = vec![0usize; ell];
                let visit = &mut visit;
                for j in 1..=ell.min(d) {
                    for_each_combination(&disagreeing, j, |dc| {
                        for_each_combination(&agreeing, ell - j, |ac| {
                            merge_sorted(dc, ac, &mut merged);
                            visit(&merged);
                        });
                    });
                }
            }
        }
        Ok(Some(OffspringSummary {
            mode: EstimationMode::Exact,
            set_size,
            visited: set_size as u64,
        }))
    } else {
        match kind {
            OffspringKind::Bad => {
                let mut buf = vec![0usize; ell];
                for _ in 0..samples {
                    let picks = sample_distinct(agreeing.len(), ell, rng);
                    for (slot, &i) in buf.iter_mut().zip(&picks) {
                        *slot = agreeing[i];
                    }
                    visit(&buf);
                }
            }
            OffspringKind::Good => {
                // Rejection from uniform ell-subsets of all positions; a
                // subset is good as soon as one flip hits a disagreement.
                for _ in 0..samples {
                    loop {
                        let picks = sample_distinct(n, ell, rng);
                        if picks.iter().any(|&p| x.get(p) != planted.get(p)) {
                            visit(&picks);
                            break;
                        }
                    }
                }
            }
        }
        Ok(Some(OffspringSummary {
            mode: EstimationMode::Sampled,
            set_size,
            visited: samples,
        }))
    }
}

fn merge_sorted(a: &[usize], b: &[usize], out: &mut [usize]) {
    debug_assert_eq!(a.len() + b.len(), out.len());
    let (mut i, mut j) = (0, 0);
    for slot in out.iter_mut() {
        let take_a = j == b.len() || (i < a.len() && a[i] < b[j]);
        if take_a {
            *slot = a[i];
            i += 1;
        } else {
            *slot = b[j];
            j += 1;
        }
    }
}

/// Violation statistics for one side (bad or good) at one ℓ.
#[derive(Debug, Clone, Copy)]
pub struct SideStats {
    pub mode: EstimationMode,
    pub set_size: u128,
    pub evaluated: u64,
    pub violations: u64,
    pub fraction: f64,
    /// Allowed violation fraction: 1/λ̄ for the bad side, 1/2 for the good.
    pub bound: f64,
    /// Wilson half-width at z = 3 in sampled mode, 0 in exact mode.
    pub ci_radius: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllVerdict {
    Pass,
    Fail,
    /// Neither side had any offspring to check.
    Skip,
}

#[derive(Debug, Clone)]
pub struct WellBehavedRow {
    pub ell: usize,
    pub bad: Option<SideStats>,
    pub good: Option<SideStats>,
    pub verdict: EllVerdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct WellBehavedReport {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub lambda_cap: u32,
    pub rows: Vec<WellBehavedRow>,
}

impl WellBehavedReport {
    /// True when no ℓ produced a failing verdict (skips do not fail).
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != EllVerdict::Fail)
    }

    /// One CSV row per ℓ. Missing sides serialize as `nan` fractions; the
    /// `samples` column counts offspring evaluated across both sides and
    /// `ci_radius` is the widest of the two intervals.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "n,m,d,ell,mode,bad_frac,bad_bound,good_frac,good_bound,verdict,samples,ci_radius"
        )?;
        for row in &self.rows {
            let mode = match (&row.bad, &row.good) {
                (None, None) => "empty",
                (Some(b), None) => mode_name(b.mode),
                (None, Some(g)) => mode_name(g.mode),
                (Some(b), Some(g)) if b.mode == g.mode => mode_name(b.mode),
                _ => "mixed",
            };
            let verdict = match row.verdict {
                EllVerdict::Pass => "pass",
                EllVerdict::Fail => "fail",
                EllVerdict::Skip => "skip",
            };
            let frac = |s: &Option<SideStats>| match s {
                Some(s) => s.fraction.to_string(),
                None => "nan".to_string(),
            };
            let bound = |s: &Option<SideStats>| match s {
                Some(s) => s.bound.to_string(),
                None => "nan".to_string(),
            };
            let samples: u64 = row.bad.map_or(0, |s| s.evaluated)
                + row.good.map_or(0, |s| s.evaluated);
            let radius = row
                .bad
                .iter()
                .chain(row.good.iter())
                .map(|s| s.ci_radius)
                .fold(0.0f64, f64::max);
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                self.n,
                self.m,
                self.d,
                row.ell,
                mode,
                frac(&row.bad),
                bound(&row.bad),
                frac(&row.good),
                bound(&row.good),
                verdict,
                samples,
                radius
            )?;
        }
        Ok(())
    }
}

fn mode_name(m: EstimationMode) -> &'static str {
    match m {
        EstimationMode::Exact => "exact",
        EstimationMode::Sampled => "sampled",
    }
}

fn wilson_radius(successes: u64, trials: u64, z: f64) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
}

/// Checks the separation conditions for every ℓ ∈ [1..λ̄] at parent `x`.
/// Offspring fitness is computed incrementally from the parent's fitness.
/// Requires 1 ≤ d(x) < n.
pub fn check_well_behaved(
    instance: &PlantedInstance,
    x: &BitString,
    lambda_cap: u32,
    cap: u128,
    samples: u64,
    rng: &mut RandomSource,
) -> Result<WellBehavedReport> {
    let n = instance.n();
    let m = instance.m();
    let d = x.hamming_distance(instance.planted());
    if d == 0 || d >= n {
        return Err(Error::InvalidParameter(format!(
            "checker requires 1 <= d(x) < n, got d = {d}"
        )));
    }
    if lambda_cap == 0 {
        return Err(Error::InvalidParameter("lambda cap must be >= 1".into()));
    }
    let fx = instance.evaluate(x);
    let mut rows = Vec::with_capacity(lambda_cap as usize);
    for ell in 1..=lambda_cap as usize {
        // Threshold T = f_avg(d) − f_avg(d+ℓ−1). Distances past n are clamped
        // to n: the coincidence term of P is zero there anyway.
        let far = (d + ell - 1).min(n);
        let threshold = avg_fitness_exact(n, m, d)? - avg_fitness_exact(n, m, far)?;

        let mut eval_side = |kind: OffspringKind| -> Result<Option<SideStats>> {
            let mut violations = 0u64;
            let summary = enumerate_or_sample_offspring(
                x,
                instance.planted(),
                ell,
                kind,
                cap,
                samples,
                rng,
                |flips| {
                    let fy = instance.evaluate_delta(x, fx, flips);
                    let improvement = fx as i64 - fy as i64;
                    let violated = match kind {
                        // (i): f(x) − f(x⁻) ≤ T
                        OffspringKind::Bad => {
                            improvement < 0
                                || Exact::from_integer(improvement as u128) <= threshold
                        }
                        // (ii): f(x) − f(x⁺) ≥ T
                        OffspringKind::Good => {
                            improvement >= 0
                                && Exact::from_integer(improvement as u128) >= threshold
                        }
                    };
                    if violated {
                        violations += 1;
                    }
                },
            )?;
            Ok(summary.map(|s| {
                let fraction = violations as f64 / s.visited as f64;
                let (bound_num, bound_den) = match kind {
                    OffspringKind::Bad => (1.0, lambda_cap as f64),
                    OffspringKind::Good => (1.0, 2.0),
                };
                let bound = bound_num / bound_den;
                let (pass, ci_radius) = match s.mode {
                    // Exact verdicts avoid float division entirely.
                    EstimationMode::Exact => {
                        let scaled = violations as u128
                            * match kind {
                                OffspringKind::Bad => lambda_cap as u128,
                                OffspringKind::Good => 2,
                            };
                        (scaled <= s.set_size, 0.0)
                    }
                    EstimationMode::Sampled => (
                        fraction <= bound,
                        wilson_radius(violations, s.visited, WILSON_Z),
                    ),
                };
                SideStats {
                    mode: s.mode,
                    set_size: s.set_size,
                    evaluated: s.visited,
                    violations,
                    fraction,
                    bound,
                    ci_radius,
                    pass,
                }
            }))
        };

        let bad = eval_side(OffspringKind::Bad)?;
        let good = eval_side(OffspringKind::Good)?;
        let verdict = match (&bad, &good) {
            (None, None) => EllVerdict::Skip,
            _ => {
                let ok = bad.is_none_or(|s| s.pass) && good.is_none_or(|s| s.pass);
                if ok {
                    EllVerdict::Pass
                } else {
                    EllVerdict::Fail
                }
            }
        };
        let note = match (&bad, &good) {
            (None, None) => Some(format!("no offspring at distance {ell}")),
            (None, _) => Some(format!("bad set empty: {ell} > n - d = {}", n - d)),
            _ => None,
        };
        rows.push(WellBehavedRow {
            ell,
            bad,
            good,
            verdict,
            note,
        });
    }
    Ok(WellBehavedReport {
        n,
        m,
        d,
        lambda_cap,
        rows,
    })
}
