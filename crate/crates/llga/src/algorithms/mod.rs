//! The three optimizers: the (1+(λ,λ)) GA with fixed λ, the self-adjusting
//! variant with population cap λ̄, and the (1+1) EA baseline.
//!
//! One GA iteration with current (real-valued) λ and λ′ = [λ] rounded:
//! draw ℓ ~ B(n, λ/n) once, create λ′ mutants of the parent each flipping
//! exactly ℓ fresh uniformly chosen bits, pick a mutation winner uniformly
//! among the fittest mutants, create λ′ biased crossovers of parent and
//! winner taking the winner's value per position with probability c = 1/λ,
//! pick a crossover winner the same way, and accept it when its fitness is
//! at least the parent's. The iteration costs exactly 2λ′ evaluations.
//!
//! The self-adjusting variant then moves λ on a multiplicative schedule
//! (one-fifth-rule flavored): improvement divides λ by F, stagnation or
//! regress multiplies it by F^(1/(U−1)) with U = 5, always clamped to
//! [1, λ̄].

mod engine;

pub use engine::{
    ga_iteration, run_adaptive, run_fixed, run_ga, run_opo_ea, RunRecord, RunState, TraceRecord,
};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng::{sample_distinct, RandomSource};

/// Default update strength F for the self-adjusting schedule.
pub const DEFAULT_UPDATE_STRENGTH: f64 = 1.5;
/// The "one-U-th" success rule constant; U = 5 gives the one-fifth rule.
pub const SUCCESS_RULE_U: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaMode {
    Fixed,
    Adaptive,
}

/// How one GA iteration ended relative to the parent's fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationOutcome {
    Improved,
    Equal,
    Worse,
}

/// Parameters of a GA run. `lambda` is the fixed population size in fixed
/// mode and the initial λ in adaptive mode.
#[derive(Debug, Clone, Copy)]
pub struct GaParams {
    pub mode: GaMode,
    pub lambda: f64,
    pub lambda_cap: f64,
    pub update_strength: f64,
    pub success_rule: u32,
    pub budget: u64,
}

impl GaParams {
    pub fn fixed(lambda: u64, budget: u64) -> Self {
        GaParams {
            mode: GaMode::Fixed,
            lambda: lambda as f64,
            lambda_cap: lambda as f64,
            update_strength: DEFAULT_UPDATE_STRENGTH,
            success_rule: SUCCESS_RULE_U,
            budget,
        }
    }

    /// Adaptive run starting at λ = 1 (the paperless default: early progress
    /// is cheap, so start small and let the schedule grow λ).
    pub fn adaptive(lambda_cap: f64, update_strength: f64, budget: u64) -> Self {
        GaParams {
            mode: GaMode::Adaptive,
            lambda: 1.0,
            lambda_cap,
            update_strength,
            success_rule: SUCCESS_RULE_U,
            budget,
        }
    }

    pub fn with_initial_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// Validates against a problem dimension. λ values above n would give a
    /// mutation rate above 1.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidParameter("budget must be positive".into()));
        }
        if !(self.lambda >= 1.0 && self.lambda <= self.lambda_cap) {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= lambda <= lambda_cap, got lambda = {}, cap = {}",
                self.lambda, self.lambda_cap
            )));
        }
        if self.lambda_cap > n as f64 {
            return Err(Error::InvalidParameter(format!(
                "lambda cap {} exceeds dimension {n}",
                self.lambda_cap
            )));
        }
        if self.mode == GaMode::Adaptive
            && !(self.update_strength > 1.0 && self.update_strength < 2.0)
        {
            return Err(Error::InvalidParameter(format!(
                "update strength must lie in (1,2), got {}",
                self.update_strength
            )));
        }
        if self.mode == GaMode::Fixed && self.lambda.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "fixed mode needs an integer lambda, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Nearest integer with ties rounded toward +∞: [2.4] = 2, [2.5] = 3.
pub fn round_half_up(lambda: f64) -> u64 {
    debug_assert!(lambda >= 1.0);
    (lambda + 0.5).floor() as u64
}

/// Flips exactly `ell` distinct uniformly chosen bits. The flip set is
/// uniform among the C(n, ell) possibilities.
pub fn mutate(x: &BitString, ell: usize, rng: &mut RandomSource) -> BitString {
    let flips = sample_distinct(x.len(), ell, rng);
    x.with_flips(&flips)
}

/// Biased uniform crossover: per position take `b`'s value with probability
/// `c`, else `a`'s. Positions where the parents agree need no randomness and
/// consume none; one uniform real is drawn per disagreeing position in
/// ascending order, which leaves the distribution unchanged.
pub fn crossover(a: &BitString, b: &BitString, c: f64, rng: &mut RandomSource) -> BitString {
    assert_eq!(a.len(), b.len(), "crossover requires equal lengths");
    assert!((0.0..=1.0).contains(&c), "crossover bias {c} outside [0,1]");
    let mut y = a.clone();
    for i in 0..a.len() {
        if a.get(i) != b.get(i) && rng.next_f64() < c {
            y.set(i, b.get(i));
        }
    }
    y
}

/// One step of the multiplicative λ schedule, clamped to [1, λ̄].
pub fn lambda_update(
    lambda: f64,
    outcome: IterationOutcome,
    update_strength: f64,
    success_rule: u32,
    lambda_cap: f64,
) -> f64 {
    match outcome {
        IterationOutcome::Improved => (lambda / update_strength).max(1.0),
        IterationOutcome::Equal | IterationOutcome::Worse => {
            let growth = update_strength.powf(1.0 / (success_rule - 1) as f64);
            (lambda * growth).min(lambda_cap)
        }
    }
}
