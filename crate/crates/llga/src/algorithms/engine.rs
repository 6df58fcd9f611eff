//! Run engines and iteration mechanics.
//!
//! Offspring are represented as flip sets relative to the current parent and
//! evaluated through `evaluate_delta`; no candidate bit string is ever
//! materialized. Randomness is consumed in a fixed order per GA iteration:
//! the ℓ draw, then λ′ mutant flip sets, one winner tie-break draw only when
//! several mutants share the best fitness, then per crossover offspring one
//! uniform real per winner flip position in ascending order, then one
//! tie-break draw only on a crossover tie. This order is part of the
//! reproducibility contract.

use crate::algorithms::{
    lambda_update, round_half_up, GaMode, GaParams, IterationOutcome,
};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::rng::{sample_binomial, sample_distinct_into, RandomSource};

/// One trace row, captured at the start of an iteration before any work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// 1-based iteration number about to execute.
    pub iteration: u64,
    /// Evaluations consumed so far (includes the initial parent evaluation).
    pub evaluations: u64,
    /// Hamming distance from the parent to the reference optimum.
    pub distance: u64,
    /// Real-valued λ in use for this iteration (1.0 for the (1+1) EA).
    pub lambda: f64,
}

/// Mutable state of a running optimizer.
#[derive(Debug, Clone)]
pub struct RunState {
    pub x: BitString,
    pub fitness: u64,
    pub evaluations: u64,
    pub iterations: u64,
    pub lambda: f64,
    pub max_lambda_seen: f64,
    pub trace: Vec<TraceRecord>,
}

impl RunState {
    /// Fresh state with a uniform random parent; counts the initial
    /// evaluation.
    pub fn init(problem: &impl Problem, lambda: f64, rng: &mut RandomSource) -> Result<Self> {
        let x = BitString::uniform(problem.dimension(), rng)?;
        Ok(Self::with_parent(problem, x, lambda))
    }

    /// State starting from a given parent; counts the initial evaluation.
    pub fn with_parent(problem: &impl Problem, x: BitString, lambda: f64) -> Self {
        let fitness = problem.evaluate(&x);
        RunState {
            x,
            fitness,
            evaluations: 1,
            iterations: 0,
            lambda,
            max_lambda_seen: lambda,
            trace: Vec::new(),
        }
    }
}

/// Outcome of a finished run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// True when max fitness was reached; false means the budget was
    /// exhausted (censored), never silently dropped.
    pub success: bool,
    pub evaluations: u64,
    pub iterations: u64,
    /// Largest λ in effect during any iteration (the fixed λ in fixed mode,
    /// 1 for the (1+1) EA).
    pub max_lambda: f64,
    pub final_fitness: u64,
    pub trace: Vec<TraceRecord>,
}

#[derive(Default)]
struct Scratch {
    mutant_flips: Vec<Vec<usize>>,
    mutant_fitness: Vec<u64>,
    offspring_flips: Vec<Vec<usize>>,
    offspring_fitness: Vec<u64>,
}

impl Scratch {
    fn resize(&mut self, lambda_rounded: usize) {
        self.mutant_flips.resize_with(lambda_rounded, Vec::new);
        self.mutant_fitness.resize(lambda_rounded, 0);
        self.offspring_flips.resize_with(lambda_rounded, Vec::new);
        self.offspring_fitness.resize(lambda_rounded, 0);
    }
}

/// Index of the best entry, uniform among ties. Consumes one bounded draw
/// only when the maximum is shared.
fn select_uniform_argmax(fitness: &[u64], rng: &mut RandomSource) -> usize {
    debug_assert!(!fitness.is_empty());
    let best = *fitness.iter().max().unwrap();
    let count = fitness.iter().filter(|&&f| f == best).count();
    let mut pick = if count > 1 {
        rng.next_below(count as u64) as usize
    } else {
        0
    };
    for (i, &f) in fitness.iter().enumerate() {
        if f == best {
            if pick == 0 {
                return i;
            }
            pick -= 1;
        }
    }
    unreachable!("argmax selection ran past the end");
}

/// One full GA iteration: mutation phase, crossover phase, selection, and
/// elitist acceptance f(y) ≥ f(x). Adds exactly 2·[λ] evaluations. λ itself
/// is not updated here; the adaptive schedule is the runner's job.
pub fn ga_iteration(
    state: &mut RunState,
    params: &GaParams,
    problem: &impl Problem,
    rng: &mut RandomSource,
) -> IterationOutcome {
    ga_iteration_with(state, params, problem, rng, &mut Scratch::default())
}

fn ga_iteration_with(
    state: &mut RunState,
    params: &GaParams,
    problem: &impl Problem,
    rng: &mut RandomSource,
    scratch: &mut Scratch,
) -> IterationOutcome {
    let n = problem.dimension();
    let lambda = state.lambda;
    debug_assert!(params.mode == GaMode::Adaptive || lambda == params.lambda);
    debug_assert!(lambda >= 1.0 && lambda <= params.lambda_cap);
    let lambda_rounded = round_half_up(lambda) as usize;
    let p = lambda / n as f64;
    let c = 1.0 / lambda;
    scratch.resize(lambda_rounded);

    // Phase 1: mutation. One shared ℓ; every mutant sits at distance exactly
    // ℓ from the parent.
    let ell = sample_binomial(n as u64, p, rng) as usize;
    for flips in scratch.mutant_flips.iter_mut() {
        sample_distinct_into(n, ell, rng, flips);
        debug_assert_eq!(flips.len(), ell);
    }
    for (fit, flips) in scratch
        .mutant_fitness
        .iter_mut()
        .zip(&scratch.mutant_flips)
    {
        *fit = problem.evaluate_delta(&state.x, state.fitness, flips);
    }
    state.evaluations += lambda_rounded as u64;
    let winner = select_uniform_argmax(&scratch.mutant_fitness, rng);
    let winner_flips = &scratch.mutant_flips[winner];

    // Phase 2: crossover with the mutation winner. Only positions where the
    // winner differs from the parent (its flip set) can change, so each
    // offspring is the subset of the winner's flips kept with probability c.
    for (fit, flips) in scratch
        .offspring_fitness
        .iter_mut()
        .zip(scratch.offspring_flips.iter_mut())
    {
        flips.clear();
        for &w in winner_flips {
            if rng.next_f64() < c {
                flips.push(w);
            }
        }
        *fit = problem.evaluate_delta(&state.x, state.fitness, flips);
    }
    state.evaluations += lambda_rounded as u64;
    let best = select_uniform_argmax(&scratch.offspring_fitness, rng);
    let best_fitness = scratch.offspring_fitness[best];

    state.iterations += 1;
    let outcome = match best_fitness.cmp(&state.fitness) {
        std::cmp::Ordering::Greater => IterationOutcome::Improved,
        std::cmp::Ordering::Equal => IterationOutcome::Equal,
        std::cmp::Ordering::Less => IterationOutcome::Worse,
    };
    if best_fitness >= state.fitness {
        state.x.flip_all(&scratch.offspring_flips[best]);
        state.fitness = best_fitness;
    }
    outcome
}

fn record_trace(
    state: &mut RunState,
    problem: &impl Problem,
    trace_every: Option<u64>,
) {
    if let Some(every) = trace_every {
        if state.iterations.is_multiple_of(every) {
            state.trace.push(TraceRecord {
                iteration: state.iterations + 1,
                evaluations: state.evaluations,
                distance: problem.distance_to_target(&state.x),
                lambda: state.lambda,
            });
        }
    }
}

fn validate_trace_every(trace_every: Option<u64>) -> Result<()> {
    if trace_every == Some(0) {
        return Err(Error::InvalidParameter(
            "trace decimation must be positive".into(),
        ));
    }
    Ok(())
}

/// Runs a GA configuration to the optimum or until the next iteration would
/// exceed the budget (the evaluation counter never passes it).
pub fn run_ga(
    problem: &impl Problem,
    params: GaParams,
    rng: &mut RandomSource,
    trace_every: Option<u64>,
) -> Result<RunRecord> {
    params.validate(problem.dimension())?;
    validate_trace_every(trace_every)?;
    let mut state = RunState::init(problem, params.lambda, rng)?;
    let mut scratch = Scratch::default();
    let max_fitness = problem.max_fitness();
    let success = loop {
        if state.fitness >= max_fitness {
            break true;
        }
        let cost = 2 * round_half_up(state.lambda);
        if state.evaluations + cost > params.budget {
            break false;
        }
        state.max_lambda_seen = state.max_lambda_seen.max(state.lambda);
        record_trace(&mut state, problem, trace_every);
        let outcome = ga_iteration_with(&mut state, &params, problem, rng, &mut scratch);
        if params.mode == GaMode::Adaptive {
            state.lambda = lambda_update(
                state.lambda,
                outcome,
                params.update_strength,
                params.success_rule,
                params.lambda_cap,
            );
        }
    };
    Ok(RunRecord {
        success,
        evaluations: state.evaluations,
        iterations: state.iterations,
        max_lambda: state.max_lambda_seen,
        final_fitness: state.fitness,
        trace: state.trace,
    })
}

/// Fixed-λ (1+(λ,λ)) GA.
pub fn run_fixed(
    problem: &impl Problem,
    lambda: u64,
    budget: u64,
    rng: &mut RandomSource,
    trace_every: Option<u64>,
) -> Result<RunRecord> {
    run_ga(problem, GaParams::fixed(lambda, budget), rng, trace_every)
}

/// Self-adjusting (1+(λ,λ)) GA with cap λ̄, starting at λ = 1.
pub fn run_adaptive(
    problem: &impl Problem,
    lambda_cap: f64,
    update_strength: f64,
    budget: u64,
    rng: &mut RandomSource,
    trace_every: Option<u64>,
) -> Result<RunRecord> {
    run_ga(
        problem,
        GaParams::adaptive(lambda_cap, update_strength, budget),
        rng,
        trace_every,
    )
}

/// (1+1) EA with standard bit mutation at rate 1/n. Flipping each bit
/// independently with probability 1/n is realized by drawing ℓ ~ B(n, 1/n)
/// and then a uniform ℓ-subset, which has the same distribution. One
/// evaluation per iteration; ℓ = 0 clones are kept and count too.
pub fn run_opo_ea(
    problem: &impl Problem,
    budget: u64,
    rng: &mut RandomSource,
    trace_every: Option<u64>,
) -> Result<RunRecord> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    validate_trace_every(trace_every)?;
    let n = problem.dimension();
    let mut state = RunState::init(problem, 1.0, rng)?;
    let max_fitness = problem.max_fitness();
    let p = 1.0 / n as f64;
    let mut flips = Vec::new();
    let success = loop {
        if state.fitness >= max_fitness {
            break true;
        }
        if state.evaluations + 1 > budget {
            break false;
        }
        record_trace(&mut state, problem, trace_every);
        let ell = sample_binomial(n as u64, p, rng) as usize;
        sample_distinct_into(n, ell, rng, &mut flips);
        let fitness = problem.evaluate_delta(&state.x, state.fitness, &flips);
        state.evaluations += 1;
        state.iterations += 1;
        if fitness >= state.fitness {
            state.x.flip_all(&flips);
            state.fitness = fitness;
        }
    };
    Ok(RunRecord {
        success,
        evaluations: state.evaluations,
        iterations: state.iterations,
        max_lambda: 1.0,
        final_fitness: state.fitness,
        trace: state.trace,
    })
}
