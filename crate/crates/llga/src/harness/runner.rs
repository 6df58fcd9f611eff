//! Cell execution and aggregation.
//!
//! Seed discipline: the per-run RNG seed is derived from (base_seed,
//! fnv1a(algorithm id), n, run_index) and the planted-instance seed from
//! (base_seed, INSTANCE_TAG, n, run_index). The instance seed deliberately
//! ignores the algorithm, so every algorithm in a cell faces the same
//! instance at the same run_index, which makes A-vs-B medians paired.

use std::time::Instant;

use rayon::prelude::*;

use crate::algorithms::{self, GaParams, DEFAULT_UPDATE_STRENGTH};
use crate::error::{Error, Result};
use crate::harness::stats::{iqr, lower_median};
use crate::harness::{AlgoSpec, BudgetRule, ExperimentConfig, MRule, ProblemKind};
use crate::problems::{OneMax, PlantedInstance, Problem};
use crate::rng::{derive_seed, RandomSource};

/// FNV-1a over the canonical algorithm label, giving a stable 64-bit tag
/// for seed derivation that no std hasher guarantees across versions.
const fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    let mut i = 0;
    while i < bytes.len() {
        hash ^= bytes[i] as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        i += 1;
    }
    hash
}

/// Domain separator for instance seeds; distinct from every algorithm tag
/// because algorithm labels never equal "instance".
const INSTANCE_TAG: u64 = fnv1a64(b"instance");

/// One finished run, as persisted to runs.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algo: String,
    pub n: usize,
    /// Clause count for planted3cnf cells; 0 on OneMax, which has no clauses.
    pub m: u64,
    /// The derived per-run seed (not the base seed).
    pub seed: u64,
    pub success: bool,
    pub evaluations: u64,
    pub iterations: u64,
    pub max_lambda: f64,
    /// Wall-clock milliseconds; the only nondeterministic column.
    pub wall_ms: f64,
}

/// Aggregated statistics for one (algorithm, n) cell.
#[derive(Debug, Clone)]
pub struct CellSummary {
    pub algo: String,
    pub n: usize,
    pub m: u64,
    pub runs: u64,
    pub censored: u64,
    /// Lower median of evaluations with censored runs as +∞; non-finite
    /// whenever at least half the runs are censored.
    pub median_evals: f64,
    pub iqr_evals: f64,
    pub median_max_lambda: f64,
    pub iqr_max_lambda: f64,
}

/// One plotdata.csv row: median evaluations divided by n.
#[derive(Debug, Clone)]
pub struct PlotRow {
    pub algo: String,
    pub n: usize,
    pub median_evals_over_n: f64,
}

/// Everything a sweep produces, in writing order.
#[derive(Debug)]
pub struct SweepOutput {
    pub runs: Vec<RunRecord>,
    pub summaries: Vec<CellSummary>,
    pub plot: Vec<PlotRow>,
    /// Present per run only when the config enables tracing, in the same
    /// order as `runs`.
    pub traces: Vec<Vec<algorithms::TraceRecord>>,
}

pub(crate) fn run_seed(base_seed: u64, algo: &AlgoSpec, n: usize, run_index: u64) -> u64 {
    derive_seed(
        base_seed,
        &[fnv1a64(algo.to_string().as_bytes()), n as u64, run_index],
    )
}

pub(crate) fn instance_seed(base_seed: u64, n: usize, run_index: u64) -> u64 {
    derive_seed(base_seed, &[INSTANCE_TAG, n as u64, run_index])
}

fn dispatch(
    problem: &impl Problem,
    algo: &AlgoSpec,
    budget: u64,
    rng: &mut RandomSource,
    trace_every: Option<u64>,
) -> Result<algorithms::RunRecord> {
    let n = problem.dimension();
    match algo {
        AlgoSpec::Opo => algorithms::run_opo_ea(problem, budget, rng, trace_every),
        AlgoSpec::Fixed(lambda) => {
            algorithms::run_fixed(problem, *lambda, budget, rng, trace_every)
        }
        AlgoSpec::Adaptive(cap) => algorithms::run_ga(
            problem,
            GaParams::adaptive(cap.resolve(n), DEFAULT_UPDATE_STRENGTH, budget),
            rng,
            trace_every,
        ),
    }
}

/// Executes one run of one algorithm, deterministically in everything but
/// wall time. `run_index` 0 is what the `run` and `trace` subcommands use,
/// so a single run reproduces the corresponding first sweep run exactly.
#[allow(clippy::too_many_arguments)]
pub fn run_single(
    problem: ProblemKind,
    algo: &AlgoSpec,
    n: usize,
    m_rule: &MRule,
    budget: &BudgetRule,
    base_seed: u64,
    run_index: u64,
    trace_every: Option<u64>,
) -> Result<(RunRecord, Vec<algorithms::TraceRecord>)> {
    let seed = run_seed(base_seed, algo, n, run_index);
    let budget = budget.resolve(n);
    let mut rng = RandomSource::from_seed(seed);
    let started = Instant::now();
    let (record, m) = match problem {
        ProblemKind::OneMax => {
            let problem = OneMax::new(n);
            (dispatch(&problem, algo, budget, &mut rng, trace_every)?, 0)
        }
        ProblemKind::Planted3Cnf => {
            let m = m_rule.resolve(n);
            if m == 0 {
                return Err(Error::InvalidParameter(format!(
                    "m rule '{m_rule}' yields no clauses at n = {n}"
                )));
            }
            let instance =
                PlantedInstance::from_seed(n, m as usize, instance_seed(base_seed, n, run_index))?;
            (dispatch(&instance, algo, budget, &mut rng, trace_every)?, m)
        }
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok((
        RunRecord {
            algo: algo.to_string(),
            n,
            m,
            seed,
            success: record.success,
            evaluations: record.evaluations,
            iterations: record.iterations,
            max_lambda: record.max_lambda,
            wall_ms,
        },
        record.trace,
    ))
}

/// Runs the whole sweep. Work is spread over the configured worker count;
/// results are gathered in job order (algorithms in config order, sizes
/// ascending, run_index ascending) so the outputs never depend on
/// scheduling.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();
    let trace_every = config.trace.then_some(config.trace_every);

    let mut jobs = Vec::new();
    for algo in &config.algorithms {
        for &n in &sizes {
            for run_index in 0..config.runs {
                jobs.push((*algo, n, run_index));
            }
        }
    }

    let workers = if config.workers == 0 {
        std::thread::available_parallelism().map_or(1, |v| v.get())
    } else {
        config.workers
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    let results: Result<Vec<_>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(algo, n, run_index)| {
                run_single(
                    config.problem,
                    &algo,
                    n,
                    &config.m_rule,
                    &config.budget,
                    config.base_seed,
                    run_index,
                    trace_every,
                )
            })
            .collect()
    });
    let mut runs = Vec::with_capacity(jobs.len());
    let mut traces = Vec::new();
    for (record, trace) in results? {
        runs.push(record);
        if config.trace {
            traces.push(trace);
        }
    }

    let mut summaries = Vec::new();
    for algo in &config.algorithms {
        let label = algo.to_string();
        for &n in &sizes {
            let cell: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.algo == label && r.n == n)
                .collect();
            summaries.push(aggregate(&label, n, &cell));
        }
    }
    let plot = summaries
        .iter()
        .map(|s| PlotRow {
            algo: s.algo.clone(),
            n: s.n,
            median_evals_over_n: s.median_evals / s.n as f64,
        })
        .collect();
    Ok(SweepOutput {
        runs,
        summaries,
        plot,
        traces,
    })
}

/// Collapses one cell into medians and IQRs. Censored runs enter the
/// evaluation statistics as +∞; when at least half the cell is censored the
/// medians are deliberately reported non-finite rather than from the
/// surviving minority.
fn aggregate(algo: &str, n: usize, cell: &[&RunRecord]) -> CellSummary {
    assert!(!cell.is_empty(), "empty cell for {algo} at n = {n}");
    let censored = cell.iter().filter(|r| !r.success).count() as u64;
    let mut evals: Vec<f64> = cell
        .iter()
        .map(|r| {
            if r.success {
                r.evaluations as f64
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut lambdas: Vec<f64> = cell.iter().map(|r| r.max_lambda).collect();
    let half_censored = censored * 2 >= cell.len() as u64;
    let (median_evals, iqr_evals) = if half_censored {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (lower_median(&mut evals), iqr(&mut evals))
    };
    CellSummary {
        algo: algo.to_string(),
        n,
        m: cell[0].m,
        runs: cell.len() as u64,
        censored,
        median_evals,
        iqr_evals,
        median_max_lambda: lower_median(&mut lambdas),
        iqr_max_lambda: iqr(&mut lambdas),
    }
}
