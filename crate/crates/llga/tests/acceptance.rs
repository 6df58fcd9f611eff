//! Acceptance gate: one test per criterion, each printing a single
//! machine-greppable PASS/FAIL line (run with `--nocapture` to see the
//! lines for passing tests). Tolerances are pinned here, not tuned at run
//! time.

mod common;

use common::{
    brute_force_sat_counts, chi_square_critical, chi_square_uniform, lower_median_f64,
    lower_median_u64,
};
use llga::algorithms::{
    lambda_update, round_half_up, run_adaptive, run_fixed, run_opo_ea, IterationOutcome,
};
use llga::analysis::{check_well_behaved, sat_probability, Exact, DEFAULT_SAMPLE_COUNT};
use llga::harness::{
    self, sweep, write_plotdata_csv, write_runs_csv, write_summary_csv, write_trace_csv,
    AlgoSpec, BudgetRule, CapRule, ExperimentConfig, MRule, ProblemKind,
};
use llga::problems::{generate_planted_instance, OneMax, PlantedInstance};
use llga::rng::{derive_seed, sample_distinct};
use llga::{BitString, RandomSource};

fn report(number: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02} {verdict} {detail}");
    assert!(pass, "criterion {number:02} failed: {detail}");
}

fn ulps_apart(a: f64, b: f64) -> u64 {
    assert!(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite());
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

#[test]
fn criterion_01_exact_oracle_equivalence() {
    let mut checked = 0;
    for n in 3..=12usize {
        for d in 0..=n {
            let (satisfied, total) = brute_force_sat_counts(n, d);
            let expected = Exact::new(satisfied, total);
            let got = sat_probability(n, d).unwrap();
            assert_eq!(
                got, expected,
                "sat_probability({n}, {d}) disagrees with enumeration"
            );
            checked += 1;
        }
    }
    report(
        1,
        true,
        &format!("exact rational equality on {checked} (n, d) pairs"),
    );
}

#[test]
fn criterion_02_generator_uniformity() {
    const DRAWS: usize = 100_000;
    let planted = BitString::ones(4);
    let mut rng = RandomSource::from_seed(0x5EED_CAFE);
    let instance = generate_planted_instance(4, DRAWS, &planted, &mut rng, 0).unwrap();
    // 4 variable triples × 7 satisfying sign patterns = 28 categories. The
    // triple over {0..3} is identified by its variable sum (3..=6).
    let mut observed = [0u64; 28];
    for clause in instance.formula().clauses() {
        let vars = clause.vars();
        let triple = (vars[0] + vars[1] + vars[2] - 3) as usize;
        let signs = clause.signs();
        let pattern = (signs[0] as usize) << 2 | (signs[1] as usize) << 1 | signs[2] as usize;
        assert!(pattern >= 1, "generator emitted a clause the planted assignment falsifies");
        observed[triple * 7 + (pattern - 1)] += 1;
    }
    let stat = chi_square_uniform(&observed, DRAWS as u64);
    let critical = chi_square_critical(27, 1e-3);
    report(
        2,
        stat < critical,
        &format!("chi-square {stat:.2} < {critical:.2} (27 df, alpha 1e-3)"),
    );
}

#[test]
fn criterion_03_incremental_evaluation_equivalence() {
    let instance = PlantedInstance::from_seed(64, 2048, 0xDE17A).unwrap();
    let formula = instance.formula();
    let mut rng = RandomSource::from_seed(0xFACE);
    for _ in 0..10_000 {
        let x = BitString::uniform(64, &mut rng).unwrap();
        let k = rng.next_below(65) as usize;
        let flips = sample_distinct(64, k, &mut rng);
        let base = formula.count_satisfied(&x);
        let delta = formula.count_satisfied_delta(&x, base, &flips);
        let full = formula.count_satisfied(&x.with_flips(&flips));
        assert_eq!(delta, full, "delta evaluation diverged at k = {k}");
    }
    report(3, true, "10000 random flip sets match full recounts exactly");
}

#[test]
fn criterion_04_lambda_update_semantics() {
    use IterationOutcome::{Equal, Improved, Worse};
    const F: f64 = 1.5;
    const U: u32 = 5;
    let mut ok = true;
    // Shrink branch λ ← max{λ/F, 1}.
    ok &= ulps_apart(lambda_update(4.0, Improved, F, U, 100.0), 2.6666666666666665) <= 1;
    ok &= lambda_update(1.2, Improved, F, U, 100.0) == 1.0;
    ok &= lambda_update(1.0, Improved, F, U, 100.0) == 1.0;
    // Growth branch λ ← min{λ·F^(1/(U−1)), λ̄}, on both non-improving
    // outcomes.
    ok &= ulps_apart(lambda_update(2.0, Equal, F, U, 100.0), 2.213363839400643) <= 1;
    ok &= ulps_apart(lambda_update(2.0, Worse, F, U, 100.0), 2.213363839400643) <= 1;
    ok &= ulps_apart(lambda_update(1.0, Worse, F, U, 1.0e18), 1.1066819197003215) <= 1;
    ok &= lambda_update(99.0, Equal, F, U, 100.0) == 100.0;
    ok &= lambda_update(100.0, Worse, F, U, 100.0) == 100.0;
    // Rounding: nearest, ties upward.
    let table = [
        (1.0, 1),
        (2.4, 2),
        (2.5, 3),
        (2.6, 3),
        (3.5, 4),
        (7.499999999999999, 7),
        (1_000_000.5, 1_000_001),
    ];
    for (input, expected) in table {
        ok &= round_half_up(input) == expected;
    }
    report(4, ok, "all update branches and tie-rounding match to 1 ulp");
}

/// Seeds for the OneMax adaptive criteria, shared so the constrained
/// variant is compared against the identical unlimited baseline.
fn onemax_adaptive_median(n: usize, cap: f64, runs: u64) -> f64 {
    let problem = OneMax::new(n);
    let budget = BudgetRule::Auto.resolve(n);
    let mut evals = Vec::new();
    for i in 0..runs {
        let mut rng = RandomSource::from_seed(derive_seed(0xACCE, &[n as u64, i]));
        let record = run_adaptive(&problem, cap, 1.5, budget, &mut rng, None).unwrap();
        evals.push(if record.success {
            record.evaluations as f64
        } else {
            f64::INFINITY
        });
    }
    lower_median_f64(&evals)
}

#[test]
fn criterion_05_onemax_adaptive_linearity() {
    let sizes = [1usize << 12, 1 << 14, 1 << 16];
    let mut per_n = Vec::new();
    for &n in &sizes {
        let median = onemax_adaptive_median(n, n as f64, 50);
        per_n.push(median / n as f64);
    }
    let min = per_n.iter().cloned().fold(f64::MAX, f64::min);
    let max = per_n.iter().cloned().fold(f64::MIN, f64::max);
    let in_band = per_n.iter().all(|&q| (7.0..=20.0).contains(&q));
    let flat = max / min <= 1.3;
    report(
        5,
        in_band && flat,
        &format!(
            "median evals/n = {:.2}/{:.2}/{:.2}, spread ratio {:.3} (band [7,20], ratio <= 1.3)",
            per_n[0],
            per_n[1],
            per_n[2],
            max / min
        ),
    );
}

#[test]
fn criterion_06_onemax_constrained_adaptive() {
    let sizes = [1usize << 12, 1 << 14, 1 << 16];
    let mut per_n = Vec::new();
    let mut capped_top = 0.0;
    for &n in &sizes {
        let cap = 2.0 * ((n + 1) as f64).ln();
        let median = onemax_adaptive_median(n, cap, 50);
        if n == 1 << 16 {
            capped_top = median;
        }
        per_n.push(median / n as f64);
    }
    let in_band = per_n.iter().all(|&q| (8.0..=22.0).contains(&q));
    let unlimited_top = onemax_adaptive_median(1 << 16, (1 << 16) as f64, 50);
    let close = (capped_top - unlimited_top).abs() <= 0.25 * unlimited_top;
    report(
        6,
        in_band && close,
        &format!(
            "median evals/n = {:.2}/{:.2}/{:.2} (band [8,22]); at 2^16 capped {capped_top} vs unlimited {unlimited_top} (within 25%)",
            per_n[0], per_n[1], per_n[2]
        ),
    );
}

#[test]
fn criterion_07_fixed_lambda_ordering() {
    let n = 1usize << 12;
    let problem = OneMax::new(n);
    let budget = BudgetRule::Auto.resolve(n);
    let mut medians = Vec::new();
    for lambda in [2u64, 4, 8] {
        let mut evals = Vec::new();
        for i in 0..50u64 {
            let mut rng = RandomSource::from_seed(derive_seed(0xF1CED, &[lambda, i]));
            let record = run_fixed(&problem, lambda, budget, &mut rng, None).unwrap();
            assert!(record.success, "fixed λ={lambda} run {i} censored");
            evals.push(record.evaluations);
        }
        medians.push(lower_median_u64(&evals));
    }
    let ordered = medians[0] > medians[1] && medians[1] > medians[2];
    report(
        7,
        ordered,
        &format!(
            "median evals at λ=2/4/8: {}/{}/{} strictly decreasing",
            medians[0], medians[1], medians[2]
        ),
    );
}

#[test]
fn criterion_08_opo_ea_scaling() {
    let sizes = [1usize << 10, 1 << 12, 1 << 14];
    let mut ratios = Vec::new();
    for &n in &sizes {
        let problem = OneMax::new(n);
        let budget = BudgetRule::Auto.resolve(n);
        let mut evals = Vec::new();
        for i in 0..50u64 {
            let mut rng = RandomSource::from_seed(derive_seed(0x0EA, &[n as u64, i]));
            let record = run_opo_ea(&problem, budget, &mut rng, None).unwrap();
            assert!(record.success, "(1+1) EA run {i} at n={n} censored");
            evals.push(record.evaluations);
        }
        let median = lower_median_u64(&evals) as f64;
        ratios.push(median / (n as f64 * (n as f64).ln()));
    }
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let midpoint = (max + min) / 2.0;
    let band_ok = (max - min) <= 0.40 * midpoint;
    report(
        8,
        band_ok,
        &format!(
            "median evals/(n ln n) = {:.3}/{:.3}/{:.3}, band width {:.1}% of midpoint (<= 40%)",
            ratios[0],
            ratios[1],
            ratios[2],
            100.0 * (max - min) / midpoint
        ),
    );
}

#[test]
fn criterion_09_threecnf_cap_ordering() {
    let n = 1usize << 10;
    let base_seed = 3202;
    let mut capped = Vec::new();
    let mut uncapped = Vec::new();
    for run_index in 0..30u64 {
        for (algo, bucket) in [
            (AlgoSpec::Adaptive(CapRule::TwoLn), &mut capped),
            (AlgoSpec::Adaptive(CapRule::N), &mut uncapped),
        ] {
            let (record, _) = harness::run_single(
                ProblemKind::Planted3Cnf,
                &algo,
                n,
                &MRule::NLnN(4.0),
                &BudgetRule::Auto,
                base_seed,
                run_index,
                None,
            )
            .unwrap();
            bucket.push(if record.success {
                record.evaluations as f64
            } else {
                f64::INFINITY
            });
        }
    }
    let med_capped = lower_median_f64(&capped);
    let med_uncapped = lower_median_f64(&uncapped);
    report(
        9,
        med_capped < med_uncapped,
        &format!(
            "median evals over 30 paired runs: constrained {med_capped} < unconstrained {med_uncapped}"
        ),
    );
}

#[test]
fn criterion_10_max_lambda_growth() {
    let sizes = [1usize << 11, 1 << 12, 1 << 13];
    let mut medians = Vec::new();
    for &n in &sizes {
        let mut tops = Vec::new();
        for run_index in 0..9u64 {
            let (record, _) = harness::run_single(
                ProblemKind::Planted3Cnf,
                &AlgoSpec::Adaptive(CapRule::N),
                n,
                &MRule::NLnN(4.0),
                &BudgetRule::Auto,
                777,
                run_index,
                None,
            )
            .unwrap();
            tops.push(record.max_lambda);
        }
        medians.push(lower_median_f64(&tops));
    }
    let first = medians[1] / medians[0];
    let second = medians[2] / medians[1];
    report(
        10,
        first >= 1.5 && second >= 1.5,
        &format!(
            "median max-λ {:.1} → {:.1} → {:.1}, growth factors {:.2} and {:.2} (>= 1.5)",
            medians[0], medians[1], medians[2], first, second
        ),
    );
}

#[test]
fn criterion_11_well_behavedness_high_density() {
    let mut passes = 0u32;
    let mut points = 0u32;
    let mut exceedances = 0u32;
    let mut comparisons = 0u32;
    let mut worst = 0.0f64;
    for instance_seed in 100..105u64 {
        let instance = PlantedInstance::from_seed(16, 4096, instance_seed).unwrap();
        for j in 0..20u64 {
            let d = 4 + (j as usize % 5);
            let mut rng =
                RandomSource::from_seed(derive_seed(0x11AD, &[instance_seed, j]));
            let x = instance
                .planted()
                .with_flips(&sample_distinct(16, d, &mut rng));
            let exact = check_well_behaved(
                &instance,
                &x,
                2,
                llga::analysis::DEFAULT_ENUMERATION_CAP,
                DEFAULT_SAMPLE_COUNT,
                &mut rng,
            )
            .unwrap();
            points += 1;
            if exact.all_pass() {
                passes += 1;
            }
            // Sampled rerun: force sampling with a zero enumeration cap and
            // require agreement within the stored 3-SE Wilson radius.
            let sampled =
                check_well_behaved(&instance, &x, 2, 0, DEFAULT_SAMPLE_COUNT, &mut rng).unwrap();
            for (er, sr) in exact.rows.iter().zip(&sampled.rows) {
                for (e, s) in [(er.bad, sr.bad), (er.good, sr.good)] {
                    if let (Some(e), Some(s)) = (e, s) {
                        comparisons += 1;
                        let deviation = if s.ci_radius > 0.0 {
                            (s.fraction - e.fraction).abs() / s.ci_radius
                        } else if s.fraction == e.fraction {
                            0.0
                        } else {
                            f64::INFINITY
                        };
                        worst = worst.max(deviation);
                        if deviation > 1.0 {
                            exceedances += 1;
                        }
                    }
                }
            }
        }
    }
    let rate = 100.0 * passes as f64 / points as f64;
    report(
        11,
        rate >= 95.0 && exceedances == 0,
        &format!(
            "{passes}/{points} exhaustive passes ({rate:.0}% >= 95%), sampled reruns: \
             {exceedances}/{comparisons} fractions beyond 3 SE (worst deviation {worst:.2} of radius)"
        ),
    );
}

#[test]
fn criterion_12_lambda_trace_band() {
    let n = 1usize << 12;
    let (_, trace) = harness::run_single(
        ProblemKind::Planted3Cnf,
        &AlgoSpec::Adaptive(CapRule::N),
        n,
        &MRule::NLnN(4.0),
        &BudgetRule::Auto,
        1212,
        0,
        Some(1),
    )
    .unwrap();
    let ln_n = (n as f64).ln();
    let mut ratios = Vec::new();
    for row in &trace {
        if row.distance == 0 {
            continue;
        }
        let reference = (n as f64 / row.distance as f64).sqrt();
        if (2.0..=ln_n).contains(&reference) {
            ratios.push(row.lambda / reference);
        }
    }
    if ratios.is_empty() {
        report(12, false, "no trace rows with sqrt(n/d) in [2, ln n]");
        return;
    }
    let median = lower_median_f64(&ratios);
    report(
        12,
        (0.25..=8.0).contains(&median),
        &format!(
            "median λ / sqrt(n/d) = {median:.3} over {} in-stripe rows (band [0.25, 8])",
            ratios.len()
        ),
    );
}

/// Writes a sweep's outputs into a directory and returns (sorted file
/// names, their bytes with wall_ms stripped from runs.csv).
fn materialize(config: &ExperimentConfig, dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let output = sweep(config).unwrap();
    write_runs_csv(&dir.join("runs.csv"), &output.runs).unwrap();
    write_summary_csv(&dir.join("summary.csv"), &output.summaries).unwrap();
    write_plotdata_csv(&dir.join("plotdata.csv"), &output.plot).unwrap();
    if config.trace {
        for (record, trace) in output.runs.iter().zip(&output.traces) {
            let label = record.algo.replace(':', "-");
            let name = format!("trace_{label}_{}_{}.csv", record.n, record.seed);
            write_trace_csv(&dir.join(name), record.n, trace).unwrap();
        }
    }
    let mut files = Vec::new();
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for name in names {
        let mut bytes = std::fs::read(dir.join(&name)).unwrap();
        if name == "runs.csv" {
            // wall_ms is measured, so the determinism contract covers
            // every column but the last.
            let text = String::from_utf8(bytes).unwrap();
            bytes = text
                .lines()
                .map(|l| l.rsplit_once(',').unwrap().0)
                .collect::<Vec<_>>()
                .join("\n")
                .into_bytes();
        }
        files.push((name, bytes));
    }
    files
}

#[test]
fn criterion_13_determinism() {
    let onemax = ExperimentConfig {
        problem: ProblemKind::OneMax,
        sizes: vec![256, 512],
        algorithms: vec![
            AlgoSpec::Opo,
            AlgoSpec::Fixed(8),
            AlgoSpec::Adaptive(CapRule::TwoLn),
        ],
        runs: 10,
        base_seed: 7,
        budget: BudgetRule::Auto,
        m_rule: MRule::NLnN(4.0),
        trace: false,
        trace_every: 1,
        workers: 2,
        out_dir: None,
    };
    let planted = ExperimentConfig {
        problem: ProblemKind::Planted3Cnf,
        sizes: vec![64],
        algorithms: vec![AlgoSpec::Opo, AlgoSpec::Adaptive(CapRule::Real(4.0))],
        runs: 5,
        base_seed: 11,
        budget: BudgetRule::Auto,
        m_rule: MRule::Const(500),
        trace: true,
        trace_every: 25,
        workers: 2,
        out_dir: None,
    };
    let mut compared = 0;
    for config in [&onemax, &planted] {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let a = materialize(config, dir_a.path());
        let b = materialize(config, dir_b.path());
        assert_eq!(
            a.iter().map(|(n, _)| n).collect::<Vec<_>>(),
            b.iter().map(|(n, _)| n).collect::<Vec<_>>(),
            "file sets differ between repeats"
        );
        for ((name, bytes_a), (_, bytes_b)) in a.iter().zip(&b) {
            assert_eq!(bytes_a, bytes_b, "{name} differs between repeats");
            compared += 1;
        }
    }
    report(
        13,
        true,
        &format!("{compared} files byte-identical across repeated sweeps (wall_ms excluded)"),
    );
}
