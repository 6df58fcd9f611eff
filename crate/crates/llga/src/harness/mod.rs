//! Experiment orchestration: sweep configs, repeated runs, median/IQR
//! aggregation, and deterministic CSV persistence.
//!
//! Determinism contract: given the same config and base seed, every output
//! file except the measured `wall_ms` column of runs.csv is byte-identical
//! across repeats, machines, and worker counts.

mod csvout;
mod runner;
mod stats;

pub use csvout::{
    fmt_f64, write_plotdata_csv, write_runs_csv, write_summary_csv, write_trace_csv,
};
pub use runner::{run_single, sweep, RunRecord, SweepOutput};
pub use stats::{iqr, lower_median};

use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Which fitness landscape a sweep runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    OneMax,
    Planted3Cnf,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::OneMax => write!(f, "onemax"),
            ProblemKind::Planted3Cnf => write!(f, "planted3cnf"),
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onemax" => Ok(ProblemKind::OneMax),
            "planted3cnf" => Ok(ProblemKind::Planted3Cnf),
            other => Err(Error::ConfigValue(format!(
                "unknown problem '{other}' (expected onemax or planted3cnf)"
            ))),
        }
    }
}

/// How the λ cap of the adaptive GA scales with the problem size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapRule {
    /// Effectively unconstrained: λ̄ = n.
    N,
    /// λ̄ = 2·ln(n+1).
    TwoLn,
    /// λ̄ = 2·log₂(n+1), for comparing against the base-2 reading.
    TwoLog2,
    /// A fixed real cap independent of n.
    Real(f64),
}

impl CapRule {
    /// Concrete cap for dimension n, clamped into [1, n] so that every rule
    /// yields a valid parameterization even at tiny sizes.
    pub fn resolve(&self, n: usize) -> f64 {
        let raw = match self {
            CapRule::N => n as f64,
            CapRule::TwoLn => 2.0 * ((n + 1) as f64).ln(),
            CapRule::TwoLog2 => 2.0 * ((n + 1) as f64).log2(),
            CapRule::Real(c) => *c,
        };
        raw.clamp(1.0, n as f64)
    }
}

/// One algorithm under test. The canonical text form (`opo`, `fixed:8`,
/// `adaptive:n`, `adaptive:2ln`, `adaptive:2log2`, `adaptive:6.5`) doubles
/// as the `algo` CSV column and as the label hashed into per-run seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgoSpec {
    /// (1+1) EA with standard bit mutation.
    Opo,
    /// (1+(λ,λ)) GA at a fixed integer λ.
    Fixed(u64),
    /// Self-adjusting (1+(λ,λ)) GA with the given cap rule.
    Adaptive(CapRule),
}

impl fmt::Display for AlgoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgoSpec::Opo => write!(f, "opo"),
            AlgoSpec::Fixed(lambda) => write!(f, "fixed:{lambda}"),
            AlgoSpec::Adaptive(CapRule::N) => write!(f, "adaptive:n"),
            AlgoSpec::Adaptive(CapRule::TwoLn) => write!(f, "adaptive:2ln"),
            AlgoSpec::Adaptive(CapRule::TwoLog2) => write!(f, "adaptive:2log2"),
            AlgoSpec::Adaptive(CapRule::Real(c)) => write!(f, "adaptive:{c}"),
        }
    }
}

impl std::str::FromStr for AlgoSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "opo" {
            return Ok(AlgoSpec::Opo);
        }
        if let Some(rest) = s.strip_prefix("fixed:") {
            let lambda: u64 = rest
                .parse()
                .map_err(|_| Error::ConfigValue(format!("bad fixed λ '{rest}'")))?;
            if lambda == 0 {
                return Err(Error::ConfigValue("fixed λ must be at least 1".into()));
            }
            return Ok(AlgoSpec::Fixed(lambda));
        }
        if let Some(rest) = s.strip_prefix("adaptive:") {
            let rule = match rest {
                "n" => CapRule::N,
                "2ln" => CapRule::TwoLn,
                "2log2" => CapRule::TwoLog2,
                num => {
                    let c: f64 = num
                        .parse()
                        .map_err(|_| Error::ConfigValue(format!("bad λ cap '{num}'")))?;
                    if !c.is_finite() || c < 1.0 {
                        return Err(Error::ConfigValue(format!(
                            "λ cap must be a finite real ≥ 1, got '{num}'"
                        )));
                    }
                    CapRule::Real(c)
                }
            };
            return Ok(AlgoSpec::Adaptive(rule));
        }
        Err(Error::ConfigValue(format!(
            "unknown algorithm '{s}' (expected opo, fixed:<λ>, or adaptive:<cap>)"
        )))
    }
}

/// Clause-count rule m(n) for planted instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MRule {
    /// m = ⌊c·n·ln n⌋.
    NLnN(f64),
    /// m = ⌊c·n·log₂ n⌋.
    NLog2N(f64),
    /// A constant clause count.
    Const(u64),
}

impl MRule {
    pub fn resolve(&self, n: usize) -> u64 {
        match self {
            MRule::NLnN(c) => (c * n as f64 * (n as f64).ln()).floor() as u64,
            MRule::NLog2N(c) => (c * n as f64 * (n as f64).log2()).floor() as u64,
            MRule::Const(m) => *m,
        }
    }
}

impl fmt::Display for MRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MRule::NLnN(c) => write!(f, "{c}nlnn"),
            MRule::NLog2N(c) => write!(f, "{c}nlog2n"),
            MRule::Const(m) => write!(f, "{m}"),
        }
    }
}

impl std::str::FromStr for MRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeff = |prefix: &str| -> Result<f64> {
            let c: f64 = prefix
                .parse()
                .map_err(|_| Error::ConfigValue(format!("bad m coefficient '{prefix}'")))?;
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::ConfigValue(format!(
                    "m coefficient must be a positive real, got '{prefix}'"
                )));
            }
            Ok(c)
        };
        if let Some(prefix) = s.strip_suffix("nlog2n") {
            return Ok(MRule::NLog2N(coeff(prefix)?));
        }
        if let Some(prefix) = s.strip_suffix("nlnn") {
            return Ok(MRule::NLnN(coeff(prefix)?));
        }
        let m: u64 = s.parse().map_err(|_| {
            Error::ConfigValue(format!(
                "bad m rule '{s}' (expected <c>nlnn, <c>nlog2n, or an integer)"
            ))
        })?;
        Ok(MRule::Const(m))
    }
}

/// Evaluation budget rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetRule {
    /// ⌊10⁴·n·ln(n+2)⌋, generous against every expected runtime in scope.
    Auto,
    /// A constant budget.
    Fixed(u64),
}

impl BudgetRule {
    pub fn resolve(&self, n: usize) -> u64 {
        match self {
            BudgetRule::Auto => (1.0e4 * n as f64 * ((n + 2) as f64).ln()).floor() as u64,
            BudgetRule::Fixed(b) => *b,
        }
    }
}

impl std::str::FromStr for BudgetRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(BudgetRule::Auto);
        }
        let b: u64 = s.parse().map_err(|_| {
            Error::ConfigValue(format!("bad budget '{s}' (expected auto or an integer)"))
        })?;
        if b == 0 {
            return Err(Error::ConfigValue("budget must be positive".into()));
        }
        Ok(BudgetRule::Fixed(b))
    }
}

/// A full sweep description, parsed from a flat key=value file.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub sizes: Vec<usize>,
    pub algorithms: Vec<AlgoSpec>,
    pub runs: u64,
    pub base_seed: u64,
    pub budget: BudgetRule,
    pub m_rule: MRule,
    pub trace: bool,
    pub trace_every: u64,
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses the flat `key = value` format (one pair per line, `#` starts a
    /// comment). Required keys: problem, sizes, algos. Every parse failure
    /// carries the 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut problem = None;
        let mut sizes: Option<Vec<usize>> = None;
        let mut algorithms: Option<Vec<AlgoSpec>> = None;
        let mut runs = 100u64;
        let mut base_seed = 1u64;
        let mut budget = BudgetRule::Auto;
        let mut m_rule = MRule::NLnN(4.0);
        let mut trace = false;
        let mut trace_every = 1u64;
        let mut workers = 0usize;
        let mut out_dir = None;
        let mut seen: Vec<String> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let fail = |message: String| Error::Config { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| fail(format!("expected key = value, got '{content}'")))?;
            let key = key.trim();
            let value = value.trim();
            if value.is_empty() {
                return Err(fail(format!("empty value for key '{key}'")));
            }
            if seen.iter().any(|k| k == key) {
                return Err(fail(format!("duplicate key '{key}'")));
            }
            seen.push(key.to_string());
            let reword = |e: Error| match e {
                Error::ConfigValue(message) => Error::Config { line, message },
                other => other,
            };
            match key {
                "problem" => problem = Some(value.parse::<ProblemKind>().map_err(reword)?),
                "sizes" => {
                    let mut parsed = Vec::new();
                    for part in value.split(',') {
                        let n: usize = part.trim().parse().map_err(|_| {
                            fail(format!("bad size '{}'", part.trim()))
                        })?;
                        if n == 0 {
                            return Err(fail("sizes must be positive".into()));
                        }
                        if parsed.contains(&n) {
                            return Err(fail(format!("duplicate size {n}")));
                        }
                        parsed.push(n);
                    }
                    sizes = Some(parsed);
                }
                "algos" => {
                    let mut parsed: Vec<AlgoSpec> = Vec::new();
                    for part in value.split(',') {
                        let spec = part.trim().parse::<AlgoSpec>().map_err(reword)?;
                        if parsed.contains(&spec) {
                            return Err(fail(format!("duplicate algorithm '{spec}'")));
                        }
                        parsed.push(spec);
                    }
                    algorithms = Some(parsed);
                }
                "runs" => {
                    runs = value
                        .parse()
                        .map_err(|_| fail(format!("bad runs count '{value}'")))?;
                    if runs == 0 {
                        return Err(fail("runs must be positive".into()));
                    }
                }
                "base_seed" => {
                    base_seed = value
                        .parse()
                        .map_err(|_| fail(format!("bad base_seed '{value}'")))?;
                }
                "budget" => budget = value.parse::<BudgetRule>().map_err(reword)?,
                "m" => m_rule = value.parse::<MRule>().map_err(reword)?,
                "trace" => {
                    trace = match value {
                        "on" | "true" => true,
                        "off" | "false" => false,
                        other => return Err(fail(format!("bad trace flag '{other}'"))),
                    };
                }
                "trace_every" => {
                    trace_every = value
                        .parse()
                        .map_err(|_| fail(format!("bad trace_every '{value}'")))?;
                    if trace_every == 0 {
                        return Err(fail("trace_every must be positive".into()));
                    }
                }
                "workers" => {
                    workers = value
                        .parse()
                        .map_err(|_| fail(format!("bad workers count '{value}'")))?;
                }
                "out" => out_dir = Some(PathBuf::from(value)),
                other => return Err(fail(format!("unknown key '{other}'"))),
            }
        }

        let config = ExperimentConfig {
            problem: problem.ok_or_else(|| Error::ConfigValue("missing key 'problem'".into()))?,
            sizes: sizes.ok_or_else(|| Error::ConfigValue("missing key 'sizes'".into()))?,
            algorithms: algorithms
                .ok_or_else(|| Error::ConfigValue("missing key 'algos'".into()))?,
            runs,
            base_seed,
            budget,
            m_rule,
            trace,
            trace_every,
            workers,
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }

    /// Cross-field checks that do not depend on any single line.
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::ConfigValue("sizes must not be empty".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::ConfigValue("algos must not be empty".into()));
        }
        for &n in &self.sizes {
            if self.problem == ProblemKind::Planted3Cnf {
                if n < 3 {
                    return Err(Error::ConfigValue(format!(
                        "planted3cnf requires n ≥ 3, got {n}"
                    )));
                }
                if self.m_rule.resolve(n) == 0 {
                    return Err(Error::ConfigValue(format!(
                        "m rule '{}' yields no clauses at n = {n}",
                        self.m_rule
                    )));
                }
            }
            for algo in &self.algorithms {
                if let AlgoSpec::Fixed(lambda) = algo {
                    if *lambda > n as u64 {
                        return Err(Error::ConfigValue(format!(
                            "fixed λ = {lambda} exceeds size n = {n}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algo_spec_roundtrips_through_display() {
        for text in ["opo", "fixed:8", "adaptive:n", "adaptive:2ln", "adaptive:2log2", "adaptive:6.5"] {
            let spec: AlgoSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        // Redundant fraction digits canonicalize away.
        let spec: AlgoSpec = "adaptive:8.0".parse().unwrap();
        assert_eq!(spec.to_string(), "adaptive:8");
    }

    #[test]
    fn algo_spec_rejects_malformed_input() {
        for text in ["", "opo2", "fixed:", "fixed:0", "fixed:x", "adaptive:", "adaptive:0.5", "adaptive:inf"] {
            assert!(text.parse::<AlgoSpec>().is_err(), "accepted '{text}'");
        }
    }

    #[test]
    fn cap_rules_resolve_and_clamp() {
        assert_eq!(CapRule::N.resolve(4096), 4096.0);
        let two_ln = CapRule::TwoLn.resolve(4096);
        assert!((two_ln - 2.0 * 4097.0f64.ln()).abs() < 1e-12);
        // 2·ln(3) > 2, so the rule clamps to n at n = 2.
        assert_eq!(CapRule::TwoLn.resolve(2), 2.0);
        assert_eq!(CapRule::Real(6.5).resolve(4096), 6.5);
        assert_eq!(CapRule::Real(6.5).resolve(4), 4.0);
    }

    #[test]
    fn m_rules_resolve_examples() {
        // ⌊4·1024·ln 1024⌋ = ⌊28_391.3…⌋.
        assert_eq!(MRule::NLnN(4.0).resolve(1024), 28391);
        assert_eq!(MRule::NLog2N(4.0).resolve(1024), 40960);
        assert_eq!(MRule::Const(777).resolve(1024), 777);
        assert_eq!("4nlnn".parse::<MRule>().unwrap(), MRule::NLnN(4.0));
        assert_eq!("2.5nlog2n".parse::<MRule>().unwrap(), MRule::NLog2N(2.5));
        assert_eq!("4096".parse::<MRule>().unwrap(), MRule::Const(4096));
        assert!("nlnn".parse::<MRule>().is_err());
        assert!("-1nlnn".parse::<MRule>().is_err());
    }

    #[test]
    fn budget_rule_auto_formula() {
        let b = BudgetRule::Auto.resolve(1024);
        let expected = (1.0e4 * 1024.0 * 1026.0f64.ln()).floor() as u64;
        assert_eq!(b, expected);
        assert_eq!(BudgetRule::Fixed(5000).resolve(1024), 5000);
        assert!("0".parse::<BudgetRule>().is_err());
    }

    #[test]
    fn config_parses_full_example() {
        let text = "\
# acceptance sweep
problem = onemax
sizes = 1024, 4096
algos = opo, fixed:8, adaptive:2ln
runs = 50
base_seed = 42
budget = auto
trace = off
workers = 2
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.problem, ProblemKind::OneMax);
        assert_eq!(cfg.sizes, vec![1024, 4096]);
        assert_eq!(cfg.algorithms.len(), 3);
        assert_eq!(cfg.runs, 50);
        assert_eq!(cfg.base_seed, 42);
        assert_eq!(cfg.workers, 2);
        assert!(!cfg.trace);
    }

    #[test]
    fn config_defaults_fill_optional_keys() {
        let cfg = ExperimentConfig::parse("problem = onemax\nsizes = 16\nalgos = opo\n").unwrap();
        assert_eq!(cfg.runs, 100);
        assert_eq!(cfg.base_seed, 1);
        assert_eq!(cfg.budget, BudgetRule::Auto);
        assert_eq!(cfg.m_rule, MRule::NLnN(4.0));
        assert_eq!(cfg.trace_every, 1);
        assert_eq!(cfg.workers, 0);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        let cases = [
            ("problem = onemax\nsizes = 16\nalgos = opo\nbogus = 1\n", 4, "unknown key"),
            ("problem = onemax\nsizes = 16,16\nalgos = opo\n", 2, "duplicate size"),
            ("problem = onemax\nsizes = 16\nalgos = opo\nruns = 0\n", 4, "runs must be positive"),
            ("problem = waffles\nsizes = 16\nalgos = opo\n", 1, "unknown problem"),
            ("problem = onemax\nproblem = onemax\nsizes = 16\nalgos = opo\n", 2, "duplicate key"),
            ("problem = onemax\nsizes = 16\nalgos = opo\ntrace\n", 4, "expected key = value"),
        ];
        for (text, want_line, want_msg) in cases {
            match ExperimentConfig::parse(text) {
                Err(Error::Config { line, message }) => {
                    assert_eq!(line, want_line, "for {text:?}");
                    assert!(message.contains(want_msg), "got '{message}'");
                }
                other => panic!("expected line error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn config_missing_required_key_is_reported() {
        let err = ExperimentConfig::parse("sizes = 16\nalgos = opo\n").unwrap_err();
        assert!(err.to_string().contains("missing key 'problem'"));
    }

    #[test]
    fn config_rejects_invalid_combinations() {
        // Fixed λ beyond the smallest size.
        assert!(ExperimentConfig::parse("problem = onemax\nsizes = 4\nalgos = fixed:8\n").is_err());
        // Planted instances need n ≥ 3 and at least one clause.
        assert!(ExperimentConfig::parse("problem = planted3cnf\nsizes = 2\nalgos = opo\n").is_err());
        assert!(
            ExperimentConfig::parse("problem = planted3cnf\nsizes = 16\nalgos = opo\nm = 0\n")
                .is_err()
        );
    }
}
