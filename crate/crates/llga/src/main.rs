//! Command-line front end. Exit codes: 0 on success, 1 on invalid
//! configuration or runtime failure, 2 on usage errors (from the parser).
//! Diagnostics go to standard error; data goes to files or standard output.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{ArgGroup, Parser, Subcommand};

use llga::analysis::{
    check_well_behaved, recommended_cap, DEFAULT_ENUMERATION_CAP, DEFAULT_SAMPLE_COUNT,
};
use llga::harness::{
    run_single, sweep, write_plotdata_csv, write_runs_csv, write_summary_csv, write_trace_csv,
    AlgoSpec, BudgetRule, ExperimentConfig, MRule, ProblemKind,
};
use llga::problems::{read_instance, write_instance, PlantedInstance};
use llga::rng::{derive_seed, sample_distinct};
use llga::{BitString, Error, RandomSource, Result};

#[derive(Parser)]
#[command(name = "llga", version, about = "Laboratory for the (1+(λ,λ)) GA")]
struct Cli {
    /// Base seed all per-run randomness is derived from.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for generated files (default: current directory,
    /// or the sweep config's `out` key).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Evaluation budget: 'auto' or a positive integer. Overrides the
    /// sweep config when given.
    #[arg(long, global = true, value_parser = BudgetRule::from_str)]
    budget: Option<BudgetRule>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run and print its record as a key=value line.
    Run {
        /// opo, fixed:<λ>, or adaptive:<n|2ln|2log2|real>.
        #[arg(long, value_parser = AlgoSpec::from_str)]
        algo: AlgoSpec,
        #[arg(long, value_parser = ProblemKind::from_str)]
        problem: ProblemKind,
        #[arg(long)]
        n: usize,
        /// Clause rule for planted3cnf: <c>nlnn, <c>nlog2n, or an integer.
        #[arg(long, default_value = "4nlnn", value_parser = MRule::from_str)]
        m: MRule,
        /// Which run of the (algo, n) cell to reproduce.
        #[arg(long, default_value_t = 0)]
        run_index: u64,
    },
    /// Run a sweep config; writes runs.csv, summary.csv, plotdata.csv.
    Sweep {
        /// Flat key=value config file.
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute one traced run; writes trace.csv and prints the record.
    Trace {
        #[arg(long, value_parser = AlgoSpec::from_str)]
        algo: AlgoSpec,
        #[arg(long, value_parser = ProblemKind::from_str)]
        problem: ProblemKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "4nlnn", value_parser = MRule::from_str)]
        m: MRule,
        #[arg(long, default_value_t = 0)]
        run_index: u64,
        /// Record every k-th iteration.
        #[arg(long, default_value_t = 1)]
        every: u64,
    },
    /// Check empirical well-behavedness of an instance; writes report.csv.
    #[command(group = ArgGroup::new("start").required(true).args(["d", "x"]))]
    Verify {
        #[arg(long, required_unless_present = "instance")]
        n: Option<usize>,
        /// Clause count (default: ⌊4·n·ln n⌋).
        #[arg(long)]
        m: Option<usize>,
        /// Read the instance from a DIMACS file instead of generating it.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Start from a random point at this Hamming distance from the
        /// planted assignment.
        #[arg(long)]
        d: Option<usize>,
        /// Start from an explicit bit string.
        #[arg(long)]
        x: Option<String>,
        /// λ̄ the separation conditions are tested against
        /// (default: the recommended cap for (n, m)).
        #[arg(long)]
        lambda_cap: Option<u32>,
        /// Exhaustive enumeration limit per offspring set.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        enum_cap: u128,
        /// Sample count for sets beyond the enumeration limit.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
        samples: u64,
    },
    /// Generate a planted 3-CNF instance file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Explicit output path
        /// (default: instance_n<n>_m<m>_seed<seed>.cnf in --out).
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn print_record(record: &llga::harness::RunRecord) {
    println!(
        "algo={} n={} m={} seed={} success={} evaluations={} iterations={} max_lambda={} wall_ms={:.3}",
        record.algo,
        record.n,
        record.m,
        record.seed,
        record.success,
        record.evaluations,
        record.iterations,
        llga::harness::fmt_f64(record.max_lambda),
        record.wall_ms
    );
}

fn out_dir(cli_out: &Option<PathBuf>, config_out: Option<&PathBuf>) -> Result<PathBuf> {
    let dir = cli_out
        .clone()
        .or_else(|| config_out.cloned())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn dispatch(cli: Cli) -> Result<()> {
    let base_seed = cli.seed.unwrap_or(1);
    match cli.command {
        Command::Run {
            algo,
            problem,
            n,
            m,
            run_index,
        } => {
            let budget = cli.budget.unwrap_or(BudgetRule::Auto);
            let (record, _) =
                run_single(problem, &algo, n, &m, &budget, base_seed, run_index, None)?;
            print_record(&record);
            Ok(())
        }
        Command::Trace {
            algo,
            problem,
            n,
            m,
            run_index,
            every,
        } => {
            let budget = cli.budget.unwrap_or(BudgetRule::Auto);
            let (record, trace) = run_single(
                problem,
                &algo,
                n,
                &m,
                &budget,
                base_seed,
                run_index,
                Some(every),
            )?;
            let dir = out_dir(&cli.out, None)?;
            let path = dir.join("trace.csv");
            write_trace_csv(&path, n, &trace)?;
            eprintln!("wrote {}", path.display());
            print_record(&record);
            Ok(())
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(seed) = cli.seed {
                cfg.base_seed = seed;
            }
            if let Some(budget) = cli.budget {
                cfg.budget = budget;
            }
            let dir = out_dir(&cli.out, cfg.out_dir.as_ref())?;
            let output = sweep(&cfg)?;
            write_runs_csv(&dir.join("runs.csv"), &output.runs)?;
            write_summary_csv(&dir.join("summary.csv"), &output.summaries)?;
            write_plotdata_csv(&dir.join("plotdata.csv"), &output.plot)?;
            if cfg.trace {
                for (record, trace) in output.runs.iter().zip(&output.traces) {
                    let label = record.algo.replace(':', "-");
                    let name = format!("trace_{label}_{}_{}.csv", record.n, record.seed);
                    write_trace_csv(&dir.join(name), record.n, trace)?;
                }
            }
            eprintln!(
                "wrote runs.csv summary.csv plotdata.csv in {} ({} runs)",
                dir.display(),
                output.runs.len()
            );
            Ok(())
        }
        Command::Verify {
            n,
            m,
            instance,
            d,
            x,
            lambda_cap,
            enum_cap,
            samples,
        } => {
            let instance = match instance {
                Some(path) => read_instance(path)?,
                None => {
                    let n = n.expect("clap enforces n without --instance");
                    let m = m.unwrap_or_else(|| MRule::NLnN(4.0).resolve(n) as usize);
                    PlantedInstance::from_seed(n, m, base_seed)?
                }
            };
            let n = instance.n();
            let mut rng = RandomSource::from_seed(derive_seed(
                base_seed,
                &[n as u64, instance.m() as u64],
            ));
            let start = match (d, &x) {
                (Some(d), None) => {
                    if d == 0 || d >= n {
                        return Err(Error::InvalidParameter(format!(
                            "--d must satisfy 1 <= d < n = {n}, got {d}"
                        )));
                    }
                    instance
                        .planted()
                        .with_flips(&sample_distinct(n, d, &mut rng))
                }
                (None, Some(bits)) => {
                    let parsed = BitString::parse(bits)?;
                    if parsed.len() != n {
                        return Err(Error::InvalidParameter(format!(
                            "--x has {} bits but the instance has n = {n}",
                            parsed.len()
                        )));
                    }
                    parsed
                }
                _ => unreachable!("clap enforces exactly one of --d/--x"),
            };
            let cap = match lambda_cap {
                Some(c) => c,
                None => recommended_cap(n, instance.m())?,
            };
            let report = check_well_behaved(&instance, &start, cap, enum_cap, samples, &mut rng)?;
            let dir = out_dir(&cli.out, None)?;
            let path = dir.join("report.csv");
            let mut w = BufWriter::new(File::create(&path)?);
            report.write_csv(&mut w)?;
            eprintln!("wrote {}", path.display());
            println!(
                "n={} m={} d={} lambda_cap={} all_pass={}",
                report.n, report.m, report.d, report.lambda_cap,
                report.all_pass()
            );
            Ok(())
        }
        Command::Gen { n, m, file } => {
            let instance = PlantedInstance::from_seed(n, m, base_seed)?;
            let path = match file {
                Some(path) => {
                    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                        std::fs::create_dir_all(parent)?;
                    }
                    path
                }
                None => out_dir(&cli.out, None)?
                    .join(format!("instance_n{n}_m{m}_seed{base_seed}.cnf")),
            };
            write_instance(&path, &instance)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}
