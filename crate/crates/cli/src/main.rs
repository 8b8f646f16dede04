use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qelim::equiv::equiv_witness;
use qelim::gen::gen_vars;
use qelim::harness::{self, parse_probability, Algorithm, BenchConfig, RunOptions};
use qelim::smt::check_sat;
use qelim::{gen_random, parse, Budget, ConjunctOrder, Formula, GenParams, QeError};

/// Quantifier elimination for linear rational arithmetic.
#[derive(Parser)]
#[command(name = "qelim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a quantifier-free formula equivalent to the input.
    Eliminate(EliminateArgs),
    /// Decide a quantifier-free formula and print a model if one exists.
    CheckSat { file: PathBuf },
    /// Decide whether two quantifier-free formulas are equivalent.
    Equiv { first: PathBuf, second: PathBuf },
    /// Print a random formula.
    Gen(GenArgs),
    /// Run a benchmark suite and write one CSV row per instance and algorithm.
    Bench {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct EliminateArgs {
    file: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    /// Same as --algorithm mod1.
    #[arg(long)]
    no_block_projected_model: bool,
    /// Same as --algorithm mod2.
    #[arg(long)]
    add_blocking_to_g: bool,
    /// Only require equivalence where the formula in this file holds.
    #[arg(long, value_name = "FILE")]
    assume: Option<PathBuf>,
    #[arg(long)]
    verify_invariants: bool,
    /// Write key=value statistics to standard error.
    #[arg(long)]
    stats: bool,
    #[arg(long, value_name = "N")]
    timeout_ms: Option<u64>,
    /// Cap on atoms held in intermediate results.
    #[arg(long, value_name = "N")]
    max_atoms: Option<usize>,
    /// Relax generalized models starting from their last conjunct.
    #[arg(long)]
    reverse_order: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 7)]
    vars: usize,
    #[arg(long)]
    depth: u32,
    #[arg(long, default_value_t = -10, allow_negative_numbers = true)]
    coeff_min: i64,
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    coeff_max: i64,
    /// Probability of a quantifier node, as p/q or a decimal.
    #[arg(long, default_value = "1/4", value_parser = parse_probability)]
    quant_prob: (u64, u64),
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn read_formula(path: &Path) -> Result<Formula> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).with_context(|| format!("{}", path.display()))
}

fn read_quantifier_free(path: &Path) -> Result<Formula> {
    let f = read_formula(path)?;
    if !f.is_quantifier_free() {
        bail!("{}: formula must be quantifier-free", path.display());
    }
    Ok(f)
}

fn eliminate(args: EliminateArgs) -> Result<()> {
    let alias = match (args.no_block_projected_model, args.add_blocking_to_g) {
        (true, true) => bail!("--no-block-projected-model and --add-blocking-to-g are exclusive"),
        (true, false) => Some(Algorithm::Mod1),
        (false, true) => Some(Algorithm::Mod2),
        (false, false) => None,
    };
    let algorithm = match (args.algorithm, alias) {
        (Some(a), Some(b)) if a != b => bail!("--algorithm {} conflicts with the {} flag", a.name(), b.name()),
        (a, b) => a.or(b).unwrap_or(Algorithm::Main),
    };
    let f = read_formula(&args.file)?;
    let theory = args.assume.as_deref().map(read_quantifier_free).transpose()?;
    if theory.is_some() && algorithm == Algorithm::Lw {
        bail!("--assume is not supported with --algorithm lw");
    }
    let opts = RunOptions {
        timeout: args.timeout_ms.map(Duration::from_millis),
        max_atoms: args.max_atoms,
        verify: args.verify_invariants,
        order: if args.reverse_order {
            ConjunctOrder::Reversed
        } else {
            ConjunctOrder::Canonical
        },
        theory,
    };
    let started = Instant::now();
    let (out, stats) = harness::run_algorithm(&f, algorithm, &opts)?;
    let wall = started.elapsed();
    println!("{out}");
    if args.stats {
        let mut err = std::io::stderr().lock();
        write!(
            err,
            "algorithm={}\nwall_ms={}\n{}output_atoms={}\n",
            algorithm.name(),
            wall.as_millis(),
            stats.to_key_values(),
            out.atom_count()
        )?;
    }
    for v in &stats.invariant_violations {
        eprintln!("invariant violation: {v}");
    }
    if !stats.invariant_violations.is_empty() {
        bail!("{} invariant violations", stats.invariant_violations.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eliminate(args) => eliminate(args)?,
        Command::CheckSat { file } => match check_sat(&read_quantifier_free(&file)?)? {
            Some(m) => println!("sat\n{m}"),
            None => println!("unsat"),
        },
        Command::Equiv { first, second } => {
            let (a, b) = (read_quantifier_free(&first)?, read_quantifier_free(&second)?);
            match equiv_witness(&a, &b, &Budget::unlimited())? {
                None => println!("equivalent"),
                Some(m) => println!("not equivalent\n{m}"),
            }
        }
        Command::Gen(g) => {
            let p = GenParams {
                num_vars: g.vars,
                depth: g.depth,
                coeff_min: g.coeff_min,
                coeff_max: g.coeff_max,
                quantifier_prob: g.quant_prob,
                seed: g.seed,
            };
            let f = gen_random(&p)?;
            let names: Vec<String> = gen_vars(p.num_vars).iter().map(ToString::to_string).collect();
            println!("(declare-vars {})\n{f}", names.join(" "));
        }
        Command::Bench { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("cannot read {}", config.display()))?;
            let base = config.parent().unwrap_or(Path::new("."));
            let cfg = BenchConfig::parse(&text, base).with_context(|| format!("{}", config.display()))?;
            let records = harness::bench_run_with(&cfg, |r| {
                eprintln!(
                    "{} {} {} {}ms",
                    r.instance,
                    r.algorithm.name(),
                    r.outcome.name(),
                    r.wall.as_millis()
                );
            })?;
            let file = fs::File::create(&out).with_context(|| format!("cannot write {}", out.display()))?;
            harness::write_csv(&records, file)?;
            print!("{}", harness::summary_table(&records, &cfg.algorithms));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let limit = e
                .chain()
                .any(|c| c.downcast_ref::<QeError>().is_some_and(QeError::is_limit));
            ExitCode::from(if limit { 2 } else { 1 })
        }
    }
}
