//! Benchmark suites: generated or file-based instances run under per-instance limits,
//! reported as CSV and as a solved/average/limit summary.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{parse, Formula, ParseError};
use crate::gen::{gen_random, GenError, GenParams};
use crate::limits::{Budget, QeError};
use crate::lw::lw_eliminate_all_within;
use crate::qe::{eliminate_all_with, ConjunctOrder, ElimOptions, ElimStats, Variant};

pub const CSV_HEADER: [&str; 7] = [
    "instance",
    "algorithm",
    "outcome",
    "wall_ms",
    "iterations",
    "smt_calls",
    "output_atoms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Main,
    Mod1,
    Mod2,
    Lw,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Main, Algorithm::Mod1, Algorithm::Mod2, Algorithm::Lw];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Main => "main",
            Algorithm::Mod1 => "mod1",
            Algorithm::Mod2 => "mod2",
            Algorithm::Lw => "lw",
        }
    }

    pub fn variant(self) -> Option<Variant> {
        match self {
            Algorithm::Main => Some(Variant::Main),
            Algorithm::Mod1 => Some(Variant::Mod1),
            Algorithm::Mod2 => Some(Variant::Mod2),
            Algorithm::Lw => None,
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Algorithm, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected main, mod1, mod2 or lw)"))
    }
}

/// Settings shared by every algorithm run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub timeout: Option<Duration>,
    pub max_atoms: Option<usize>,
    pub verify: bool,
    pub order: ConjunctOrder,
    pub theory: Option<Formula>,
}

impl RunOptions {
    fn budget(&self) -> Budget {
        let mut b = Budget::unlimited();
        if let Some(t) = self.timeout {
            b = b.with_timeout(t);
        }
        if let Some(m) = self.max_atoms {
            b = b.with_max_atoms(m);
        }
        b
    }
}

/// Eliminates every quantifier of `f` with the chosen algorithm.
pub fn run_algorithm(f: &Formula, alg: Algorithm, opts: &RunOptions) -> Result<(Formula, ElimStats), QeError> {
    let budget = opts.budget();
    match alg.variant() {
        Some(variant) => {
            let eo = ElimOptions {
                variant,
                order: opts.order,
                verify: opts.verify,
                budget,
            };
            eliminate_all_with(f, opts.theory.as_ref(), &eo)
        }
        None => Ok((lw_eliminate_all_within(f, &budget)?, ElimStats::default())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved,
    Timeout,
    OutOfMemoryEst,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Solved => "solved",
            Outcome::Timeout => "timeout",
            Outcome::OutOfMemoryEst => "out-of-memory-est",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub outcome: Outcome,
    pub wall: Duration,
    pub stats: ElimStats,
    pub output_atoms: usize,
    /// The eliminated formula when solved.
    pub output: Option<Formula>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    /// Generator template; its seed is replaced by each of `seeds`.
    pub generator: Option<GenParams>,
    pub seeds: std::ops::Range<u64>,
    pub files: Vec<PathBuf>,
    pub timeout: Duration,
    pub max_atoms: Option<usize>,
    pub verify: bool,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            algorithms: Algorithm::ALL.to_vec(),
            generator: None,
            seeds: 0..0,
            files: Vec::new(),
            timeout: Duration::from_secs(300),
            max_atoms: None,
            verify: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("{instance} ({algorithm}): {source}")]
    Engine {
        instance: String,
        algorithm: &'static str,
        source: QeError,
    },
}

impl BenchConfig {
    /// Reads `key = value` lines; `#` starts a comment. Relative file paths are taken
    /// relative to `base`.
    ///
    /// Keys: `algorithms` (comma list), `vars`, `depth`, `coeff_min`, `coeff_max`,
    /// `quant_prob` (`p/q` or decimal), `seeds` (`a..b` or a count), `files` (comma
    /// list), `timeout_ms`, `max_atoms`, `verify`. Giving `depth` enables generation.
    pub fn parse(text: &str, base: &Path) -> Result<BenchConfig, ConfigError> {
        let mut cfg = BenchConfig::default();
        let mut gen = GenParams {
            num_vars: 7,
            depth: 0,
            coeff_min: -10,
            coeff_max: 10,
            quantifier_prob: (1, 4),
            seed: 0,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Syntax { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| {
                v.parse::<i64>()
                    .map_err(|_| err(format!("`{key}` needs an integer, found `{v}`")))
            };
            match key {
                "algorithms" => {
                    cfg.algorithms = list(value)
                        .map(|a| a.parse::<Algorithm>().map_err(err))
                        .collect::<Result<_, _>>()?
                }
                "vars" => gen.num_vars = int(value)? as usize,
                "depth" => gen.depth = int(value)? as u32,
                "coeff_min" => gen.coeff_min = int(value)?,
                "coeff_max" => gen.coeff_max = int(value)?,
                "quant_prob" => gen.quantifier_prob = parse_probability(value).map_err(err)?,
                "seeds" => {
                    cfg.seeds = match value.split_once("..") {
                        Some((a, b)) => int(a)? as u64..int(b)? as u64,
                        None => 0..int(value)? as u64,
                    }
                }
                "files" => cfg.files = list(value).map(|p| base.join(p)).collect(),
                "timeout_ms" => cfg.timeout = Duration::from_millis(int(value)? as u64),
                "max_atoms" => cfg.max_atoms = Some(int(value)? as usize),
                "verify" => {
                    cfg.verify = value
                        .parse()
                        .map_err(|_| err(format!("`verify` needs true or false, found `{value}`")))?
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if gen.depth > 0 {
            gen.validate()?;
            cfg.generator = Some(gen);
        }
        Ok(cfg)
    }

    /// Instance ids and formulas, generated ones first, in seed order.
    pub fn instances(&self) -> Result<Vec<(String, Formula)>, HarnessError> {
        let mut out = Vec::new();
        if let Some(g) = &self.generator {
            for seed in self.seeds.clone() {
                let p = GenParams { seed, ..g.clone() };
                out.push((format!("gen-v{}-d{}-s{}", p.num_vars, p.depth, seed), gen_random(&p)?));
            }
        }
        for path in &self.files {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            let f = parse(&text).map_err(|source| HarnessError::Parse {
                path: path.clone(),
                source,
            })?;
            let id = path
                .file_stem()
                .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
            out.push((id, f));
        }
        Ok(out)
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// `p/q` or a decimal in `[0, 1]`, as a fraction.
pub fn parse_probability(s: &str) -> Result<(u64, u64), String> {
    let bad = || format!("invalid probability `{s}`");
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse().map_err(|_| bad())?,
            d.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            if frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let frac: u64 = if frac.is_empty() {
                0
            } else {
                frac.parse().map_err(|_| bad())?
            };
            (int * den + frac, den)
        }
    };
    if d == 0 || n > d {
        return Err(bad());
    }
    Ok((n, d))
}

/// Runs every algorithm on every instance, sequentially, in instance order.
pub fn bench_run(cfg: &BenchConfig) -> Result<Vec<BenchRecord>, HarnessError> {
    bench_run_with(cfg, |_| {})
}

/// [`bench_run`] calling `progress` after each record.
pub fn bench_run_with(
    cfg: &BenchConfig,
    mut progress: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>, HarnessError> {
    let opts = RunOptions {
        timeout: Some(cfg.timeout),
        max_atoms: cfg.max_atoms,
        verify: cfg.verify,
        ..RunOptions::default()
    };
    let mut records = Vec::new();
    for (id, f) in cfg.instances()? {
        for &alg in &cfg.algorithms {
            let r = run_one(&id, &f, alg, &opts)?;
            progress(&r);
            records.push(r);
        }
    }
    Ok(records)
}

/// One (instance, algorithm) record. Limit hits become outcomes; other failures are errors.
pub fn run_one(id: &str, f: &Formula, alg: Algorithm, opts: &RunOptions) -> Result<BenchRecord, HarnessError> {
    let started = Instant::now();
    let result = run_algorithm(f, alg, opts);
    let wall = started.elapsed();
    let (outcome, stats, output) = match result {
        Ok((out, stats)) => (Outcome::Solved, stats, Some(out)),
        Err(QeError::Timeout) => (Outcome::Timeout, ElimStats::default(), None),
        Err(QeError::ResourceLimit(_)) => (Outcome::OutOfMemoryEst, ElimStats::default(), None),
        Err(source) => {
            return Err(HarnessError::Engine {
                instance: id.to_string(),
                algorithm: alg.name(),
                source,
            })
        }
    };
    Ok(BenchRecord {
        instance: id.to_string(),
        algorithm: alg,
        outcome,
        wall,
        stats,
        output_atoms: output.as_ref().map_or(0, Formula::atom_count),
        output,
    })
}

pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.algorithm.name().to_string(),
            r.outcome.name().to_string(),
            r.wall.as_millis().to_string(),
            r.stats.iterations.to_string(),
            r.stats.smt_calls.to_string(),
            r.output_atoms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-algorithm totals: instances solved, mean time over solved ones, limit hits.
pub fn summary_table(records: &[BenchRecord], algorithms: &[Algorithm]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:>8} {:>12} {:>8} {:>8}",
        "algorithm", "Solved", "Avg (s)", "Timeout", "O-o-m"
    );
    for &alg in algorithms {
        let rs: Vec<&BenchRecord> = records.iter().filter(|r| r.algorithm == alg).collect();
        let solved: Vec<&&BenchRecord> = rs.iter().filter(|r| r.outcome == Outcome::Solved).collect();
        let avg = if solved.is_empty() {
            "-".to_string()
        } else {
            let total: Duration = solved.iter().map(|r| r.wall).sum();
            format!("{:.3}", total.as_secs_f64() / solved.len() as f64)
        };
        let count = |o: Outcome| rs.iter().filter(|r| r.outcome == o).count();
        let _ = writeln!(
            s,
            "{:<10} {:>8} {:>12} {:>8} {:>8}",
            alg.name(),
            solved.len(),
            avg,
            count(Outcome::Timeout),
            count(Outcome::OutOfMemoryEst)
        );
    }
    s
}
