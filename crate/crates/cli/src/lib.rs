//! Argument parsing and dispatch for the `rwalk` binary.
//!
//! Settings come from built-in defaults, then an optional TOML config file
//! (`--config`), then explicit flags; later sources win.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use rayleigh_walk::oracles;
use rayleigh_walk::verification::{
    render_reports, run_additivity_suite, run_farther_estimate, run_lemma_suite, run_oracle_suite, run_rayleigh_suite,
    run_return_estimate, run_theorem_suite, ReportFormat, SuiteReport,
};
use rayleigh_walk::{
    ComparisonSpec, DistanceSource, Length, QuadratureConfig, SimConfig, StepDistribution, StreamSeed, WalkSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const MAX_DEFAULT_SHARDS: usize = 64;

const AFTER_HELP: &str = "\
Distributions: constant:C  uniform:LO,HI  exp:RATE  lognormal:MU,SIGMA  twopoint:V1,V2,P
Lemma sources: a distribution, or walk:K:<distribution> for the distance of a K-step walk.

Reports list one row per check with the columns
  suite,check,m,n,dist,trials,seed,expected,p_hat,ci_low,ci_high,level,ties,passed
as CSV (--format csv) or JSON lines (--format jsonl).

A --config file is TOML with any of the keys dist, m, n, s, radius, trials, seed,
shards, level, format, out; flags given on the command line override it.

Exit status: 0 all checks passed, 1 a statistical check failed, 2 usage, config or I/O error.";

#[derive(Debug, Parser)]
#[command(name = "rwalk", version, about = "Random-flight estimators, oracles and verification suites", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One Monte Carlo estimate: Pr(D_m > D_n) with --m/--n, or Pr(D_n < radius) with --n/--radius.
    Estimate(Flags),
    /// Pr(n unit steps end within distance 1) against 1/(n+1); n = 2..10 unless --n is given.
    Rayleigh(Flags),
    /// Pr(D_m > D_n) against m/(m+n) over a sweep of pairs and laws, or the single --m/--n pair.
    Theorem(Flags),
    /// Pr(A > B+C) + Pr(B > A+C) + Pr(C > A+B) = 1 for one triple (--dist once or three times) or a default set.
    Lemma(Flags),
    /// Complement, additivity and linearity of p_i = Pr(D_i > D_{s-i}); s = 3..5 unless --s is given.
    Additivity(Flags),
    /// Closed-form values (--m/--n, or --n alone), quadrature values with --quadrature, or the oracle self-check.
    Oracle(Flags),
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// Step-length law; repeatable where a command takes several.
    #[arg(long = "dist", value_name = "DIST")]
    dist: Vec<String>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    /// Total step count for the additivity suite.
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    radius: Option<f64>,
    /// Trials per estimate [default: 1000000].
    #[arg(long)]
    trials: Option<u64>,
    /// Root seed, optionally with a child path (42 or 42/0/7). Required for simulations.
    #[arg(long)]
    seed: Option<String>,
    /// Work partitions [default: logical CPUs, at most 64]. Never changes results.
    #[arg(long)]
    shards: Option<usize>,
    /// Confidence level of each interval [default: 0.999].
    #[arg(long)]
    level: Option<f64>,
    /// csv or jsonl [default: csv].
    #[arg(long)]
    format: Option<String>,
    /// Output file, or - for standard output [default: -].
    #[arg(long)]
    out: Option<String>,
    /// TOML file with default settings.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// oracle: evaluate by quadrature instead of the closed form.
    #[arg(long)]
    quadrature: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    dist: Option<DistList>,
    m: Option<u32>,
    n: Option<u32>,
    s: Option<u32>,
    radius: Option<f64>,
    trials: Option<u64>,
    seed: Option<SeedValue>,
    shards: Option<usize>,
    level: Option<f64>,
    format: Option<String>,
    out: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DistList {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SeedValue {
    Number(u64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandName {
    Estimate,
    Rayleigh,
    Theorem,
    Lemma,
    Additivity,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Stdout,
    File(PathBuf),
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub dists: Vec<String>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub s: Option<u32>,
    pub radius: Option<f64>,
    pub trials: u64,
    pub seed: Option<StreamSeed>,
    pub shards: usize,
    pub level: f64,
    pub format: ReportFormat,
    pub out: Output,
    pub quadrature: bool,
}

#[derive(Debug)]
pub enum CliError {
    /// `--help` or `--version`: print and exit 0.
    Display(String),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Display(_) => EXIT_OK,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Display(s) | CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl From<rayleigh_walk::Error> for CliError {
    fn from(e: rayleigh_walk::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn usage_err(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn default_shards() -> usize {
    std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .clamp(1, MAX_DEFAULT_SHARDS)
}

/// Parses `argv` (including the program name) into a validated config.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Display(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    })?;
    let (command, flags) = match cli.command {
        Command::Estimate(f) => (CommandName::Estimate, f),
        Command::Rayleigh(f) => (CommandName::Rayleigh, f),
        Command::Theorem(f) => (CommandName::Theorem, f),
        Command::Lemma(f) => (CommandName::Lemma, f),
        Command::Additivity(f) => (CommandName::Additivity, f),
        Command::Oracle(f) => (CommandName::Oracle, f),
    };
    let file = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage_err(format!("cannot read config {}: {e}", path.display())))?;
            toml::from_str::<ConfigFile>(&text)
                .map_err(|e| usage_err(format!("invalid config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let dists = if !flags.dist.is_empty() {
        flags.dist
    } else {
        match file.dist {
            Some(DistList::One(d)) => vec![d],
            Some(DistList::Many(ds)) => ds,
            None => Vec::new(),
        }
    };
    let seed = match flags.seed {
        Some(text) => Some(text.parse::<StreamSeed>()?),
        None => match file.seed {
            Some(SeedValue::Number(root)) => Some(StreamSeed::new(root)),
            Some(SeedValue::Text(text)) => Some(text.parse::<StreamSeed>()?),
            None => None,
        },
    };
    let format = flags
        .format
        .or(file.format)
        .map(|f| f.parse::<ReportFormat>())
        .transpose()?
        .unwrap_or(ReportFormat::Csv);
    let out = match flags.out.or(file.out).as_deref() {
        None | Some("-") => Output::Stdout,
        Some(path) => Output::File(PathBuf::from(path)),
    };
    let config = RunConfig {
        command,
        dists,
        m: flags.m.or(file.m),
        n: flags.n.or(file.n),
        s: flags.s.or(file.s),
        radius: flags.radius.or(file.radius),
        trials: flags
            .trials
            .or(file.trials)
            .unwrap_or(rayleigh_walk::montecarlo::DEFAULT_TRIALS),
        seed,
        shards: flags.shards.or(file.shards).unwrap_or_else(default_shards),
        level: flags
            .level
            .or(file.level)
            .unwrap_or(rayleigh_walk::montecarlo::DEFAULT_LEVEL),
        format,
        out,
        quadrature: flags.quadrature,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.trials == 0 {
        return Err(usage_err("--trials must be >= 1"));
    }
    if cfg.shards == 0 {
        return Err(usage_err("--shards must be >= 1"));
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(usage_err(format!("--level must lie in (0, 1), got {}", cfg.level)));
    }
    if let Some(r) = cfg.radius {
        if !(r > 0.0 && r.is_finite()) {
            return Err(usage_err(format!("--radius must be finite and > 0, got {r}")));
        }
    }
    let simulates = !matches!(cfg.command, CommandName::Oracle);
    if simulates && cfg.seed.is_none() {
        return Err(usage_err("--seed is required (directly or via --config)"));
    }
    match cfg.command {
        CommandName::Estimate => {
            if cfg.radius.is_some() {
                if cfg.m.is_some() {
                    return Err(usage_err("estimate takes either --m/--n or --n/--radius"));
                }
                if cfg.n.is_none() {
                    return Err(usage_err("estimate with --radius needs --n"));
                }
            } else {
                let (Some(m), Some(n)) = (cfg.m, cfg.n) else {
                    return Err(usage_err("estimate needs --m and --n (or --n and --radius)"));
                };
                if m == 0 && n == 0 {
                    return Err(usage_err("estimate --m 0 --n 0 defines no event"));
                }
            }
            if cfg.dists.len() > 1 {
                return Err(usage_err("estimate takes a single --dist"));
            }
        }
        CommandName::Rayleigh => {
            if let Some(n) = cfg.n {
                if n <= 1 {
                    return Err(usage_err(format!("rayleigh needs n > 1, got {n}")));
                }
            }
        }
        CommandName::Theorem => match (cfg.m, cfg.n) {
            (Some(m), Some(n)) if m as u64 + n as u64 <= 2 => {
                return Err(usage_err(format!("theorem needs m + n > 2, got {m} + {n}")));
            }
            (Some(_), None) | (None, Some(_)) => return Err(usage_err("theorem takes --m and --n together")),
            _ => {}
        },
        CommandName::Lemma => {
            if !matches!(cfg.dists.len(), 0 | 1 | 3) {
                return Err(usage_err("lemma takes --dist once (used for all three) or three times"));
            }
        }
        CommandName::Additivity => {
            if let Some(s) = cfg.s {
                if s <= 2 {
                    return Err(usage_err(format!("additivity needs s > 2, got {s}")));
                }
            }
        }
        CommandName::Oracle => {}
    }
    Ok(())
}

fn parse_dists(texts: &[String]) -> Result<Vec<StepDistribution>, CliError> {
    texts
        .iter()
        .map(|t| t.parse::<StepDistribution>().map_err(CliError::from))
        .collect()
}

fn single_dist(cfg: &RunConfig) -> Result<StepDistribution, CliError> {
    Ok(parse_dists(&cfg.dists)?.pop().unwrap_or_else(StepDistribution::unit))
}

fn sim_config(cfg: &RunConfig) -> SimConfig {
    let seed = cfg.seed.clone().unwrap_or_default();
    SimConfig::new(cfg.trials, seed)
        .with_shards(cfg.shards)
        .with_level(cfg.level)
}

pub fn default_theorem_pairs() -> Vec<(u32, u32)> {
    (3..=8u32).flat_map(|s| (1..s).map(move |m| (m, s - m))).collect()
}

pub fn default_theorem_dists() -> Vec<StepDistribution> {
    vec![
        StepDistribution::unit(),
        StepDistribution::UniformInterval { lo: 0.5, hi: 1.5 },
        StepDistribution::Exponential { rate: 1.0 },
        StepDistribution::LogNormal { mu: 0.0, sigma: 0.5 },
        StepDistribution::TwoPoint {
            v1: 1.0,
            v2: 3.0,
            p: 0.25,
        },
    ]
}

fn default_lemma_triples() -> Vec<[DistanceSource; 3]> {
    let c = |v| DistanceSource::Draw(StepDistribution::Constant(v));
    vec![
        [c(1.0), c(1.0), c(1.0)],
        [c(5.0), c(1.0), c(1.0)],
        [
            DistanceSource::Walk(WalkSpec::new(2, StepDistribution::unit())),
            DistanceSource::Draw(StepDistribution::Exponential { rate: 1.0 }),
            DistanceSource::Draw(StepDistribution::UniformInterval { lo: 0.5, hi: 1.5 }),
        ],
    ]
}

enum Outcome {
    Reports(Vec<SuiteReport>),
    Value(f64),
}

fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sim = sim_config(cfg);
    let reports = match cfg.command {
        CommandName::Estimate => {
            let dist = single_dist(cfg)?;
            let report = match (cfg.radius, cfg.m, cfg.n) {
                (Some(r), _, Some(n)) => run_return_estimate(&WalkSpec::new(n, dist), Length::step(r)?, &sim)?,
                (None, Some(m), Some(n)) => run_farther_estimate(&ComparisonSpec::new(m, n, dist)?, &sim)?,
                _ => unreachable!("validated"),
            };
            vec![report]
        }
        CommandName::Rayleigh => {
            let n_values: Vec<u32> = match cfg.n {
                Some(n) => vec![n],
                None => (2..=10).collect(),
            };
            vec![run_rayleigh_suite(&n_values, &sim)?]
        }
        CommandName::Theorem => {
            let pairs = match (cfg.m, cfg.n) {
                (Some(m), Some(n)) => vec![(m, n)],
                _ => default_theorem_pairs(),
            };
            let dists = if cfg.dists.is_empty() {
                default_theorem_dists()
            } else {
                parse_dists(&cfg.dists)?
            };
            vec![run_theorem_suite(&pairs, &dists, &sim)?]
        }
        CommandName::Lemma => {
            let sources = cfg
                .dists
                .iter()
                .map(|t| t.parse::<DistanceSource>())
                .collect::<Result<Vec<_>, _>>()?;
            let triples = match sources.as_slice() {
                [] => default_lemma_triples(),
                [one] => vec![[*one, *one, *one]],
                [a, b, c] => vec![[*a, *b, *c]],
                _ => unreachable!("validated"),
            };
            vec![run_lemma_suite(&triples, &sim)?]
        }
        CommandName::Additivity => {
            let s_values: Vec<u32> = match cfg.s {
                Some(s) => vec![s],
                None => (3..=5).collect(),
            };
            let dists = if cfg.dists.is_empty() {
                vec![StepDistribution::unit(), StepDistribution::Exponential { rate: 1.0 }]
            } else {
                parse_dists(&cfg.dists)?
            };
            let mut reports = Vec::new();
            for &s in &s_values {
                for (d, dist) in dists.iter().enumerate() {
                    let seed = sim.seed.child(s as u64).child(d as u64);
                    reports.push(run_additivity_suite(s, dist, &sim.with_seed(seed))?);
                }
            }
            reports
        }
        CommandName::Oracle => return oracle(cfg),
    };
    Ok(Outcome::Reports(reports))
}

fn oracle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let quad = QuadratureConfig::default();
    let unit = Length::step(1.0)?;
    match (cfg.m, cfg.n) {
        (Some(m), Some(n)) => Ok(Outcome::Value(if cfg.quadrature {
            oracles::quadrature_farther_probability(m, n, unit, &quad)?
        } else {
            oracles::exact_farther_probability(m, n)?
        })),
        (None, Some(n)) => Ok(Outcome::Value(if cfg.quadrature {
            let radius = Length::step(cfg.radius.unwrap_or(1.0))?;
            oracles::quadrature_return_probability(n as usize, &vec![unit; n as usize], radius, &quad)?
        } else {
            oracles::exact_return_probability(n)?
        })),
        (Some(_), None) => Err(usage_err("oracle --m needs --n")),
        (None, None) => Ok(Outcome::Reports(vec![run_oracle_suite(
            &[(1, 2), (2, 2), (1, 3), (2, 3), (1, 4)],
            &quad,
        )?])),
    }
}

/// Executes `cfg`, writing results to its output and diagnostics to `stderr`.
/// Returns the process exit code.
pub fn run_with(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match execute(cfg) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "rwalk: {e}");
            return EXIT_USAGE;
        }
    };
    let (bytes, code) = match outcome {
        Outcome::Value(v) => (format!("{v}\n").into_bytes(), EXIT_OK),
        Outcome::Reports(reports) => {
            let refs: Vec<&SuiteReport> = reports.iter().collect();
            let bytes = match render_reports(&refs, cfg.format) {
                Ok(b) => b,
                Err(e) => {
                    let _ = writeln!(stderr, "rwalk: {e}");
                    return EXIT_USAGE;
                }
            };
            let failed: usize = reports.iter().map(|r| r.failed).sum();
            let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
            let _ = writeln!(stderr, "rwalk: {} of {checks} checks failed", failed);
            (bytes, if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    };
    let written = match &cfg.out {
        Output::Stdout => stdout.write_all(&bytes).and_then(|_| stdout.flush()),
        Output::File(path) => fs::write(path, &bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "rwalk: cannot write output: {e}");
        return EXIT_USAGE;
    }
    code
}

pub fn run(cfg: &RunConfig) -> i32 {
    run_with(cfg, &mut io::stdout().lock(), &mut io::stderr().lock())
}
