use std::collections::HashSet;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pqc_core::config::{parse_range, OneOrMany, SweepSettings, Token};
use pqc_core::harness::{self, haar_reference, run_sweep_resuming, summarize, RowKey};
use pqc_core::{Execution, ExperimentConfig, Format, ResultRow, SweepOutcome};

/// Expressibility and entanglement benchmarks for layered parameterized circuits.
#[derive(Parser, Debug)]
#[command(name = "pqc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// KL-divergence expressibility against the Haar fidelity distribution.
    Express(Common),
    /// Mean and spread of the Scott measure Q_m.
    Entangle {
        #[command(flatten)]
        common: Common,
        /// Subset size m of the Scott measure.
        #[arg(long, short = 'm')]
        order: Option<usize>,
    },
    /// Frame-potential deviation from a Haar t-design, repeated over seeds.
    Tdesign {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<u32>,
    },
    /// Any combination of quantities over a spec grid, usually from a config file.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// expressibility, entanglement, tdesign or all (repeatable).
        #[arg(long, short = 'q')]
        quantity: Vec<String>,
        #[arg(long, short = 'm')]
        order: Option<usize>,
        #[arg(long)]
        t: Option<u32>,
    },
    /// Sampled Haar statistics next to their closed forms.
    HaarRef(HaarArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// TOML file with the same keys as the long flags; flags take precedence.
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    /// 1 or 2 (repeatable).
    #[arg(long, short = 'a')]
    ansatz: Vec<String>,
    /// nc, lin, rin, st, ata, connected or all (repeatable).
    #[arg(long = "topology", short = 'T')]
    topologies: Vec<String>,
    /// Explicit `ansatz:topology:n:l` specs instead of the ranges (repeatable).
    #[arg(long = "spec")]
    specs: Vec<String>,
    /// Qubit count or inclusive range, e.g. `4..8`.
    #[arg(long, short = 'n')]
    qubits: Option<String>,
    /// Layer count or inclusive range, e.g. `1..5`.
    #[arg(long, short = 'l')]
    layers: Option<String>,
    #[arg(long, short = 's')]
    samples: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter interval `lo:hi` in radians, e.g. `-pi:pi`.
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    /// Output file; existing rows are kept and skipped.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// csv or jsonl; defaults from the output extension.
    #[arg(long)]
    format: Option<String>,
    #[arg(long, short = 'w')]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct HaarArgs {
    #[arg(long, short = 'n', default_value = "2..8")]
    qubits: String,
    #[arg(long, short = 's', default_value_t = pqc_core::config::DEFAULT_STATES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, short = 'w')]
    workers: Option<usize>,
}

impl Common {
    fn settings(&self) -> SweepSettings {
        let many = |v: &[String]| (!v.is_empty()).then(|| OneOrMany::Many(v.iter().cloned().map(Token::Str).collect()));
        SweepSettings {
            ansatz: many(&self.ansatz),
            topologies: many(&self.topologies),
            qubits: self.qubits.clone().map(Token::Str),
            layers: self.layers.clone().map(Token::Str),
            specs: (!self.specs.is_empty()).then(|| self.specs.clone()),
            samples: self.samples,
            bins: self.bins,
            reps: self.reps,
            seed: self.seed,
            interval: self.interval.clone(),
            workers: self.workers,
            out: self.out.as_ref().map(|p| p.display().to_string()),
            format: self.format.clone(),
            ..SweepSettings::default()
        }
    }

    /// File settings, overridden by `overrides`, overridden by the flags.
    fn resolve(&self, overrides: SweepSettings) -> Result<SweepSettings> {
        let base = match &self.config {
            Some(path) => SweepSettings::from_file(path)?,
            None => SweepSettings::default(),
        };
        Ok(base.merged(overrides).merged(self.settings()))
    }
}

struct Sink {
    path: Option<PathBuf>,
    format: Format,
}

impl Sink {
    fn new(out: Option<&str>, format: Option<&str>) -> Result<Self> {
        let path = out.map(PathBuf::from);
        let format = match (format, &path) {
            (Some(f), _) => f.parse()?,
            (None, Some(p)) => Format::from_path(p),
            (None, None) => Format::Csv,
        };
        Ok(Self { path, format })
    }

    fn existing_keys(&self) -> Result<HashSet<RowKey>> {
        match &self.path {
            Some(p) if p.exists() && std::fs::metadata(p)?.len() > 0 => {
                let rows = pqc_core::load_results(p, self.format)
                    .with_context(|| format!("reading existing results from {}", p.display()))?;
                Ok(rows.iter().map(ResultRow::key).collect())
            }
            _ => Ok(HashSet::new()),
        }
    }

    fn write(&self, rows: &[ResultRow]) -> Result<()> {
        match &self.path {
            Some(p) => harness::append_results(rows, self.format, p)?,
            None => {
                let stdout = io::stdout();
                harness::write_results(stdout.lock(), rows, self.format)?;
            }
        }
        Ok(())
    }
}

fn quantity_settings(names: &[&str], order: Option<usize>, t: Option<u32>) -> SweepSettings {
    SweepSettings {
        quantity: (!names.is_empty())
            .then(|| OneOrMany::Many(names.iter().map(|s| Token::Str(s.to_string())).collect())),
        order,
        t,
        ..SweepSettings::default()
    }
}

fn report(outcome: &SweepOutcome) {
    for f in &outcome.failures {
        eprintln!("failed: {} {} seed={}: {}", f.spec, f.quantity, f.seed, f.message);
    }
    eprintln!("{} rows written, {} skipped, {} failed", outcome.rows.len(), outcome.skipped, outcome.failures.len());
}

fn run_settings(settings: SweepSettings, show_summary: bool) -> Result<i32> {
    let config: ExperimentConfig = settings.into_config()?;
    let sink = Sink::new(settings.out.as_deref(), settings.format.as_deref())?;
    let done = sink.existing_keys()?;
    let outcome = run_sweep_resuming(&config, &done)?;
    sink.write(&outcome.rows)?;
    if show_summary {
        for s in summarize(&outcome.rows) {
            eprintln!("{} {}: {:.4e} ± {:.2e} over {} runs", s.spec, s.quantity, s.mean, s.std_dev, s.count);
        }
    }
    report(&outcome);
    Ok(outcome.exit_code())
}

fn run_haar(args: &HaarArgs) -> Result<i32> {
    if args.samples < 2 || !args.samples.is_multiple_of(2) {
        bail!("samples must be even and ≥ 2, got {}", args.samples);
    }
    let qubits = parse_range(&args.qubits)?;
    if *qubits.start() < 1 || *qubits.end() > pqc_core::state::MAX_QUBITS {
        bail!("qubits must lie in 1..={}", pqc_core::state::MAX_QUBITS);
    }
    let sink = Sink::new(args.out.as_ref().and_then(|p| p.to_str()), args.format.as_deref())?;
    let done = sink.existing_keys()?;
    let rows = pqc_core::exec::with_workers(args.workers, || -> Result<Vec<ResultRow>> {
        let mut rows = Vec::new();
        for n in qubits {
            rows.extend(haar_reference(n, args.samples, args.seed, Execution::Parallel)?);
        }
        Ok(rows)
    })??;
    let total = rows.len();
    let fresh: Vec<ResultRow> = rows.into_iter().filter(|r| !done.contains(&r.key())).collect();
    sink.write(&fresh)?;
    eprintln!("{} rows written, {} skipped, 0 failed", fresh.len(), total - fresh.len());
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Express(common) => {
            run_settings(common.resolve(quantity_settings(&["expressibility"], None, None))?, false)
        }
        Command::Entangle { common, order } => {
            run_settings(common.resolve(quantity_settings(&["entanglement"], order, None))?, false)
        }
        Command::Tdesign { common, t } => run_settings(common.resolve(quantity_settings(&["tdesign"], None, t))?, true),
        Command::Sweep { common, quantity, order, t } => {
            let names: Vec<&str> = quantity.iter().map(String::as_str).collect();
            let base = match &common.config {
                Some(path) => SweepSettings::from_file(path)?,
                None => SweepSettings::default(),
            };
            let settings = base.merged(quantity_settings(&names, order, t)).merged(common.settings());
            run_settings(settings, false)
        }
        Command::HaarRef(args) => run_haar(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let _ = io::stdout().flush();
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
