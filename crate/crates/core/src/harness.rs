//! Sweep orchestration and result emission.
//!
//! Each `(spec, quantity, repetition)` becomes one [`ResultRow`]. Repetition
//! `r` runs with seed `master_seed + r`, which is also the row's `seed`
//! column, so any row can be recomputed on its own.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::circuit::CircuitSpec;
use crate::config::ExperimentConfig;
use crate::entanglement::{cue_mean, cue_std_q1, sample_scott_q, scott_q, EnsembleEntanglementStats};
use crate::error::{invalid, Error, Result};
use crate::exec::{mean_and_std, with_workers, Execution};
use crate::expressibility::{
    haar_fidelity_moment, haar_sample_fidelities, kl_expressibility, sample_fidelities,
    tdesign_deviation_from_fidelities,
};
use crate::oracle::HaarSampler;
use crate::sampling::ParameterSampler;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    Expressibility,
    Entanglement { m: usize },
    TDesign { t: u32 },
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Expressibility => f.write_str("expressibility"),
            Quantity::Entanglement { m } => write!(f, "entanglement_m{m}"),
            Quantity::TDesign { t } => write!(f, "tdesign_t{t}"),
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid(format!("unknown quantity {s:?}"));
        if s == "expressibility" {
            return Ok(Quantity::Expressibility);
        }
        if let Some(m) = s.strip_prefix("entanglement_m") {
            return Ok(Quantity::Entanglement { m: m.parse().map_err(|_| bad())? });
        }
        if let Some(t) = s.strip_prefix("tdesign_t") {
            return Ok(Quantity::TDesign { t: t.parse().map_err(|_| bad())? });
        }
        Err(bad())
    }
}

/// One output line: `spec,quantity,value,dispersion,n_samples,seed,wall_ms`.
///
/// `dispersion` is the population standard deviation of `Q_m` for
/// entanglement rows, the standard error of `mean(F^t)` for t-design rows and
/// empty for expressibility rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub spec: String,
    pub quantity: String,
    pub value: f64,
    pub dispersion: Option<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub wall_ms: f64,
}

pub type RowKey = (String, String, u64);

impl ResultRow {
    pub fn key(&self) -> RowKey {
        (self.spec.clone(), self.quantity.clone(), self.seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowFailure {
    pub spec: String,
    pub quantity: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<RowFailure>,
    pub skipped: usize,
}

impl SweepOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            2
        }
    }
}

/// Computes one row's value, dispersion and sample count.
pub fn evaluate(
    spec: &CircuitSpec,
    quantity: Quantity,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<(f64, Option<f64>, usize)> {
    spec.validate()?;
    let sampler = ParameterSampler::for_spec(spec, seed, config.interval);
    let exec = config.execution;
    match quantity {
        Quantity::Expressibility => {
            let fids = sample_fidelities(spec, config.n_states, &sampler, exec)?;
            Ok((kl_expressibility(&fids, spec.dim(), config.n_bins)?, None, config.n_states))
        }
        Quantity::Entanglement { m } => {
            let values = sample_scott_q(spec, m, config.n_states, &sampler, exec)?;
            let stats = EnsembleEntanglementStats::from_values(&values, spec.n_qubits, m)?;
            Ok((stats.mean, Some(stats.std_dev), config.n_states))
        }
        Quantity::TDesign { t } => {
            let fids = sample_fidelities(spec, config.n_states, &sampler, exec)?;
            let deviation = tdesign_deviation_from_fidelities(&fids, spec.dim(), t)?;
            let powered: Vec<f64> = fids.iter().map(|f| f.powi(t as i32)).collect();
            let (_, sd) = mean_and_std(&powered);
            Ok((deviation, Some(sd / (fids.len() as f64).sqrt()), config.n_states))
        }
    }
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    run_sweep_resuming(config, &HashSet::new())
}

/// Like [`run_sweep`] but skips rows whose `(spec, quantity, seed)` is in `done`.
pub fn run_sweep_resuming(config: &ExperimentConfig, done: &HashSet<RowKey>) -> Result<SweepOutcome> {
    config.validate()?;
    with_workers(config.workers, || {
        let mut outcome = SweepOutcome::default();
        for spec in &config.specs {
            for &quantity in &config.quantities {
                for rep in 0..config.repetitions as u64 {
                    let seed = config.master_seed.wrapping_add(rep);
                    let key = (spec.to_string(), quantity.to_string(), seed);
                    if done.contains(&key) {
                        outcome.skipped += 1;
                        continue;
                    }
                    let start = Instant::now();
                    match evaluate(spec, quantity, config, seed) {
                        Ok((value, dispersion, n_samples)) => outcome.rows.push(ResultRow {
                            spec: key.0,
                            quantity: key.1,
                            value,
                            dispersion,
                            n_samples,
                            seed,
                            wall_ms: start.elapsed().as_secs_f64() * 1e3,
                        }),
                        Err(e) => outcome.failures.push(RowFailure {
                            spec: key.0,
                            quantity: key.1,
                            seed,
                            message: e.to_string(),
                        }),
                    }
                }
            }
        }
        outcome
    })
}

/// Mean and population standard deviation across repetitions.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub spec: String,
    pub quantity: String,
    pub mean: f64,
    pub std_dev: f64,
    pub count: usize,
}

/// Groups rows by `(spec, quantity)` in first-seen order.
pub fn summarize(rows: &[ResultRow]) -> Vec<Summary> {
    let mut groups: Vec<((String, String), Vec<f64>)> = Vec::new();
    for row in rows {
        let key = (row.spec.clone(), row.quantity.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, values)) => values.push(row.value),
            None => groups.push((key, vec![row.value])),
        }
    }
    groups
        .into_iter()
        .map(|((spec, quantity), values)| {
            let (mean, std_dev) = mean_and_std(&values);
            Summary { spec, quantity, mean, std_dev, count: values.len() }
        })
        .collect()
}

/// Haar-ensemble statistics for `n` qubits: sampled `Q_1` mean and standard
/// deviation next to their closed forms, and sampled fidelity moments
/// `t = 1, 2` next to the exact values. Sampled rows carry standard errors.
pub fn haar_reference(n: usize, n_states: usize, seed: u64, exec: Execution) -> Result<Vec<ResultRow>> {
    let start = Instant::now();
    let sampler = HaarSampler::new(seed, n)?;
    let label = format!("HAAR:{n}");
    let mut rows = Vec::new();
    let row = |quantity: String, value: f64, dispersion: Option<f64>, n_samples: usize| ResultRow {
        spec: label.clone(),
        quantity,
        value,
        dispersion,
        n_samples,
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    if n >= 2 {
        let q1 = exec.try_map(n_states, |i| scott_q(&sampler.state(i as u64), 1))?;
        let (mean, sd) = mean_and_std(&q1);
        let se = sd / (n_states as f64).sqrt();
        rows.push(row("q1_mean".into(), mean, Some(se), n_states));
        rows.push(row("q1_mean_exact".into(), cue_mean(n, 1)?, None, 0));
        rows.push(row("q1_std".into(), sd, Some(std_of_std_error(&q1)), n_states));
        rows.push(row("q1_std_exact".into(), cue_std_q1(n)?, None, 0));
    }
    // Fidelities use a disjoint stream so they do not reuse the Q_1 states.
    let fid_sampler = HaarSampler::new(seed.wrapping_add(1 << 32), n)?;
    let fids = haar_sample_fidelities(&fid_sampler, 2 * n_states, exec)?;
    for t in [1u32, 2] {
        let powered: Vec<f64> = fids.iter().map(|f| f.powi(t as i32)).collect();
        let (mean, sd) = mean_and_std(&powered);
        rows.push(row(format!("fidelity_moment_t{t}"), mean, Some(sd / (fids.len() as f64).sqrt()), fids.len()));
        rows.push(row(format!("fidelity_moment_t{t}_exact"), haar_fidelity_moment(1 << n, t), None, 0));
    }
    Ok(rows)
}

/// Delta-method standard error of a sample standard deviation,
/// `sqrt((μ₄ − σ⁴) / (4σ²N))`.
pub fn std_of_std_error(values: &[f64]) -> f64 {
    let (mean, sd) = mean_and_std(values);
    let fourth: Vec<f64> = values.iter().map(|x| (x - mean).powi(4)).collect();
    let mu4 = crate::exec::mean(&fourth);
    let var = sd * sd;
    ((mu4 - var * var) / (4.0 * var * values.len() as f64)).max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// Guess from the file extension; anything but `.jsonl`/`.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(invalid(format!("unknown format {s:?} (expected csv or jsonl)"))),
        }
    }
}

pub const CSV_HEADER: &str = "spec,quantity,value,dispersion,n_samples,seed,wall_ms";

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.into(), source }
}

fn write_rows<W: Write>(writer: W, rows: &[ResultRow], format: Format, header: bool, path: &Path) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(writer);
            for row in rows {
                w.serialize(row).map_err(|source| Error::Csv { path: path.into(), source })?;
            }
            if header && rows.is_empty() {
                w.write_record(CSV_HEADER.split(',')).map_err(|source| Error::Csv { path: path.into(), source })?;
            }
            w.flush().map_err(io_err(path))
        }
        Format::Jsonl => {
            let mut w = BufWriter::new(writer);
            for (i, row) in rows.iter().enumerate() {
                serde_json::to_writer(&mut w, row).map_err(|source| Error::Json {
                    path: path.into(),
                    line: i + 1,
                    source,
                })?;
                w.write_all(b"\n").map_err(io_err(path))?;
            }
            w.flush().map_err(io_err(path))
        }
    }
}

/// Writes `rows` with a header to an arbitrary sink such as stdout.
pub fn write_results<W: Write>(writer: W, rows: &[ResultRow], format: Format) -> Result<()> {
    write_rows(writer, rows, format, true, Path::new("<stream>"))
}

/// Writes `rows` to `path`, replacing any existing file.
pub fn emit_results(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_rows(file, rows, format, true, path)
}

/// Appends `rows` to `path`, writing the CSV header only for a new or empty file.
pub fn append_results(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
    write_rows(file, rows, format, fresh, path)
}

pub fn load_results(path: &Path, format: Format) -> Result<Vec<ResultRow>> {
    let file = File::open(path).map_err(io_err(path))?;
    match format {
        Format::Csv => csv::Reader::from_reader(file)
            .deserialize()
            .map(|r| r.map_err(|source| Error::Csv { path: path.into(), source }))
            .collect(),
        Format::Jsonl => {
            let mut rows = Vec::new();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err(path))?;
                if line.trim().is_empty() {
                    continue;
                }
                rows.push(serde_json::from_str(&line).map_err(|source| Error::Json {
                    path: path.into(),
                    line: i + 1,
                    source,
                })?);
            }
            Ok(rows)
        }
    }
}
