//! Experiment configuration: a TOML file and/or command-line overrides are
//! collected into [`SweepSettings`] and resolved into an [`ExperimentConfig`].
//!
//! ```toml
//! ansatz = [1, 2]
//! topologies = ["lin", "rin", "ata"]
//! qubits = "4..8"
//! layers = "1..5"
//! quantity = "all"      # expressibility | entanglement | tdesign | all
//! order = 1
//! t = 2
//! samples = 10000
//! bins = 75
//! reps = 1
//! seed = 7
//! interval = "0:2pi"
//! workers = 8
//! ```

use serde::Deserialize;
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;

use crate::circuit::{Ansatz, CircuitSpec, Topology};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::expressibility::DEFAULT_BINS;
use crate::harness::{Format, Quantity};
use crate::sampling::Interval;

pub const DEFAULT_STATES: usize = 10_000;
pub const DEFAULT_TDESIGN_REPS: usize = 20;
pub const QUBIT_RANGE: RangeInclusive<usize> = 2..=12;
pub const LAYER_RANGE: RangeInclusive<usize> = 1..=64;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Candidate specs; invalid ones fail per row.
    pub specs: Vec<CircuitSpec>,
    pub quantities: Vec<Quantity>,
    pub n_states: usize,
    pub n_bins: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    pub interval: Interval,
    pub workers: Option<usize>,
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(specs: Vec<CircuitSpec>, quantities: Vec<Quantity>) -> Self {
        Self {
            specs,
            quantities,
            n_states: DEFAULT_STATES,
            n_bins: DEFAULT_BINS,
            repetitions: 1,
            master_seed: 0,
            interval: Interval::default(),
            workers: None,
            execution: Execution::Parallel,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.specs.is_empty() {
            return fail("no circuit specs selected".into());
        }
        if self.quantities.is_empty() {
            return fail("no quantities selected".into());
        }
        if self.n_states < 2 || !self.n_states.is_multiple_of(2) {
            return fail(format!("samples must be even and ≥ 2, got {}", self.n_states));
        }
        if self.n_bins < 2 {
            return fail(format!("bins must be ≥ 2, got {}", self.n_bins));
        }
        if self.repetitions == 0 {
            return fail("reps must be ≥ 1".into());
        }
        if self.workers == Some(0) {
            return fail("workers must be ≥ 1".into());
        }
        for spec in &self.specs {
            if !QUBIT_RANGE.contains(&spec.n_qubits) {
                return fail(format!("{spec}: qubit count outside {QUBIT_RANGE:?}"));
            }
            if !LAYER_RANGE.contains(&spec.n_layers) {
                return fail(format!("{spec}: layer count outside {LAYER_RANGE:?}"));
            }
        }
        Ok(())
    }
}

/// Cartesian product in ansatz, topology, qubit, layer order.
pub fn sweep_specs(
    ansatze: &[Ansatz],
    topologies: &[Topology],
    qubits: RangeInclusive<usize>,
    layers: RangeInclusive<usize>,
) -> Vec<CircuitSpec> {
    let mut specs = Vec::new();
    for &ansatz in ansatze {
        for &topology in topologies {
            for n_qubits in qubits.clone() {
                for n_layers in layers.clone() {
                    specs.push(CircuitSpec { ansatz, topology, n_qubits, n_layers });
                }
            }
        }
    }
    specs
}

/// `a`, `a..b` or `a..=b`, both ends inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::Config(format!("bad range {s:?} (expected a or a..b)"));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    let range = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => {
            let v = num(s)?;
            v..=v
        }
    };
    if range.is_empty() {
        return Err(bad());
    }
    Ok(range)
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Token {
    Int(u64),
    Str(String),
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Int(v) => v.to_string(),
            Token::Str(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(Token),
    Many(Vec<Token>),
}

impl OneOrMany {
    fn items(&self) -> Vec<String> {
        match self {
            OneOrMany::One(t) => vec![t.text()],
            OneOrMany::Many(v) => v.iter().map(Token::text).collect(),
        }
    }
}

/// Every field optional, so file values and CLI flags can be layered.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    pub ansatz: Option<OneOrMany>,
    pub topologies: Option<OneOrMany>,
    pub qubits: Option<Token>,
    pub layers: Option<Token>,
    /// Explicit spec strings, used instead of the sweep ranges when given.
    pub specs: Option<Vec<String>>,
    pub quantity: Option<OneOrMany>,
    pub order: Option<usize>,
    pub t: Option<u32>,
    pub samples: Option<usize>,
    pub bins: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub interval: Option<String>,
    pub workers: Option<usize>,
    pub out: Option<String>,
    pub format: Option<String>,
}

macro_rules! layer {
    ($base:ident, $over:ident, $($field:ident),*) => {
        $( if $over.$field.is_some() { $base.$field = $over.$field; } )*
    };
}

impl SweepSettings {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(mut self, over: SweepSettings) -> Self {
        layer!(
            self, over, ansatz, topologies, qubits, layers, specs, quantity, order, t, samples, bins, reps, seed,
            interval, workers, out, format
        );
        self
    }

    pub fn specs(&self) -> Result<Vec<CircuitSpec>> {
        if let Some(list) = &self.specs {
            return list.iter().map(|s| parse_unvalidated_spec(s)).collect();
        }
        let ansatze = match &self.ansatz {
            Some(a) => a.items().iter().map(|s| Ansatz::from_str(s).map_err(config)).collect::<Result<Vec<_>>>()?,
            None => vec![Ansatz::A1],
        };
        let topologies = match &self.topologies {
            Some(t) => expand_topologies(&t.items())?,
            None => Topology::ALL.to_vec(),
        };
        let qubits = self.qubits.as_ref().ok_or_else(|| Error::Config("qubits not set".into()))?;
        let layers = self.layers.as_ref().map(Token::text).unwrap_or_else(|| "1".into());
        Ok(sweep_specs(&ansatze, &topologies, parse_range(&qubits.text())?, parse_range(&layers)?))
    }

    pub fn quantities(&self) -> Result<Vec<Quantity>> {
        let m = self.order.unwrap_or(1);
        let t = self.t.unwrap_or(2);
        let names = self.quantity.as_ref().map(OneOrMany::items).unwrap_or_else(|| vec!["all".into()]);
        let mut out = Vec::new();
        for name in names {
            match name.to_ascii_lowercase().as_str() {
                "expressibility" | "express" => out.push(Quantity::Expressibility),
                "entanglement" | "entangle" => out.push(Quantity::Entanglement { m }),
                "tdesign" => out.push(Quantity::TDesign { t }),
                "all" => out.extend([Quantity::Expressibility, Quantity::Entanglement { m }, Quantity::TDesign { t }]),
                other => out.push(other.parse().map_err(config)?),
            }
        }
        out.dedup();
        Ok(out)
    }

    pub fn format(&self) -> Result<Option<Format>> {
        self.format.as_deref().map(|f| f.parse().map_err(config)).transpose()
    }

    pub fn into_config(&self) -> Result<ExperimentConfig> {
        let quantities = self.quantities()?;
        let only_tdesign = quantities.iter().all(|q| matches!(q, Quantity::TDesign { .. }));
        let default_reps = if only_tdesign { DEFAULT_TDESIGN_REPS } else { 1 };
        let config = ExperimentConfig {
            specs: self.specs()?,
            quantities,
            n_states: self.samples.unwrap_or(DEFAULT_STATES),
            n_bins: self.bins.unwrap_or(DEFAULT_BINS),
            repetitions: self.reps.unwrap_or(default_reps),
            master_seed: self.seed.unwrap_or(0),
            interval: match &self.interval {
                Some(s) => s.parse().map_err(config)?,
                None => Interval::default(),
            },
            workers: self.workers,
            execution: Execution::Parallel,
        };
        config.validate()?;
        Ok(config)
    }
}

fn config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn expand_topologies(items: &[String]) -> Result<Vec<Topology>> {
    let mut out = Vec::new();
    for item in items {
        match item.to_ascii_lowercase().as_str() {
            "all" => out.extend(Topology::ALL),
            "connected" => out.extend(Topology::CONNECTED),
            s => out.push(s.parse().map_err(config)?),
        }
    }
    Ok(out)
}

/// Parses `ansatz:topology:n:l` without the topology minimum check, so that
/// sweeps can report such specs as row failures.
fn parse_unvalidated_spec(s: &str) -> Result<CircuitSpec> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let [a, t, n, l] = parts.as_slice() else {
        return Err(Error::Config(format!("bad spec {s:?} (expected ansatz:topology:n:l)")));
    };
    let num = |x: &str| x.parse::<usize>().map_err(|_| Error::Config(format!("bad spec {s:?}")));
    Ok(CircuitSpec {
        ansatz: a.parse().map_err(config)?,
        topology: t.parse().map_err(config)?,
        n_qubits: num(n)?,
        n_layers: num(l)?,
    })
}
