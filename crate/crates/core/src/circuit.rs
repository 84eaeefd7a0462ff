//! Topologies, the two ansatz families and their compilation to gate lists.
//!
//! One layer of ansatz A1 is an RX·RY pass over every qubit followed by the
//! topology's CNOT block. A2 appends a second RX·RY pass after the block.
//! Parameter slots are numbered in emission order: layer-major,
//! qubit-ascending, RX before RY.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::state::{Gate, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Topology {
    NoConnections,
    Linear,
    Ring,
    Star,
    AllToAll,
}

impl Topology {
    pub const ALL: [Topology; 5] =
        [Topology::NoConnections, Topology::Linear, Topology::Ring, Topology::Star, Topology::AllToAll];

    pub const CONNECTED: [Topology; 4] = [Topology::Linear, Topology::Ring, Topology::Star, Topology::AllToAll];

    /// Short code used in spec strings and on the command line.
    pub fn code(self) -> &'static str {
        match self {
            Topology::NoConnections => "NC",
            Topology::Linear => "LIN",
            Topology::Ring => "RIN",
            Topology::Star => "ST",
            Topology::AllToAll => "ATA",
        }
    }

    pub fn min_qubits(self) -> usize {
        match self {
            Topology::Ring => 3,
            _ => 2,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        if n < self.min_qubits() {
            return Err(invalid(format!(
                "topology {} needs at least {} qubits, got {n}",
                self.code(),
                self.min_qubits()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nc" | "none" | "noconnections" => Ok(Topology::NoConnections),
            "lin" | "linear" => Ok(Topology::Linear),
            "rin" | "ring" => Ok(Topology::Ring),
            "st" | "star" => Ok(Topology::Star),
            "ata" | "alltoall" | "all-to-all" => Ok(Topology::AllToAll),
            _ => Err(invalid(format!("unknown topology {s:?} (expected nc, lin, rin, st or ata)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ansatz {
    A1,
    A2,
}

impl Ansatz {
    /// Rotation passes per layer.
    fn passes(self) -> usize {
        match self {
            Ansatz::A1 => 1,
            Ansatz::A2 => 2,
        }
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ansatz::A1 => f.write_str("A1"),
            Ansatz::A2 => f.write_str("A2"),
        }
    }
}

impl FromStr for Ansatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" | "1" => Ok(Ansatz::A1),
            "A2" | "2" => Ok(Ansatz::A2),
            _ => Err(invalid(format!("unknown ansatz {s:?} (expected 1 or 2)"))),
        }
    }
}

/// A circuit family: ansatz, topology, width and depth.
///
/// The canonical text form is `ansatz:topology:n:l`, e.g. `A1:RIN:6:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircuitSpec {
    pub ansatz: Ansatz,
    pub topology: Topology,
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl CircuitSpec {
    pub fn new(ansatz: Ansatz, topology: Topology, n_qubits: usize, n_layers: usize) -> Result<Self> {
        let spec = Self { ansatz, topology, n_qubits, n_layers };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::InvalidSpec(format!("{self}: need at least 2 qubits")));
        }
        if self.n_qubits > crate::state::MAX_QUBITS {
            return Err(Error::InvalidSpec(format!("{self}: too many qubits")));
        }
        if self.n_layers == 0 {
            return Err(Error::InvalidSpec(format!("{self}: need at least 1 layer")));
        }
        self.topology.check(self.n_qubits).map_err(|e| Error::InvalidSpec(format!("{self}: {e}")))
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.ansatz.passes() * self.n_qubits * self.n_layers
    }
}

impl fmt::Display for CircuitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.ansatz, self.topology, self.n_qubits, self.n_layers)
    }
}

impl FromStr for CircuitSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [ansatz, topology, n, l] = parts.as_slice() else {
            return Err(Error::InvalidSpec(format!("{s:?}: expected ansatz:topology:n:l")));
        };
        let parse = |field: &str, what: &str| {
            field.parse::<usize>().map_err(|_| Error::InvalidSpec(format!("{s:?}: bad {what} {field:?}")))
        };
        Self::new(ansatz.parse()?, topology.parse()?, parse(n, "qubit count")?, parse(l, "layer count")?)
    }
}

impl Serialize for CircuitSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CircuitSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// CNOT couplings of one layer as `(control, target)` pairs, in emission order.
///
/// The lower-listed vertex controls. Linear and Ring chain `i → i+1` from the
/// bottom pair upwards (Ring closes with `n−1 → 0`), Star uses qubit 0 as the
/// controlling hub, and AllToAll emits `i → j` for every `i < j`
/// lexicographically. With this ordering the AllToAll block and the Linear
/// block are the same unitary.
pub fn connection_edges(topology: Topology, n: usize) -> Result<Vec<(usize, usize)>> {
    topology.check(n)?;
    let edges = match topology {
        Topology::NoConnections => Vec::new(),
        Topology::Linear => (0..n - 1).rev().map(|i| (i, i + 1)).collect(),
        Topology::Ring => (0..n - 1).rev().map(|i| (i, i + 1)).chain([(n - 1, 0)]).collect(),
        Topology::Star => (1..n).map(|i| (0, i)).collect(),
        Topology::AllToAll => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
    };
    Ok(edges)
}

/// Compiled, immutable gate list for one [`CircuitSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GateSequence {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl GateSequence {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.param_slot().is_some()).count()
    }

    /// Runs the full sequence on `|0…0⟩`.
    pub fn run(&self, params: &[f64]) -> Result<StateVector> {
        if params.len() != self.n_params {
            return Err(invalid(format!("expected {} parameters, got {}", self.n_params, params.len())));
        }
        run_gates(&self.gates, params, self.n_qubits)
    }

    /// Runs the sequence on an existing state, in place.
    pub fn apply_to(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(invalid(format!("expected {} parameters, got {}", self.n_params, params.len())));
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: state.n_qubits(), right: self.n_qubits });
        }
        self.gates.iter().try_for_each(|g| state.apply_gate(g, params))
    }
}

/// Applies `gates` to `|0…0⟩` on `n` qubits.
pub fn run_gates(gates: &[Gate], params: &[f64], n: usize) -> Result<StateVector> {
    let mut state = StateVector::zero(n)?;
    for gate in gates {
        state.apply_gate(gate, params)?;
    }
    Ok(state)
}

/// Free-function form of [`GateSequence::run`].
pub fn run_circuit(seq: &GateSequence, params: &[f64]) -> Result<StateVector> {
    seq.run(params)
}

pub fn compile(spec: &CircuitSpec) -> Result<GateSequence> {
    spec.validate()?;
    let n = spec.n_qubits;
    let edges = connection_edges(spec.topology, n)?;
    let per_layer = spec.ansatz.passes() * 2 * n + edges.len();
    let mut gates = Vec::with_capacity(per_layer * spec.n_layers);
    let mut slot = 0;
    let mut rotation_pass = |gates: &mut Vec<Gate>| {
        for q in 0..n {
            gates.push(Gate::rx(q, slot));
            gates.push(Gate::ry(q, slot + 1));
            slot += 2;
        }
    };
    for _ in 0..spec.n_layers {
        rotation_pass(&mut gates);
        gates.extend(edges.iter().map(|&(control, target)| Gate::Cnot { control, target }));
        if spec.ansatz == Ansatz::A2 {
            rotation_pass(&mut gates);
        }
    }
    Ok(GateSequence { n_qubits: n, n_params: spec.parameter_count(), gates })
}
