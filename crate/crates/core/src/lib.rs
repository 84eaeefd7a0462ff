//! Randomness characterization of hardware-topology parameterized circuits.
//!
//! Builds the RX·RY + CNOT ansatz families over five connectivity graphs,
//! simulates them on dense statevectors and estimates expressibility (KL
//! divergence to the Haar fidelity law), Scott entanglement statistics and the
//! frame-potential 2-design deviation.
//!
//! ```
//! use pqc_core::{compile, scott_q, CircuitSpec};
//!
//! let spec: CircuitSpec = "A1:ATA:4:1".parse().unwrap();
//! let seq = compile(&spec).unwrap();
//! let mut params = vec![0.0; seq.n_params()];
//! params[0] = -std::f64::consts::FRAC_PI_2;
//! params[1] = -std::f64::consts::FRAC_PI_4;
//! let out = seq.run(&params).unwrap();
//! assert!((scott_q(&out, 1).unwrap() - 0.5).abs() < 1e-10);
//! ```

pub mod circuit;
pub mod config;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod expressibility;
pub mod harness;
pub mod oracle;
pub mod sampling;
pub mod state;

pub use circuit::{compile, connection_edges, run_circuit, run_gates, Ansatz, CircuitSpec, GateSequence, Topology};
pub use config::{ExperimentConfig, SweepSettings};
pub use entanglement::{
    cue_mean, cue_std_q1, ensemble_stats, reduced_purity, sample_scott_q, scott_q, subset_purities,
    EnsembleEntanglementStats, SubsetPurity,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use expressibility::{
    haar_fidelity_moment, kl_expressibility, sample_fidelities, tdesign_deviation, ExpressibilityResult,
    FidelityHistogram,
};
pub use harness::{emit_results, load_results, run_sweep, Format, Quantity, ResultRow, SweepOutcome};
pub use oracle::{brute_force_reduced_density, haar_state, HaarSampler};
pub use sampling::{Interval, ParameterSampler, StreamKey};
pub use state::{fidelity, Axis, Gate, StateVector};
