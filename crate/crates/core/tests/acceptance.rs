//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Statistical criteria run at the production sample size (10⁴ states) with
//! fixed seeds. Where several seeds are used, the seeds are `BASE_SEED..BASE_SEED+5`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::process::ExitCode;
use std::time::Instant;

use pqc_core::exec::{mean_and_std, Execution};
use pqc_core::expressibility::{haar_sample_fidelities, tdesign_deviation};
use pqc_core::harness::{run_sweep, std_of_std_error};
use pqc_core::{
    compile, cue_mean, cue_std_q1, ensemble_stats, haar_fidelity_moment, run_gates, scott_q, Ansatz, CircuitSpec,
    ExperimentConfig, ExpressibilityResult, HaarSampler, Interval, ParameterSampler, Quantity, StateVector, Topology,
};
use rand::{Rng, SeedableRng};

const STATES: usize = 10_000;
const BINS: usize = 75;
const BASE_SEED: u64 = 1000;
const SEEDS: u64 = 5;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn spec(a: Ansatz, t: Topology, n: usize, l: usize) -> CircuitSpec {
    CircuitSpec::new(a, t, n, l).unwrap()
}

fn sampler(spec: &CircuitSpec, seed: u64) -> ParameterSampler {
    ParameterSampler::for_spec(spec, seed, Interval::default())
}

fn kl(spec: &CircuitSpec, seed: u64) -> f64 {
    ExpressibilityResult::compute(spec, STATES, BINS, seed, Interval::default(), Execution::Parallel).unwrap().kl_nats
}

/// Median and population std of KL over the fixed seed set.
fn kl_over_seeds(spec: &CircuitSpec) -> (f64, f64) {
    let mut values: Vec<f64> = (0..SEEDS).map(|s| kl(spec, BASE_SEED + s)).collect();
    let (_, sd) = mean_and_std(&values);
    values.sort_by(f64::total_cmp);
    (values[values.len() / 2], sd)
}

fn ghz(n: usize) -> StateVector {
    let mut s = StateVector::zero(n).unwrap();
    s.apply_h(0).unwrap();
    for q in 1..n {
        s.apply_cnot(0, q).unwrap();
    }
    s
}

fn epr6() -> StateVector {
    let mut s = StateVector::zero(6).unwrap();
    for pair in [0, 2, 4] {
        s.apply_h(pair).unwrap();
        s.apply_cnot(pair, pair + 1).unwrap();
    }
    s
}

fn c01_exact_entanglement() -> Outcome {
    let cases = [
        ("Q1(GHZ6)", scott_q(&ghz(6), 1).unwrap(), 1.0),
        ("Q1(EPR6)", scott_q(&epr6(), 1).unwrap(), 1.0),
        ("Q2(GHZ6)", scott_q(&ghz(6), 2).unwrap(), 2.0 / 3.0),
        ("Q2(EPR6)", scott_q(&epr6(), 2).unwrap(), 4.0 / 5.0),
    ];
    let worst = cases.iter().map(|(_, v, e)| (v - e).abs()).fold(0.0, f64::max);
    let detail = cases.iter().map(|(n, v, _)| format!("{n}={v:.15}")).collect::<Vec<_>>().join(" ");
    Outcome::new(worst <= 1e-12, format!("{detail} max|err|={worst:.1e}"))
}

/// Gate-count formulas by topology: (CNOTs, A1 total, A2 total, params for A1, params for A2) per layer.
fn table_formulas(t: Topology, n: usize) -> (usize, usize, usize, usize, usize) {
    let cnots = match t {
        Topology::NoConnections => 0,
        Topology::Linear | Topology::Star => n - 1,
        Topology::Ring => n,
        Topology::AllToAll => n * (n - 1) / 2,
    };
    (cnots, cnots + 2 * n, cnots + 4 * n, 2 * n, 4 * n)
}

fn c02_gate_accounting() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for t in Topology::ALL {
        for n in 2..=8 {
            if n < t.min_qubits() {
                continue;
            }
            for l in 1..=5 {
                let (cnot, tot1, tot2, p1, p2) = table_formulas(t, n);
                let a1 = compile(&spec(Ansatz::A1, t, n, l)).unwrap();
                let a2 = compile(&spec(Ansatz::A2, t, n, l)).unwrap();
                let got = (a1.cnot_count(), a1.len(), a2.len(), a1.n_params(), a2.n_params(), a2.cnot_count());
                let want = (cnot * l, tot1 * l, tot2 * l, p1 * l, p2 * l, cnot * l);
                if got != want || a1.rotation_count() != p1 * l || a2.rotation_count() != p2 * l {
                    mismatches.push(format!("{t}:{n}:{l}"));
                }
                checked += 1;
            }
        }
    }
    Outcome::new(mismatches.is_empty(), format!("{checked} (topology,n,l) cases, mismatches={mismatches:?}"))
}

fn c03_tdesign_table() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, lo, hi) in [(4usize, 6.5e-3, 6.8e-3), (8, 1.6e-4, 1.7e-4)] {
        let mut stats = Vec::new();
        for t in Topology::ALL {
            let s = spec(Ansatz::A1, t, n, 1);
            let reps: Vec<f64> = (0..20)
                .map(|r| tdesign_deviation(&s, 2, STATES, &sampler(&s, BASE_SEED + r), Execution::Parallel).unwrap())
                .collect();
            let (mean, sd) = mean_and_std(&reps);
            let in_band = mean >= lo - 2.0 * sd && mean <= hi + 2.0 * sd;
            pass &= in_band;
            parts.push(format!(
                "n={n} {t}: ({:.2}±{:.2})e{}{}",
                mean / scale(n),
                sd / scale(n),
                exp(n),
                if in_band { "" } else { " OUT" }
            ));
            stats.push((mean, sd));
        }
        let mut worst_ratio: f64 = 0.0;
        for i in 0..stats.len() {
            for j in i + 1..stats.len() {
                let combined = (stats[i].1.powi(2) + stats[j].1.powi(2)).sqrt();
                worst_ratio = worst_ratio.max((stats[i].0 - stats[j].0).abs() / combined);
            }
        }
        pass &= worst_ratio < 2.0;
        parts.push(format!("n={n} max pairwise gap={worst_ratio:.2} combined std"));
    }
    fn scale(n: usize) -> f64 {
        if n == 4 {
            1e-3
        } else {
            1e-4
        }
    }
    fn exp(n: usize) -> &'static str {
        if n == 4 {
            "-3"
        } else {
            "-4"
        }
    }
    Outcome::new(pass, parts.join("; "))
}

fn c04_no_connections_saturation() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [4, 8] {
        for l in 2..=5 {
            let (median, _) = kl_over_seeds(&spec(Ansatz::A1, Topology::NoConnections, n, l));
            let ok = (0.18..=0.27).contains(&median);
            pass &= ok;
            parts.push(format!("n={n},l={l}:{median:.3}{}", if ok { "" } else { " OUT" }));
        }
    }
    Outcome::new(pass, format!("median KL over {SEEDS} seeds, band [0.18,0.27]: {}", parts.join(" ")))
}

fn c05_small_dimension_saturation() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [3, 4] {
        for t in Topology::CONNECTED {
            let (median, _) = kl_over_seeds(&spec(Ansatz::A1, t, n, 5));
            let ok = (2e-3..=1e-2).contains(&median);
            pass &= ok;
            parts.push(format!("n={n} {t}:{median:.2e}{}", if ok { "" } else { " OUT" }));
        }
    }
    Outcome::new(pass, format!("median KL over {SEEDS} seeds, band [2e-3,1e-2]: {}", parts.join(" ")))
}

fn c06_depth_hierarchy() -> Outcome {
    let stats: HashMap<Topology, (f64, f64)> =
        Topology::CONNECTED.iter().map(|&t| (t, kl_over_seeds(&spec(Ansatz::A1, t, 8, 5)))).collect();
    let (ring, lin, ata, star) =
        (stats[&Topology::Ring], stats[&Topology::Linear], stats[&Topology::AllToAll], stats[&Topology::Star]);
    let order = ring.0 < lin.0.min(ata.0) && lin.0.max(ata.0) < star.0;
    let combined = (lin.1.powi(2) + ata.1.powi(2)).sqrt();
    let close = (lin.0 - ata.0).abs() < 2.0 * combined;
    Outcome::new(
        order && close,
        format!(
            "median KL RIN={:.3e} LIN={:.3e} ATA={:.3e} ST={:.3e}; |LIN−ATA|={:.2e} vs 2σ={:.2e}",
            ring.0,
            lin.0,
            ata.0,
            star.0,
            (lin.0 - ata.0).abs(),
            2.0 * combined
        ),
    )
}

fn c07_linear_matches_all_to_all() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for n in [4, 6, 8] {
        for l in [1, 3] {
            for m in [1, 2] {
                let run = |t| {
                    let s = spec(Ansatz::A1, t, n, l);
                    ensemble_stats(&s, m, STATES, &sampler(&s, BASE_SEED), Execution::Parallel).unwrap()
                };
                let (lin, ata) = (run(Topology::Linear), run(Topology::AllToAll));
                let combined = (lin.std_error().powi(2) + ata.std_error().powi(2)).sqrt();
                let z = (lin.mean - ata.mean).abs() / combined;
                worst = worst.max(z);
                pass &= z < 3.0;
                parts.push(format!("n{n}l{l}m{m}:{z:.2}"));
            }
        }
    }
    Outcome::new(pass, format!("|Δ|/combined SE (max {worst:.2}): {}", parts.join(" ")))
}

fn c08_ansatz_equivalence() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(BASE_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = Topology::ALL[rng.random_range(0..5)];
        let n = rng.random_range(4..=8);
        let l = rng.random_range(1..=3);
        let mut angle = || rng.random_range(0.0..std::f64::consts::TAU);
        let a1 = compile(&spec(Ansatz::A1, t, n, l)).unwrap();
        let params: Vec<f64> = (0..a1.n_params()).map(|_| angle()).collect();
        let extra: Vec<f64> = (0..2 * n).map(|_| angle()).collect();
        let base = a1.run(&params).unwrap();
        let mut appended = base.clone();
        for q in 0..n {
            appended.apply_rx(q, extra[2 * q]).unwrap();
            appended.apply_ry(q, extra[2 * q + 1]).unwrap();
        }
        for m in 1..=n / 2 {
            worst = worst.max((scott_q(&base, m).unwrap() - scott_q(&appended, m).unwrap()).abs());
        }
        // Single-layer A2 is A1 followed by exactly such a pass.
        let a2 = compile(&spec(Ansatz::A2, t, n, 1)).unwrap();
        let first = &params[..2 * n];
        let a2_params: Vec<f64> = first.iter().chain(&extra).copied().collect();
        let a1_one = compile(&spec(Ansatz::A1, t, n, 1)).unwrap().run(first).unwrap();
        let a2_one = a2.run(&a2_params).unwrap();
        for m in 1..=n / 2 {
            worst = worst.max((scott_q(&a1_one, m).unwrap() - scott_q(&a2_one, m).unwrap()).abs());
        }
    }
    Outcome::new(worst < 1e-10, format!("100 draws, max |ΔQ_m| = {worst:.1e}"))
}

fn c09_ring_reaches_cue() -> Outcome {
    let cue = cue_mean(8, 1).unwrap();
    let run = |t| {
        let s = spec(Ansatz::A1, t, 8, 5);
        ensemble_stats(&s, 1, STATES, &sampler(&s, BASE_SEED), Execution::Parallel).unwrap()
    };
    let (ring, star) = (run(Topology::Ring), run(Topology::Star));
    let ring_gap = (ring.mean - cue).abs();
    let star_gap = (star.mean - cue).abs();
    Outcome::new(
        ring_gap < 0.01 && star_gap > ring_gap,
        format!("CUE={cue:.5} RIN={:.5} (gap {ring_gap:.4}) ST={:.5} (gap {star_gap:.4})", ring.mean, star.mean),
    )
}

fn c10_ghz_construction() -> Outcome {
    let seq = compile(&spec(Ansatz::A1, Topology::AllToAll, 4, 1)).unwrap();
    let mut params = vec![0.0; seq.n_params()];
    params[0] = -FRAC_PI_2;
    params[1] = -FRAC_PI_4;
    // rotations (8 gates) then the qubit-0-controlled CNOTs (3 gates)
    let step1 = run_gates(&seq.gates()[..11], &params, 4).unwrap();
    let q_step1 = scott_q(&step1, 1).unwrap();
    let q_out = scott_q(&seq.run(&params).unwrap(), 1).unwrap();
    Outcome::new(
        (q_step1 - 1.0).abs() < 1e-10 && (q_out - 0.5).abs() < 1e-10,
        format!("Q1 after step 1 = {q_step1:.12}, final Q1 = {q_out:.12}"),
    )
}

fn c11_oracle_consistency() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [3, 4, 5] {
        let haar = HaarSampler::new(BASE_SEED, n).unwrap();
        let q1 = Execution::Parallel.map(STATES, |i| scott_q(&haar.state(i as u64), 1).unwrap());
        let (mean, sd) = mean_and_std(&q1);
        let z_mean = (mean - cue_mean(n, 1).unwrap()).abs() / (sd / (STATES as f64).sqrt());
        let z_std = (sd - cue_std_q1(n).unwrap()).abs() / std_of_std_error(&q1);
        pass &= z_mean < 3.0 && z_std < 3.0;
        parts.push(format!("n={n}: mean z={z_mean:.2} std z={z_std:.2}"));
    }
    for n in [2usize, 3] {
        let haar = HaarSampler::new(BASE_SEED + 1, n).unwrap();
        let fids = haar_sample_fidelities(&haar, 2 * STATES, Execution::Parallel).unwrap();
        for t in [1u32, 2] {
            let powered: Vec<f64> = fids.iter().map(|f| f.powi(t as i32)).collect();
            let (mean, sd) = mean_and_std(&powered);
            let z = (mean - haar_fidelity_moment(1 << n, t)).abs() / (sd / (fids.len() as f64).sqrt());
            pass &= z < 3.0;
            parts.push(format!("d={} t={t}: z={z:.2}", 1 << n));
        }
    }
    Outcome::new(pass, parts.join("; "))
}

fn c12_determinism() -> Outcome {
    let specs = pqc_core::config::sweep_specs(
        &[Ansatz::A1, Ansatz::A2],
        &[Topology::Linear, Topology::Ring, Topology::Star],
        4..=5,
        1..=2,
    );
    let mut config = ExperimentConfig::new(
        specs,
        vec![Quantity::Expressibility, Quantity::Entanglement { m: 2 }, Quantity::TDesign { t: 2 }],
    );
    config.n_states = 2000;
    config.repetitions = 2;
    config.master_seed = BASE_SEED;
    let values = |workers: Option<usize>, execution: Execution| {
        let mut c = config.clone();
        c.workers = workers;
        c.execution = execution;
        run_sweep(&c).unwrap().rows.into_iter().map(|r| r.value).collect::<Vec<f64>>()
    };
    let reference = values(Some(1), Execution::Parallel);
    let mut worst: f64 = 0.0;
    for (w, e) in [(Some(4), Execution::Parallel), (Some(8), Execution::Parallel), (None, Execution::Sequential)] {
        let other = values(w, e);
        assert_eq!(other.len(), reference.len());
        for (a, b) in reference.iter().zip(&other) {
            worst = worst.max((a - b).abs());
        }
    }
    Outcome::new(worst <= 1e-12, format!("{} rows, workers 1/4/8/sequential, max |Δ| = {worst:.1e}", reference.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1 exact entanglement values", c01_exact_entanglement),
        ("2 gate accounting", c02_gate_accounting),
        ("3 2-design deviation table", c03_tdesign_table),
        ("4 no-connections saturation", c04_no_connections_saturation),
        ("5 small-dimension saturation", c05_small_dimension_saturation),
        ("6 depth hierarchy", c06_depth_hierarchy),
        ("7 linear = all-to-all entanglement", c07_linear_matches_all_to_all),
        ("8 ansatz equivalence", c08_ansatz_equivalence),
        ("9 ring reaches CUE", c09_ring_reaches_cue),
        ("10 GHZ construction", c10_ghz_construction),
        ("11 oracle consistency", c11_oracle_consistency),
        ("12 determinism", c12_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(&format!("{f} "))) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] criterion {name} ({:.1}s): {}", start.elapsed().as_secs_f64(), outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all criteria passed");
        ExitCode::SUCCESS
    }
}
