//! Deterministic random streams and circuit-parameter sampling.
//!
//! A [`StreamKey`] is `SHA-256(seed_le ‖ label)`. It seeds a ChaCha8
//! generator and every sample index selects its own ChaCha stream, so sample
//! `i` always sees the same numbers no matter which worker draws it.
//!
//! Circuit ensembles use the spec string (`A1:RIN:6:3`) as the label.
//! Repetition `r` of a run with master seed `s` uses seed `s + r`.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::circuit::CircuitSpec;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey([u8; 32]);

impl StreamKey {
    pub fn derive(seed: u64, label: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update(label.as_bytes());
        Self(hasher.finalize().into())
    }

    pub fn for_spec(seed: u64, spec: &CircuitSpec) -> Self {
        Self::derive(seed, &spec.to_string())
    }

    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    /// Generator for sample `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.0);
        rng.set_stream(index);
        rng
    }
}

/// Half-open sampling interval `[lo, hi)` in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("interval [{lo}, {hi}) is empty or not finite")));
        }
        Ok(Self { lo, hi })
    }

    /// `[−π, π)`.
    pub fn symmetric() -> Self {
        Self { lo: -PI, hi: PI }
    }
}

impl Default for Interval {
    /// `[0, 2π)`.
    fn default() -> Self {
        Self { lo: 0.0, hi: 2.0 * PI }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

/// Parses `lo:hi`, where each bound is a number, optionally suffixed or
/// replaced by `pi` (`-pi:pi`, `0:2pi`, `0:6.283`).
impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| invalid(format!("interval {s:?} must look like lo:hi")))?;
        Self::new(parse_angle(lo)?, parse_angle(hi)?)
    }
}

fn parse_angle(raw: &str) -> Result<f64> {
    let s = raw.trim().to_ascii_lowercase();
    let bad = || invalid(format!("cannot parse angle {raw:?}"));
    match s.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*');
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(k * PI)
        }
        None => s.parse::<f64>().map_err(|_| bad()),
    }
}

/// Source of circuit parameter vectors, addressed by sample index.
#[derive(Clone, Debug)]
pub enum ParameterSampler {
    Uniform {
        key: StreamKey,
        interval: Interval,
    },
    /// Every parameter takes the same value; used for degenerate ensembles.
    Constant(f64),
}

impl ParameterSampler {
    pub fn uniform(key: StreamKey, interval: Interval) -> Self {
        ParameterSampler::Uniform { key, interval }
    }

    /// Uniform sampler for `spec` under `seed`.
    pub fn for_spec(spec: &CircuitSpec, seed: u64, interval: Interval) -> Self {
        Self::uniform(StreamKey::for_spec(seed, spec), interval)
    }

    pub fn constant(value: f64) -> Self {
        ParameterSampler::Constant(value)
    }

    pub fn draw_into(&self, index: u64, out: &mut [f64]) {
        match self {
            ParameterSampler::Uniform { key, interval } => {
                let mut rng = key.rng(index);
                let dist = Uniform::new(interval.lo, interval.hi).expect("validated interval");
                out.iter_mut().for_each(|p| *p = dist.sample(&mut rng));
            }
            ParameterSampler::Constant(v) => out.fill(*v),
        }
    }

    pub fn draw(&self, index: u64, n_params: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_params];
        self.draw_into(index, &mut out);
        out
    }
}
