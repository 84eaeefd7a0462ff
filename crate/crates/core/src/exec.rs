//! Sample fan-out. With the `parallel` feature, [`Execution::Parallel`] maps
//! over a rayon pool; without it every mode runs sequentially. Results are
//! always collected in index order, so reductions over them do not depend on
//! the worker count.

use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `f(0), …, f(n−1)` in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().with_min_len(16).map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`Execution::map`] but stops at the first error (by index order
    /// of the collected results).
    pub fn try_map<T, F>(self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}

/// Runs `f` on a pool with `workers` threads (`None` = rayon default).
/// Without the `parallel` feature `workers` is ignored.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = workers {
            builder = builder.num_threads(k.max(1));
        }
        let pool =
            builder.build().map_err(|e| crate::error::Error::Config(format!("cannot build worker pool: {e}")))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        Ok(f())
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Mean and population standard deviation `sqrt(⟨x²⟩ − ⟨x⟩²)`, evaluated
/// in two passes as `sqrt(⟨(x − ⟨x⟩)²⟩)`.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let m = mean(values);
    let deviations: Vec<f64> = values.iter().map(|x| (x - m) * (x - m)).collect();
    (m, mean(&deviations).sqrt())
}
