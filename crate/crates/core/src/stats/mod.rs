//! Mean and Student-t confidence intervals over repeated runs.

mod table;

use serde::{Deserialize, Serialize};

pub use table::{aggregate_runs, read_runs_dir, AggregateRow, AggregateTable};

use crate::Scalar;

/// Confidence level used throughout reporting.
pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("no samples")]
    EmptySamples,
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
    #[error("group `{0}` has no runs")]
    EmptyGroup(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: std::path::PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics<T = f64> {
    pub metric: String,
    pub n: usize,
    pub mean: T,
    /// `None` for a single sample.
    pub ci_half_width: Option<T>,
    pub samples: Vec<T>,
}

impl<T> RunStatistics<T> {
    pub fn named(mut self, metric: impl Into<String>) -> Self {
        self.metric = metric.into();
        self
    }
}

/// Quantile of Student's t distribution with `dof` degrees of freedom.
pub fn t_quantile(p: f64, dof: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0 && dof > 0.0, "t_quantile({p}, {dof})");
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -t_quantile(1.0 - p, dof);
    }
    let x = statrs::function::beta::inv_beta_reg(dof / 2.0, 0.5, 2.0 * (1.0 - p));
    (dof * (1.0 / x - 1.0)).sqrt()
}

/// Mean and `t_{(1+level)/2, n-1} · s / √n` half-width.
pub fn mean_ci<T: Scalar>(samples: &[T], level: T) -> Result<RunStatistics<T>, StatsError> {
    let lv = level.to_f64_lossless();
    if !(lv > 0.0 && lv < 1.0) {
        return Err(StatsError::InvalidLevel(lv));
    }
    if samples.is_empty() {
        return Err(StatsError::EmptySamples);
    }
    let n = samples.len();
    let nt = T::of(n as f64);
    let mean = samples.iter().fold(T::zero(), |a, &x| a + x) / nt;
    let ci_half_width = if n == 1 {
        None
    } else if samples.iter().all(|&x| x == samples[0]) {
        Some(T::zero())
    } else {
        let ss = samples.iter().fold(T::zero(), |a, &x| a + (x - mean) * (x - mean));
        let sd = (ss / T::of((n - 1) as f64)).sqrt();
        let t = T::of(t_quantile((1.0 + lv) / 2.0, (n - 1) as f64));
        Some(t * sd / nt.sqrt())
    };
    Ok(RunStatistics {
        metric: String::new(),
        n,
        mean,
        ci_half_width,
        samples: samples.to_vec(),
    })
}
