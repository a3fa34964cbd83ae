//! Bootstrap over independent trajectories.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::stream;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub mean: f64,
    pub std: f64,
    /// Estimate from each successful resample.
    pub values: Vec<f64>,
    pub failures: usize,
}

/// Draws `n_resamples` index multisets of size `n_items` with replacement and
/// applies `estimate` to each. Failed resamples are skipped; more than a
/// tenth failing is an error.
pub fn bootstrap<F>(n_items: usize, n_resamples: usize, seed: u64, mut estimate: F) -> Result<BootstrapSummary>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    if n_items == 0 {
        return Err(Error::InvalidInput("nothing to resample".into()));
    }
    if n_resamples < 100 {
        return Err(Error::InvalidInput(format!("need at least 100 resamples, got {n_resamples}")));
    }
    let mut rng = stream(seed, 0);
    let mut idx = vec![0; n_items];
    let mut values = Vec::with_capacity(n_resamples);
    let mut failures = 0;
    for _ in 0..n_resamples {
        for i in idx.iter_mut() {
            *i = rng.random_range(0..n_items);
        }
        match estimate(&idx) {
            Ok(v) if v.is_finite() => values.push(v),
            _ => failures += 1,
        }
    }
    if failures * 10 > n_resamples {
        return Err(Error::NoConvergence(format!("{failures} of {n_resamples} resamples failed")));
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    Ok(BootstrapSummary {
        mean,
        std: var.sqrt(),
        values,
        failures,
    })
}
