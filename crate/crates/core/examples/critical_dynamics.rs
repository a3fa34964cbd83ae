//! Growth of the half-system entropy from a product state at the critical
//! measurement rate, compared against `a + b/t` and `a + b ln t`.
//!
//! `cargo run --release --example critical_dynamics -- [L] [n_traj]`

use mipt::fss::linear_fit;
use mipt::harness::{aggregate, run_trajectories};
use mipt::protocol::{ExperimentConfig, Probe, Protocol};

fn main() -> mipt::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let l: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(16);
    let n_traj: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(100);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut cfg = ExperimentConfig::new(Protocol::Clifford2d, l, 0.312, Probe::HalfEntropy, n_traj);
    cfg.seed = 9;
    let rows = aggregate(&cfg, &run_trajectories(&cfg, workers)?)?;
    let series: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.observable == "s_half_w")
        .map(|r| (r.t as f64, r.value / l as f64))
        .collect();
    for (t, s) in &series {
        println!("t = {t:>4}  S/L = {s:.4}");
    }
    let window: Vec<&(f64, f64)> = series.iter().filter(|(t, _)| *t >= 8.0 && *t <= 2.0 * l as f64).collect();
    let ys: Vec<f64> = window.iter().map(|p| p.1).collect();
    let inv: Vec<f64> = window.iter().map(|p| 1.0 / p.0).collect();
    let log: Vec<f64> = window.iter().map(|p| p.0.ln()).collect();
    let a = linear_fit(&inv, &ys, None)?;
    let b = linear_fit(&log, &ys, None)?;
    println!("S/L vs 1/t: R² = {:.4}; S/L vs ln t: R² = {:.4}", a.r2, b.r2);
    Ok(())
}
