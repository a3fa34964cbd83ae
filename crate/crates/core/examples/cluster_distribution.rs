//! Distribution of final-state cluster sizes in the 1+1D circuit: log-binned
//! `n_s` with the largest cluster removed, and the corrected power-law tail
//! fit.
//!
//! `cargo run --release --example cluster_distribution -- [L] [n_traj] [p]`

use std::collections::BTreeMap;

use mipt::clusters::{log_bin, size_counts, tail_window, without_largest};
use mipt::fss::fit_cluster_tail;
use mipt::harness::run_trajectories;
use mipt::protocol::{ExperimentConfig, Probe, Protocol};

fn main() -> mipt::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let l: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(128);
    let n_traj: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(200);
    let p: f64 = args.get(3).and_then(|a| a.parse().ok()).unwrap_or(0.165);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cfg = ExperimentConfig::new(Protocol::Clifford1d, l, p, Probe::None, n_traj);
    let records = run_trajectories(&cfg, workers)?;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for r in &records {
        for (s, c) in size_counts(&without_largest(&r.clusters.sizes)) {
            *counts.entry(s).or_default() += c;
        }
    }
    let norm = (n_traj * l) as f64;
    let n_s: BTreeMap<usize, f64> = counts.iter().map(|(&s, &c)| (s, c as f64 / norm)).collect();
    for b in log_bin(&n_s, 5) {
        println!("s in [{:>4}, {:>4}]  n_s = {:.3e}", b.lo, b.hi, b.n_s);
    }
    let window = tail_window(l, 1);
    let hist: Vec<(f64, f64)> = n_s.iter().map(|(&s, &v)| (s as f64, v)).collect();
    match fit_cluster_tail(&hist, (window.0 as f64, window.1 as f64)) {
        Ok(f) => println!("tail over s in {window:?}: tau = {:.3}, Omega = {:.3}", f.tau, f.omega),
        Err(e) => println!("tail fit failed: {e}"),
    }
    Ok(())
}
