//! Purification of a maximally mixed system: entropy density after `4L`
//! steps across `p`, and a dynamic-exponent collapse of `S(t)` at the
//! critical point.
//!
//! `cargo run --release --example purification -- [n_traj]`

use mipt::fss::{dynamics_collapse, Curve, DynamicsFamily};
use mipt::harness::{aggregate, run_trajectories};
use mipt::protocol::{ExperimentConfig, Probe, Protocol};
use mipt::rng::derive_seed;

fn main() -> mipt::Result<()> {
    let n_traj: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let run = |l: usize, p: f64| -> mipt::Result<Vec<mipt::harness::Row>> {
        let mut cfg = ExperimentConfig::new(Protocol::Clifford2d, l, p, Probe::Purification, n_traj);
        cfg.seed = derive_seed(5, &[l as u64, p.to_bits()]);
        aggregate(&cfg, &run_trajectories(&cfg, workers)?)
    };
    for l in [8, 12] {
        for p in [0.2, 0.25, 0.28, 0.3, 0.312, 0.33, 0.35, 0.4] {
            let rows = run(l, p)?;
            let last = rows.iter().rev().find(|r| r.observable == "s_sys").expect("series");
            let n = (l * l) as f64;
            println!("L = {l:>2}  p = {p:.3}  S/N at t = {} : {:.4} ± {:.4}", last.t, last.value / n, last.stderr / n);
        }
    }
    let mut curves = Vec::new();
    for l in [8, 12, 16] {
        let rows = run(l, 0.312)?;
        let s: Vec<&mipt::harness::Row> = rows.iter().filter(|r| r.observable == "s_sys").collect();
        let curve = Curve {
            l: l as f64,
            t: s.iter().map(|r| r.t as f64).collect(),
            y: s.iter().map(|r| r.value).collect(),
            d: s.iter().map(|r| r.stderr).collect(),
        };
        curves.push(curve.from_time(l as f64));
    }
    let z = dynamics_collapse(&curves, DynamicsFamily::Z, (0.5, 2.0))?;
    println!("z = {:.3} (ε < 2ε_min for z in [{:.3}, {:.3}])", z.value, z.range.0, z.range.1);
    Ok(())
}
