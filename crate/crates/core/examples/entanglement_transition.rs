//! Tripartite mutual information across the measurement-induced transition,
//! its crossing point and a data collapse.
//!
//! `cargo run --release --example entanglement_transition -- [1|2] [n_traj]`

use mipt::fss::{crossing_point, optimize_collapse, CollapseOptions, SearchDomain};
use mipt::harness::{aggregate, run_trajectories, select_points};
use mipt::protocol::{ExperimentConfig, Probe, Protocol};
use mipt::rng::derive_seed;

fn main() -> mipt::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let dim: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let n_traj: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(200);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let (protocol, sizes, ps, domain) = if dim == 1 {
        (Protocol::Clifford1d, vec![16, 24, 32], (0..8).map(|k| 0.13 + 0.01 * k as f64).collect::<Vec<_>>(), ((0.12, 0.21), (0.5, 3.0)))
    } else {
        (Protocol::Clifford2d, vec![8, 12, 16], (0..7).map(|k| 0.28 + 0.01 * k as f64).collect(), ((0.28, 0.34), (0.4, 2.0)))
    };

    let mut rows = Vec::new();
    for &l in &sizes {
        for &p in &ps {
            let mut cfg = ExperimentConfig::new(protocol, l, p, Probe::I3, n_traj);
            cfg.seed = derive_seed(1, &[l as u64, p.to_bits()]);
            let agg = aggregate(&cfg, &run_trajectories(&cfg, workers)?)?;
            let r = agg.iter().rev().find(|r| r.observable == "i3_w").expect("windowed i3");
            println!("L = {l:>2}  p = {p:.3}  I3 = {:+.3} ± {:.3}", r.value, r.stderr);
            rows.extend(agg);
        }
    }
    let points = select_points(&rows, "i3_w", None, None)?;
    let cross = crossing_point(&points)?;
    for c in &cross.pairs {
        println!("crossing L = {} / {}: p = {:.4} ± {:.4}", c.l_small, c.l_large, c.p, c.err);
    }
    let res = optimize_collapse(
        &points,
        SearchDomain {
            p_c: domain.0,
            nu: domain.1,
        },
        CollapseOptions::default(),
    )?;
    println!(
        "collapse: p_c = {:.4} in [{:.4}, {:.4}], nu = {:.3} in [{:.3}, {:.3}], connected region: {}",
        res.p_c, res.p_c_range.0, res.p_c_range.1, res.nu, res.nu_range.0, res.nu_range.1, res.region_connected
    );
    Ok(())
}
