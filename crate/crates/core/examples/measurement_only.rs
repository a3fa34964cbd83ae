//! The projective transverse-field Ising model: measurement-only dynamics
//! with ZZ bond and X site measurements. Prints the largest-cluster
//! fraction and mean cluster size against `L` at `p = 1/2` with their
//! power-law fits.
//!
//! `cargo run --release --example measurement_only -- [n_traj] [p]`

use mipt::fss::fit_power_law_weighted;
use mipt::harness::{aggregate, run_trajectories};
use mipt::protocol::{ExperimentConfig, Probe, Protocol};
use mipt::rng::derive_seed;

fn main() -> mipt::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n_traj: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let p: f64 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let (mut ls, mut frac, mut frac_d, mut smean, mut smean_d) = (vec![], vec![], vec![], vec![], vec![]);
    for l in [16, 32, 64, 128] {
        let mut cfg = ExperimentConfig::new(Protocol::Ptfim1d, l, p, Probe::None, n_traj);
        cfg.seed = derive_seed(2, &[l as u64]);
        let rows = aggregate(&cfg, &run_trajectories(&cfg, workers)?)?;
        let get = |name: &str| rows.iter().find(|r| r.observable == name).map(|r| (r.value, r.stderr)).expect("row");
        let (f, fd) = get("s_max_frac");
        let (s, sd) = get("s_mean");
        println!("L = {l:>3}  s_max/L = {f:.4} ± {fd:.4}  s_mean = {s:.3} ± {sd:.3}");
        ls.push(l as f64);
        frac.push(f);
        frac_d.push(fd);
        smean.push(s);
        smean_d.push(sd);
    }
    let a = fit_power_law_weighted(&ls, &frac, Some(&frac_d), false)?;
    let b = fit_power_law_weighted(&ls, &smean, Some(&smean_d), false)?;
    println!("s_max/L ~ L^{:.3} ± {:.3};  s_mean ~ L^{:.3} ± {:.3}", a.exponent, a.exponent_err, b.exponent, b.exponent_err);
    Ok(())
}
