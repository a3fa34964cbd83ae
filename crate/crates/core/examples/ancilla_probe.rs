//! Reference-qubit probes: the entropy of one ancilla entangled with the
//! system, and the mutual information of two ancillas a distance `L/2`
//! apart.
//!
//! `cargo run --release --example ancilla_probe -- [L] [n_traj]`

use mipt::harness::{aggregate, run_trajectories};
use mipt::protocol::{ExperimentConfig, Probe, Protocol};

fn main() -> mipt::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let l: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let n_traj: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(200);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    for p in [0.2, 0.312, 0.4] {
        let mut single = ExperimentConfig::new(Protocol::Clifford2d, l, p, Probe::SingleAncilla, n_traj);
        single.t0 = 2 * l;
        single.record_from = Some(2 * l);
        let rows = aggregate(&single, &run_trajectories(&single, workers)?)?;
        let s: Vec<String> = rows
            .iter()
            .filter(|r| r.observable == "s_anc_w")
            .map(|r| format!("{:.2}", r.value))
            .collect();
        println!("p = {p:.3}  single ancilla S(t), windowed: {}", s.join(" "));

        let mut pair = ExperimentConfig::new(Protocol::Clifford2d, l, p, Probe::AncillaPair, n_traj);
        pair.t0 = 2 * l;
        let rows = aggregate(&pair, &run_trajectories(&pair, workers)?)?;
        let i2: Vec<String> = rows
            .iter()
            .filter(|r| r.observable == "i2_pair_w")
            .map(|r| format!("{:.3}", r.value))
            .collect();
        println!("p = {p:.3}  ancilla pair I2(t), windowed: {}", i2.join(" "));
    }
    Ok(())
}
