//! Running an experiment file through the harness: parse, fan out over
//! workers, aggregate and write `observables.csv`, `clusters.csv` and
//! `manifest.json`.
//!
//! `cargo run --release --example run_experiment -- [out_dir]`

use std::path::PathBuf;

use mipt::harness::{parse_config_str, read_csv, run_experiment};

const CONFIG: &str = r#"
protocol = "clifford1d"
L = 16
p = 0.16
probe = "half_entropy"
n_traj = 50
seed = 42
"#;

fn main() -> mipt::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("mipt_example"), PathBuf::from);
    let cfg = parse_config_str(CONFIG)?;
    let manifest = run_experiment(&cfg, 2, &out)?;
    println!("{}", serde_json::to_string_pretty(&manifest)?);
    for r in read_csv(&out.join("observables.csv"))?.iter().filter(|r| r.observable == "s_half_w") {
        println!("t = {:>3}  S_half = {:.3} ± {:.3}", r.t, r.value, r.stderr);
    }
    Ok(())
}
