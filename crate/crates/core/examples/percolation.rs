//! Classical percolation baselines: spanning-probability crossings and the
//! scaling of surface clusters at the threshold.
//!
//! `cargo run --release --example percolation -- [n_real]`

use mipt::fss::fit_power_law_weighted;
use mipt::harness::mean_stderr;
use mipt::percolation::{perc_realization, surface_cluster_stats, threshold_scan, PercConfig, PercKind};

fn main() -> mipt::Result<()> {
    let n_real: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(400);
    let ps: Vec<f64> = (0..7).map(|k| 0.47 + 0.01 * k as f64).collect();
    let (_, est) = threshold_scan(PercKind::Bond, 1, &[32, 64], &ps, n_real, 1)?;
    println!("2D bond threshold: {:.4} ± {:.4}", est.p_c, est.err);
    let ps: Vec<f64> = (0..7).map(|k| 0.29 + 0.007 * k as f64).collect();
    let (_, est) = threshold_scan(PercKind::Site, 2, &[8, 16], &ps, n_real, 2)?;
    println!("3D site threshold: {:.4} ± {:.4}", est.p_c, est.err);

    let (mut ls, mut s, mut sd) = (vec![], vec![], vec![]);
    for l in [16, 32, 64, 128] {
        let cfg = PercConfig::cube(PercKind::Site, 1, l, 0.592_746, 3 + l as u64);
        let values: Vec<f64> = (0..n_real as u64)
            .filter_map(|i| perc_realization(&cfg, i).ok())
            .filter_map(|r| surface_cluster_stats(&r).ok())
            .map(|st| st.s_mean)
            .collect();
        let (m, e) = mean_stderr(&values);
        println!("2D site, L = {l:>3}: surface s_mean = {m:.3} ± {e:.3}");
        ls.push(l as f64);
        s.push(m);
        sd.push(e);
    }
    let fit = fit_power_law_weighted(&ls, &s, Some(&sd), false)?;
    println!("surface s_mean ~ L^{:.3} ± {:.3}", fit.exponent, fit.exponent_err);
    Ok(())
}
