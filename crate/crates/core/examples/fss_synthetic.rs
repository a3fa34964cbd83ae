//! The collapse toolkit on synthetic data with a known critical point:
//! cost function, grid-then-refine optimizer and error region.

use mipt::fss::{cost_function, optimize_collapse, CollapseOptions, CollapsePoint, SearchDomain};
use mipt::rng::stream;
use rand::Rng;

fn main() -> mipt::Result<()> {
    let (p_c, nu) = (0.312, 0.9);
    let mut rng = stream(4, 0);
    let mut points = Vec::new();
    for l in [8.0, 12.0, 16.0, 24.0] {
        for k in 0..9 {
            let p = 0.27 + 0.01 * k as f64;
            let x: f64 = (p - p_c) * f64::powf(l, 1.0 / nu);
            let y = -(-x).exp().min(50.0) + 0.01 * (rng.random::<f64>() - 0.5);
            points.push(CollapsePoint { p, l, y, d: 0.01 });
        }
    }
    println!("ε at the truth: {:.3}", cost_function(&points, p_c, nu, 0.0)?);
    println!("ε far away:     {:.3}", cost_function(&points, 0.29, 1.5, 0.0)?);
    let r = optimize_collapse(
        &points,
        SearchDomain {
            p_c: (0.27, 0.35),
            nu: (0.5, 1.5),
        },
        CollapseOptions::default(),
    )?;
    println!(
        "optimum p_c = {:.4} [{:.4}, {:.4}], nu = {:.3} [{:.3}, {:.3}], ε_min = {:.3}, contains truth: {}",
        r.p_c,
        r.p_c_range.0,
        r.p_c_range.1,
        r.nu,
        r.nu_range.0,
        r.nu_range.1,
        r.eps_min,
        r.contains(p_c, nu)
    );
    Ok(())
}
