//! Quick internal consistency checks behind the `selftest` command.

use num_complex::Complex64;
use rand::Rng;

use crate::clifford::{matrix, Pauli, Step, TwoQubitClifford, TWO_QUBIT_GROUP_ORDER};
use crate::fss::{cost_function, optimize_collapse, CollapseOptions, CollapsePoint, SearchDomain};
use crate::gf2::BitMatrix;
use crate::graph::GraphState;
use crate::rng::stream;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Runs every check; takes a few seconds.
pub fn selftest(seed: u64) -> Vec<Check> {
    vec![c2_group(), gf2_rank(seed), engine_entropy(seed), collapse_exact(), collapse_synthetic(seed)]
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn c2_group() -> Check {
    let all: Vec<TwoQubitClifford> = TwoQubitClifford::all().collect();
    let bad = all
        .iter()
        .filter(|c| {
            let u = c.decomposition().iter().fold(matrix::Mat4::identity(), |acc, s| {
                let m = match *s {
                    Step::LocalA(g) => matrix::on_a(&g.matrix()),
                    Step::LocalB(g) => matrix::on_b(&g.matrix()),
                    Step::Cz => matrix::cz(),
                };
                m.mul(&acc)
            });
            !u.eq_up_to_phase(&c.unitary())
        })
        .count();
    check(
        "c2_group",
        all.len() == TWO_QUBIT_GROUP_ORDER && bad == 0,
        format!("{} elements, {bad} failed replays", all.len()),
    )
}

/// Rank by inserting rows into an xor basis keyed by leading bit.
fn basis_rank(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &r in rows {
        let mut v = r;
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

fn gf2_rank(seed: u64) -> Check {
    let mut rng = stream(seed, 1);
    let mut mismatches = 0;
    for _ in 0..200 {
        let (r, c) = (rng.random_range(1..=64), rng.random_range(1..=64));
        let density = rng.random::<f64>();
        let mask = if c == 64 { u64::MAX } else { (1u64 << c) - 1 };
        let rows: Vec<u64> = (0..r)
            .map(|_| (0..c).fold(0u64, |acc, j| acc | (((rng.random::<f64>() < density) as u64) << j)) & mask)
            .collect();
        let bits: Vec<Vec<bool>> = rows.iter().map(|&w| (0..c).map(|j| w >> j & 1 == 1).collect()).collect();
        let m = BitMatrix::from_rows(&bits).expect("rectangular rows");
        if m.rank() != basis_rank(&rows) {
            mismatches += 1;
        }
    }
    check("gf2_rank", mismatches == 0, format!("{mismatches} of 200 ranks differ"))
}

/// `−log2 tr ρ_A²` from amplitudes.
fn renyi2(psi: &[Complex64], n: usize, region: u32) -> f64 {
    let inside: Vec<usize> = (0..n).filter(|q| region >> q & 1 == 1).collect();
    let outside: Vec<usize> = (0..n).filter(|q| region >> q & 1 == 0).collect();
    let pack = |idx: usize, qs: &[usize]| qs.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((idx >> q & 1) << k));
    let (da, db) = (1 << inside.len(), 1 << outside.len());
    let mut m = vec![Complex64::new(0.0, 0.0); da * db];
    for (idx, amp) in psi.iter().enumerate() {
        m[pack(idx, &inside) * db + pack(idx, &outside)] = *amp;
    }
    let mut purity = 0.0;
    for a in 0..da {
        for a2 in 0..da {
            let rho: Complex64 = (0..db).map(|b| m[a * db + b] * m[a2 * db + b].conj()).sum();
            purity += rho.norm_sqr();
        }
    }
    -purity.log2()
}

fn engine_entropy(seed: u64) -> Check {
    let mut rng = stream(seed, 2);
    let n = 5;
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..100 {
        let mut g = GraphState::new_plus_state(n).expect("non-empty");
        for _ in 0..12 {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            if g.apply_two_qubit_clifford(a, b, TwoQubitClifford::sample(&mut rng)).is_err() {
                errors += 1;
            }
            if rng.random::<f64>() < 0.3 && g.measure_pauli(rng.random_range(0..n), Pauli::Z, &mut rng).is_err() {
                errors += 1;
            }
        }
        let Ok(psi) = g.to_statevector() else {
            errors += 1;
            continue;
        };
        for region in 1u32..(1 << n) - 1 {
            let sites: Vec<usize> = (0..n).filter(|q| region >> q & 1 == 1).collect();
            worst = worst.max((g.entanglement_entropy(&sites) as f64 - renyi2(&psi, n, region)).abs());
        }
    }
    check(
        "engine_entropy",
        errors == 0 && worst < 1e-9,
        format!("max entropy deviation {worst:.2e}, {errors} engine errors"),
    )
}

fn synthetic_points(p_c: f64, nu: f64, noise: f64, rng: &mut impl Rng) -> Vec<CollapsePoint> {
    let mut pts = Vec::new();
    for l in [8.0, 16.0, 32.0] {
        for k in 0..9 {
            let p = p_c - 0.08 + 0.02 * k as f64;
            let x: f64 = (p - p_c) * f64::powf(l, 1.0 / nu);
            let y = x.tanh() + noise * (rng.random::<f64>() - 0.5) * 2.0;
            pts.push(CollapsePoint { p, l, y, d: noise.max(1e-3) });
        }
    }
    pts
}

fn collapse_exact() -> Check {
    let pts: Vec<CollapsePoint> = [8.0f64, 16.0, 32.0]
        .iter()
        .flat_map(|&l| {
            (0..7).map(move |k| {
                let p = 0.2 + 0.02 * k as f64;
                CollapsePoint { p, l, y: 3.0 * (p - 0.26) * l, d: 0.1 }
            })
        })
        .collect();
    match cost_function(&pts, 0.26, 1.0, 0.0) {
        Ok(eps) => check("collapse_exact", eps < 1e-20, format!("ε = {eps:.2e} on collinear data")),
        Err(e) => check("collapse_exact", false, e.to_string()),
    }
}

fn collapse_synthetic(seed: u64) -> Check {
    let mut rng = stream(seed, 3);
    let pts = synthetic_points(0.3, 1.2, 0.01, &mut rng);
    let domain = SearchDomain {
        p_c: (0.2, 0.4),
        nu: (0.5, 2.0),
    };
    match optimize_collapse(&pts, domain, CollapseOptions::default()) {
        Ok(r) => check(
            "collapse_synthetic",
            r.contains(0.3, 1.2),
            format!("p_c = {:.4}, ν = {:.3}, region p_c {:?} ν {:?}", r.p_c, r.nu, r.p_c_range, r.nu_range),
        ),
        Err(e) => check("collapse_synthetic", false, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::selftest(1) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
