//! Crossing points of finite-size curves.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::collapse::CollapsePoint;
use super::fit::{invert3, linear_fit};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub l_small: f64,
    pub l_large: f64,
    pub p: f64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    /// Inverse-variance weighted mean over consecutive size pairs.
    pub p_c: f64,
    pub err: f64,
    pub pairs: Vec<Crossing>,
}

/// Points on each side of a sign change used for the local fit.
const HALF_WINDOW: usize = 3;

impl CrossingEstimate {
    /// Crossing of the two largest sizes, the least affected by finite-size
    /// drift.
    pub fn largest_pair(&self) -> &Crossing {
        self.pairs.last().expect("an estimate has at least one pair")
    }
}

/// Crossing of `y_L1(p)` and `y_L2(p)` for consecutive sizes. The difference
/// `y_L1 − y_L2` on the shared `p` grid is scanned for sign changes; the most
/// significant one is refined by a weighted quadratic fit over up to three
/// points on either side (a straight line when fewer than four points are
/// available or the quadratic has no root in the bracket).
pub fn crossing_point(points: &[CollapsePoint]) -> Result<CrossingEstimate> {
    let mut by_l: BTreeMap<u64, BTreeMap<u64, (f64, f64, f64)>> = BTreeMap::new();
    for q in points {
        by_l.entry(q.l.to_bits()).or_default().insert(q.p.to_bits(), (q.p, q.y, q.d));
    }
    let mut sizes: Vec<(f64, &BTreeMap<u64, (f64, f64, f64)>)> = by_l.iter().map(|(l, m)| (f64::from_bits(*l), m)).collect();
    sizes.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sizes.len() < 2 {
        return Err(Error::InvalidInput("crossings need at least 2 sizes".into()));
    }
    let mut pairs = Vec::new();
    for w in sizes.windows(2) {
        let (l1, a) = w[0];
        let (l2, b) = w[1];
        let mut ps = Vec::new();
        let mut diff = Vec::new();
        let mut sig = Vec::new();
        for (key, &(p, y1, d1)) in a {
            if let Some(&(_, y2, d2)) = b.get(key) {
                ps.push(p);
                diff.push(y1 - y2);
                sig.push((d1 * d1 + d2 * d2).sqrt().max(1e-12));
            }
        }
        if ps.len() < 3 {
            return Err(Error::InvalidInput(format!("sizes {l1} and {l2} share fewer than 3 p values")));
        }
        let (lo, hi) = (ps[0], ps[ps.len() - 1]);
        let Some(i) = (0..ps.len() - 1)
            .filter(|&i| diff[i] * diff[i + 1] < 0.0 || (diff[i] == 0.0 && diff[i + 1] != 0.0 && i > 0 && diff[i - 1] * diff[i + 1] < 0.0))
            .max_by(|&i, &j| {
                let z = |k: usize| (diff[k + 1] - diff[k]).abs() / sig[k].hypot(sig[k + 1]);
                z(i).total_cmp(&z(j))
            })
        else {
            return Err(Error::NoConvergence(format!(
                "curves for {l1} and {l2} do not cross inside [{lo}, {hi}]"
            )));
        };
        // symmetric around the change, or around an exact zero
        let (a0, b0) = if diff[i] == 0.0 {
            (i.saturating_sub(HALF_WINDOW), (i + HALF_WINDOW + 1).min(ps.len()))
        } else {
            ((i + 1).saturating_sub(HALF_WINDOW), (i + 1 + HALF_WINDOW).min(ps.len()))
        };
        let (a0, b0) = if b0 - a0 < 3 { (a0.saturating_sub(1), (b0 + 1).min(ps.len())) } else { (a0, b0) };
        let mid = 0.5 * (ps[i] + ps[i + 1]);
        let (root, err) = match local_root(&ps[a0..b0], &diff[a0..b0], &sig[a0..b0], mid, (ps[i.saturating_sub(1)], ps[(i + 2).min(ps.len() - 1)])) {
            Some(r) => r,
            None => {
                let f = linear_fit(&ps[a0..b0], &diff[a0..b0], Some(&sig[a0..b0]))?;
                if f.slope == 0.0 {
                    return Err(Error::NoConvergence(format!("curves for {l1} and {l2} are parallel")));
                }
                let root = -f.intercept / f.slope;
                // delta method on root = −b/a
                let var = f.intercept_err.powi(2) + (root * f.slope_err).powi(2) + 2.0 * root * f.cov;
                (root, var.max(0.0).sqrt() / f.slope.abs())
            }
        };
        if !(lo..=hi).contains(&root) {
            return Err(Error::NoConvergence(format!(
                "curves for {l1} and {l2} do not cross inside [{lo}, {hi}] (extrapolated {root:.4})"
            )));
        }
        pairs.push(Crossing {
            l_small: l1,
            l_large: l2,
            p: root,
            err,
        });
    }
    let wsum: f64 = pairs.iter().map(|c| 1.0 / c.err.max(1e-9).powi(2)).sum();
    let p_c = pairs.iter().map(|c| c.p / c.err.max(1e-9).powi(2)).sum::<f64>() / wsum;
    Ok(CrossingEstimate {
        p_c,
        err: wsum.sqrt().recip(),
        pairs,
    })
}

/// Root of a weighted quadratic through `(x, y)` inside `bracket`, with its
/// delta-method error. `None` when the fit is underdetermined or has no
/// root there.
fn local_root(x: &[f64], y: &[f64], sig: &[f64], centre: f64, bracket: (f64, f64)) -> Option<(f64, f64)> {
    if x.len() < 4 {
        return None;
    }
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for ((&xi, &yi), &si) in x.iter().zip(y).zip(sig) {
        let u = xi - centre;
        let basis = [1.0, u, u * u];
        let w = 1.0 / (si * si);
        for r in 0..3 {
            b[r] += w * basis[r] * yi;
            for c in 0..3 {
                a[r][c] += w * basis[r] * basis[c];
            }
        }
    }
    let cov = invert3(a)?;
    let c: Vec<f64> = (0..3).map(|r| (0..3).map(|k| cov[r][k] * b[k]).sum()).collect();
    let roots: Vec<f64> = if c[2].abs() < 1e-300 {
        if c[1] == 0.0 {
            return None;
        }
        vec![-c[0] / c[1]]
    } else {
        let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (c[1] + c[1].signum() * disc.sqrt());
        let mut v = vec![q / c[2]];
        if q != 0.0 {
            v.push(c[0] / q);
        }
        v
    };
    let (lo, hi) = (bracket.0 - centre, bracket.1 - centre);
    let u = roots
        .into_iter()
        .filter(|u| (lo..=hi).contains(u))
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))?;
    let slope = c[1] + 2.0 * c[2] * u;
    if slope == 0.0 {
        return None;
    }
    let g = [1.0, u, u * u];
    let var: f64 = (0..3).map(|r| (0..3).map(|k| g[r] * cov[r][k] * g[k]).sum::<f64>()).sum();
    Some((centre + u, var.max(0.0).sqrt() / slope.abs()))
}
