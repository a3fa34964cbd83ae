//! Analyses behind the `collapse`, `fit`, `clusters` and `perc` commands.
//!
//! Each takes a small TOML spec (unknown keys rejected), reads or produces
//! long-format tables and writes a JSON report next to them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::{fmt_f64, mean_stderr, read_csv, write_csv, Row};
use super::{parse_toml, pool, run_experiment_records, OutputGuard, RunManifest, OBSERVABLES_FILE};
use crate::clusters::tail_window;
use crate::fss::{
    crossing_point, fit_cluster_tail, fit_power_law_weighted, optimize_collapse, CollapseOptions, CollapsePoint,
    CrossingEstimate, FitResult, SearchDomain, TailFit, DEFAULT_D_FLOOR,
};
use crate::lattice::Boundary;
use crate::percolation::{perc_realization, surface_cluster_stats, PercConfig, PercKind};
use crate::protocol::ExperimentConfig;
use crate::rng::derive_seed;
use crate::{Error, Result};

fn default_d_floor() -> f64 {
    DEFAULT_D_FLOOR
}

fn default_grid() -> usize {
    CollapseOptions::default().grid
}

/// Reads observable tables. A directory stands for its `observables.csv`.
pub fn load_rows(inputs: &[PathBuf]) -> Result<Vec<Row>> {
    if inputs.is_empty() {
        return Err(Error::Config("no input tables given".into()));
    }
    let mut rows = Vec::new();
    for path in inputs {
        let file = if path.is_dir() { path.join(OBSERVABLES_FILE) } else { path.clone() };
        rows.extend(read_csv(&file)?);
    }
    Ok(rows)
}

/// Points of `observable` at step `t`, or at the last recorded step of each
/// `(L, p)` when `t` is `None`, restricted to `sizes` when given.
pub fn select_points(
    rows: &[Row],
    observable: &str,
    t: Option<usize>,
    sizes: Option<&[usize]>,
) -> Result<Vec<CollapsePoint>> {
    let mut latest: BTreeMap<(usize, u64), &Row> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.observable == observable) {
        if sizes.is_some_and(|s| !s.contains(&r.l)) || t.is_some_and(|t| t != r.t) {
            continue;
        }
        let key = (r.l, r.p.to_bits());
        if latest.get(&key).is_none_or(|old| r.t > old.t) {
            latest.insert(key, r);
        }
    }
    if latest.is_empty() {
        return Err(Error::InvalidInput(format!("no rows for observable {observable:?}")));
    }
    Ok(latest
        .values()
        .map(|r| CollapsePoint {
            p: r.p,
            l: r.l as f64,
            y: r.value,
            d: r.stderr,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseSpec {
    pub inputs: Vec<PathBuf>,
    pub observable: String,
    #[serde(default)]
    pub t: Option<usize>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    pub p_c: (f64, f64),
    pub nu: (f64, f64),
    /// Exponent `a` of the `L^a y` prefactor.
    #[serde(default)]
    pub prefactor_power: f64,
    #[serde(default = "default_d_floor")]
    pub d_floor: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

impl CollapseSpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub sizes: Vec<usize>,
    pub p_min: f64,
    pub p_max: f64,
    pub t: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub observable: String,
    /// `{"p_c": …, "nu": …}`.
    pub parameters: BTreeMap<String, f64>,
    /// Bounding box of the `ε < 2 ε_min` region.
    pub errors: BTreeMap<String, (f64, f64)>,
    pub eps_min: f64,
    pub region_connected: bool,
    pub on_boundary: bool,
    pub landscape_path: PathBuf,
    pub fit_window: FitWindow,
    /// Crossing of consecutive sizes, when the data allow one.
    pub crossing: Option<CrossingEstimate>,
}

/// Writes `collapse.json` and `collapse_landscape.csv` (columns
/// `p_c, nu, eps`) into `out_dir`.
pub fn run_collapse(spec: &CollapseSpec, out_dir: &Path) -> Result<CollapseReport> {
    let rows = load_rows(&spec.inputs)?;
    let points = select_points(&rows, &spec.observable, spec.t, spec.sizes.as_deref())?;
    let opts = CollapseOptions {
        prefactor_power: spec.prefactor_power,
        d_floor: spec.d_floor,
        grid: spec.grid,
    };
    let domain = SearchDomain {
        p_c: spec.p_c,
        nu: spec.nu,
    };
    let res = optimize_collapse(&points, domain, opts)?;
    let mut sizes: Vec<usize> = points.iter().map(|q| q.l as usize).collect();
    sizes.dedup();
    sizes.sort_unstable();
    sizes.dedup();

    let mut guard = OutputGuard::new(out_dir)?;
    let landscape_path = guard.track(out_dir.join("collapse_landscape.csv"));
    let mut w = csv::Writer::from_path(&landscape_path)?;
    w.write_record(["p_c", "nu", "eps"])?;
    for (i, &pc) in res.landscape.p_c.iter().enumerate() {
        for (j, &nu) in res.landscape.nu.iter().enumerate() {
            w.write_record([fmt_f64(pc), fmt_f64(nu), fmt_f64(res.landscape.values[i][j])])?;
        }
    }
    w.flush().map_err(|e| Error::io(&landscape_path, e))?;
    let report = CollapseReport {
        observable: spec.observable.clone(),
        parameters: BTreeMap::from([("p_c".into(), res.p_c), ("nu".into(), res.nu)]),
        errors: BTreeMap::from([("p_c".into(), res.p_c_range), ("nu".into(), res.nu_range)]),
        eps_min: res.eps_min,
        region_connected: res.region_connected,
        on_boundary: res.on_boundary,
        landscape_path: PathBuf::from("collapse_landscape.csv"),
        fit_window: FitWindow {
            sizes,
            p_min: points.iter().map(|q| q.p).fold(f64::INFINITY, f64::min),
            p_max: points.iter().map(|q| q.p).fold(f64::NEG_INFINITY, f64::max),
            t: spec.t,
        },
        crossing: crossing_point(&points).ok(),
    };
    guard.write_json(out_dir.join("collapse.json"), &report)?;
    guard.disarm();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub inputs: Vec<PathBuf>,
    pub observable: String,
    #[serde(default)]
    pub t: Option<usize>,
    /// Required when the tables hold several `p`.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub with_constant: bool,
    #[serde(default)]
    pub l_min: Option<usize>,
    #[serde(default)]
    pub l_max: Option<usize>,
}

impl FitSpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub observable: String,
    pub p: f64,
    pub parameters: FitResult,
    /// `(L_min, L_max)`.
    pub fit_window: (usize, usize),
    /// `(L, value, stderr)`.
    pub points: Vec<(usize, f64, f64)>,
}

/// Power-law fit of an observable against `L`; writes `fit.json`.
pub fn run_fit(spec: &FitSpec, out_dir: &Path) -> Result<FitReport> {
    let rows = load_rows(&spec.inputs)?;
    let mut points = select_points(&rows, &spec.observable, spec.t, None)?;
    let p = match spec.p {
        Some(p) => p,
        None => {
            let first = points[0].p;
            if points.iter().any(|q| q.p != first) {
                return Err(Error::Config("tables hold several p values; set `p`".into()));
            }
            first
        }
    };
    points.retain(|q| {
        (q.p - p).abs() <= 1e-12 * p.abs().max(1.0)
            && spec.l_min.is_none_or(|m| q.l as usize >= m)
            && spec.l_max.is_none_or(|m| q.l as usize <= m)
    });
    points.sort_by(|a, b| a.l.total_cmp(&b.l));
    if points.len() < 2 {
        return Err(Error::InvalidInput(format!("fewer than two sizes at p = {p}")));
    }
    let xs: Vec<f64> = points.iter().map(|q| q.l).collect();
    let ys: Vec<f64> = points.iter().map(|q| q.y).collect();
    let ds: Vec<f64> = points.iter().map(|q| q.d.max(DEFAULT_D_FLOOR)).collect();
    let fit = fit_power_law_weighted(&xs, &ys, Some(&ds), spec.with_constant)?;
    let report = FitReport {
        observable: spec.observable.clone(),
        p,
        parameters: fit,
        fit_window: (xs[0] as usize, xs[xs.len() - 1] as usize),
        points: points.iter().map(|q| (q.l as usize, q.y, q.d)).collect(),
    };
    let mut guard = OutputGuard::new(out_dir)?;
    guard.write_json(out_dir.join("fit.json"), &report)?;
    guard.disarm();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub manifest: RunManifest,
    /// `[s_lo, s_hi]` of the tail fit.
    pub fit_window: (usize, usize),
    pub tail: Option<TailFit>,
    /// Why the tail fit is missing.
    pub tail_error: Option<String>,
}

/// Runs an experiment like `run` and additionally writes per-trajectory
/// cluster rows (`cluster_trajectories.csv`) and a tail fit of the
/// histogram without the largest clusters (`cluster_tail.json`).
pub fn run_clusters(cfg: &ExperimentConfig, workers: usize, out_dir: &Path) -> Result<ClusterReport> {
    let (manifest, records) = run_experiment_records(cfg, workers, out_dir)?;
    let mut guard = OutputGuard::new(out_dir)?;
    let path = guard.track(out_dir.join("cluster_trajectories.csv"));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["protocol", "L", "p", "traj_id", "volume", "n_clusters", "s_mean", "s_max", "s_max_frac"])?;
    for r in &records {
        let c = &r.clusters;
        w.write_record([
            cfg.protocol.name().to_owned(),
            cfg.l.to_string(),
            fmt_f64(cfg.p),
            r.traj_id.to_string(),
            c.volume.to_string(),
            c.sizes.len().to_string(),
            fmt_f64(c.s_mean),
            c.s_max.to_string(),
            fmt_f64(c.largest_fraction()),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let hist = super::cluster_histogram(cfg, &records);
    let tail: Vec<(f64, f64)> = hist
        .iter()
        .filter(|h| h.count_tail > 0)
        .map(|h| (h.s as f64, h.count_tail as f64 / (h.n_traj * h.volume) as f64))
        .collect();
    let fit_window = tail_window(cfg.l, cfg.protocol.dim());
    let (tail, tail_error) = match fit_cluster_tail(&tail, (fit_window.0 as f64, fit_window.1 as f64)) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = ClusterReport {
        manifest,
        fit_window,
        tail,
        tail_error,
    };
    guard.write_json(out_dir.join("cluster_tail.json"), &report)?;
    guard.disarm();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercSpec {
    pub kind: PercKind,
    /// Number of periodic spatial axes; time is one extra open axis.
    pub spatial_dims: usize,
    pub sizes: Vec<usize>,
    pub ps: Vec<f64>,
    pub n_real: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl PercSpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn label(&self) -> String {
        let kind = match self.kind {
            PercKind::Bond => "bond",
            PercKind::Site => "site",
        };
        format!("perc_{kind}_{}d", self.spatial_dims)
    }

    fn validate(&self) -> Result<()> {
        if self.spatial_dims == 0 || self.sizes.is_empty() || self.ps.is_empty() || self.n_real == 0 {
            return Err(Error::Config("perc needs spatial_dims, sizes, ps and n_real ≥ 1".into()));
        }
        if let Some(p) = self.ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("p must lie in [0, 1], got {p}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercReport {
    pub label: String,
    pub rows: usize,
    pub crossing: Option<CrossingEstimate>,
    pub crossing_error: Option<String>,
}

/// Spanning probability and surface-cluster statistics on `L^d × L`
/// lattices for every `(L, p)`; writes `perc.csv` (observables `spanning`,
/// `s_mean`, `s_max_frac`, with `t = L`) and `perc.json`.
pub fn run_perc(spec: &PercSpec, workers: usize, out_dir: &Path) -> Result<PercReport> {
    spec.validate()?;
    let label = spec.label();
    let pool = pool(workers)?;
    let mut rows = Vec::new();
    for (si, &l) in spec.sizes.iter().enumerate() {
        for (pi, &p) in spec.ps.iter().enumerate() {
            let cfg = PercConfig {
                kind: spec.kind,
                dims: vec![l; spec.spatial_dims + 1],
                spatial_boundary: spec.boundary,
                p,
                seed: derive_seed(spec.seed, &[si as u64, pi as u64]),
            };
            let samples: Vec<(f64, Option<(f64, f64)>)> = pool.install(|| {
                (0..spec.n_real as u64)
                    .into_par_iter()
                    .map(|id| {
                        let r = perc_realization(&cfg, id)?;
                        let span = if r.spans() { 1.0 } else { 0.0 };
                        let surf = surface_cluster_stats(&r).ok().map(|s| (s.s_mean, s.largest_fraction()));
                        Ok((span, surf))
                    })
                    .collect::<Result<_>>()
            })?;
            let row = |observable: &str, values: &[f64]| {
                let (value, stderr) = mean_stderr(values);
                Row {
                    protocol: label.clone(),
                    l,
                    p,
                    t: l,
                    observable: observable.into(),
                    value,
                    stderr,
                    n_traj: values.len(),
                }
            };
            let spans: Vec<f64> = samples.iter().map(|s| s.0).collect();
            rows.push(row("spanning", &spans));
            let surf: Vec<(f64, f64)> = samples.iter().filter_map(|s| s.1).collect();
            if !surf.is_empty() {
                rows.push(row("s_mean", &surf.iter().map(|s| s.0).collect::<Vec<_>>()));
                rows.push(row("s_max_frac", &surf.iter().map(|s| s.1).collect::<Vec<_>>()));
            }
        }
    }
    let points = select_points(&rows, "spanning", None, None)?;
    let (crossing, crossing_error) = match crossing_point(&points) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut guard = OutputGuard::new(out_dir)?;
    write_csv(&rows, &guard.track(out_dir.join("perc.csv")))?;
    let report = PercReport {
        label,
        rows: rows.len(),
        crossing,
        crossing_error,
    };
    guard.write_json(out_dir.join("perc.json"), &report)?;
    guard.disarm();
    Ok(report)
}
