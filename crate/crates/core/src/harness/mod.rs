//! Experiment files, the worker pool and result persistence.
//!
//! An experiment file is a flat TOML table deserialised into
//! [`ExperimentConfig`]; unknown keys are rejected. Trajectory `i` always runs
//! on random stream `i` of the master seed, and aggregation sums in
//! trajectory order, so outputs are byte-identical for any worker count.

mod analysis;
mod selftest;
mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clusters::{size_counts, without_largest};
use crate::protocol::{run_trajectory, window_average_times, ExperimentConfig, TrajectoryRecord};
use crate::{Error, Result};

pub use analysis::{
    load_rows, run_clusters, run_collapse, run_fit, run_perc, select_points, ClusterReport, CollapseReport,
    CollapseSpec, FitReport, FitSpec, PercReport, PercSpec,
};
pub use selftest::{selftest, Check};
pub use table::{
    fmt_f64, mean_stderr, read_csv, read_histogram, write_csv, write_histogram, HistogramRow, Row,
    HISTOGRAM_COLUMNS, OBSERVABLE_COLUMNS,
};

pub const OBSERVABLES_FILE: &str = "observables.csv";
pub const HISTOGRAM_FILE: &str = "clusters.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Suffix of window-averaged observables.
pub const WINDOWED_SUFFIX: &str = "_w";

/// Provenance of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the canonical JSON form of the config.
    pub config_hash: String,
    pub master_seed: u64,
    pub n_traj: usize,
    pub code_version: String,
    /// Observable name to the CSV holding it, relative to the output directory.
    pub csv_paths: BTreeMap<String, PathBuf>,
    pub config: ExperimentConfig,
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = parse_toml(text)?;
    cfg.validate().map_err(|e| match e {
        Error::Config(m) => Error::Config(locate(text, &m)),
        other => other,
    })?;
    Ok(cfg)
}

pub(crate) fn parse_toml<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_owned()))
}

/// Prefixes a validation message with the line of the first key it names.
fn locate(text: &str, message: &str) -> String {
    const KEYS: [&str; 9] = ["p", "L", "t_max", "t0", "window", "n_traj", "record_from", "probe", "boundary"];
    let key_line = |key: &str| {
        text.lines().position(|l| {
            let k = l.split('=').next().unwrap_or("").trim();
            k == key || (key == "L" && k == "l")
        })
    };
    let line = message
        .split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|w| KEYS.contains(w))
        .find_map(key_line);
    match line {
        Some(i) => format!("line {}: {message}", i + 1),
        None => message.to_owned(),
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_vec(cfg).expect("config serialises");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Pool(e.to_string()))
}

/// All trajectories of `cfg`, in trajectory order.
pub fn run_trajectories(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<TrajectoryRecord>> {
    cfg.validate()?;
    pool(workers)?.install(|| {
        (0..cfg.n_traj as u64)
            .into_par_iter()
            .map(|i| run_trajectory(cfg, i))
            .collect()
    })
}

/// Mean and standard error per recorded step, per window block and of the
/// final-state cluster statistics.
pub fn aggregate(cfg: &ExperimentConfig, records: &[TrajectoryRecord]) -> Result<Vec<Row>> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no trajectories to aggregate".into()));
    }
    let n = records.len();
    let row = |t: usize, observable: String, (value, stderr): (f64, f64)| Row {
        protocol: cfg.protocol.name().to_owned(),
        l: cfg.l,
        p: cfg.p,
        t,
        observable,
        value,
        stderr,
        n_traj: n,
    };
    let mut rows = Vec::new();
    let times = &records[0].times;
    if let Some(name) = cfg.probe.observable() {
        let series: Vec<&[f64]> = records
            .iter()
            .map(|r| r.get(name).ok_or_else(|| Error::InvalidInput(format!("record lacks {name}"))))
            .collect::<Result<_>>()?;
        for (i, &t) in times.iter().enumerate() {
            let column: Vec<f64> = series.iter().map(|s| s[i]).collect();
            rows.push(row(t, name.to_owned(), mean_stderr(&column)));
        }
        let mut windowed = Vec::with_capacity(n);
        for s in &series {
            windowed.push(window_average_times(times, s, cfg.window)?);
        }
        for (i, &t) in windowed[0].0.iter().enumerate() {
            let column: Vec<f64> = windowed.iter().map(|(_, v)| v[i]).collect();
            rows.push(row(t, format!("{name}{WINDOWED_SUFFIX}"), mean_stderr(&column)));
        }
    }
    let t_end = cfg.t_max();
    let stat = |f: &dyn Fn(&TrajectoryRecord) -> f64| mean_stderr(&records.iter().map(f).collect::<Vec<_>>());
    rows.push(row(t_end, "s_mean".into(), stat(&|r| r.clusters.s_mean)));
    rows.push(row(t_end, "s_max".into(), stat(&|r| r.clusters.s_max as f64)));
    rows.push(row(t_end, "s_max_frac".into(), stat(&|r| r.clusters.largest_fraction())));
    Ok(rows)
}

/// Final-state cluster sizes summed over trajectories.
pub fn cluster_histogram(cfg: &ExperimentConfig, records: &[TrajectoryRecord]) -> Vec<HistogramRow> {
    let mut all: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for r in records {
        for (s, c) in size_counts(&r.clusters.sizes) {
            all.entry(s).or_default().0 += c;
        }
        for (s, c) in size_counts(&without_largest(&r.clusters.sizes)) {
            all.entry(s).or_default().1 += c;
        }
    }
    let volume = records.first().map_or(0, |r| r.clusters.volume);
    let n = records.len();
    all.into_iter()
        .map(|(s, (count, count_tail))| HistogramRow {
            protocol: cfg.protocol.name().to_owned(),
            l: cfg.l,
            p: cfg.p,
            s,
            count,
            count_tail,
            n_traj: n,
            volume,
            n_s: count as f64 / (n * volume) as f64,
        })
        .collect()
}

/// Removes the files it tracks unless disarmed.
pub(crate) struct OutputGuard {
    paths: Vec<PathBuf>,
    armed: bool,
}

impl OutputGuard {
    pub(crate) fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputGuard {
            paths: Vec::new(),
            armed: true,
        })
    }

    pub(crate) fn track(&mut self, path: PathBuf) -> PathBuf {
        self.paths.push(path.clone());
        path
    }

    pub(crate) fn write_json<T: Serialize>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        let path = self.track(path);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub(crate) fn disarm(mut self) {
        self.armed = false;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.armed {
            for p in &self.paths {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

/// Runs all trajectories and writes `observables.csv`, `clusters.csv` and
/// `manifest.json` into `out_dir`. On failure no partial output is left.
pub fn run_experiment(cfg: &ExperimentConfig, workers: usize, out_dir: &Path) -> Result<RunManifest> {
    run_experiment_records(cfg, workers, out_dir).map(|(m, _)| m)
}

pub(crate) fn run_experiment_records(
    cfg: &ExperimentConfig,
    workers: usize,
    out_dir: &Path,
) -> Result<(RunManifest, Vec<TrajectoryRecord>)> {
    cfg.validate()?;
    let records = run_trajectories(cfg, workers)?;
    let rows = aggregate(cfg, &records)?;
    let hist = cluster_histogram(cfg, &records);

    let mut guard = OutputGuard::new(out_dir)?;
    write_csv(&rows, &guard.track(out_dir.join(OBSERVABLES_FILE)))?;
    write_histogram(&hist, &guard.track(out_dir.join(HISTOGRAM_FILE)))?;
    let mut csv_paths = BTreeMap::new();
    for r in &rows {
        csv_paths
            .entry(r.observable.clone())
            .or_insert_with(|| PathBuf::from(OBSERVABLES_FILE));
    }
    csv_paths.insert("n_s".into(), PathBuf::from(HISTOGRAM_FILE));
    let manifest = RunManifest {
        config_hash: config_hash(cfg),
        master_seed: cfg.seed,
        n_traj: cfg.n_traj,
        code_version: env!("CARGO_PKG_VERSION").to_owned(),
        csv_paths,
        config: cfg.clone(),
    };
    guard.write_json(out_dir.join(MANIFEST_FILE), &manifest)?;
    guard.disarm();
    Ok((manifest, records))
}
