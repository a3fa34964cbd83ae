//! Bond and site percolation on hypercubic lattices with an open time axis.
//!
//! The last axis of `dims` is time and has open ends; the other axes follow
//! their boundary flags. A cluster spans when it touches both time ends; the
//! surface is the final time slice.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clusters::ClusterStats;
use crate::fss::{crossing_point, CollapsePoint, CrossingEstimate};
use crate::lattice::Boundary;
use crate::rng::{derive_seed, stream};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PercKind {
    Bond,
    Site,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercConfig {
    pub kind: PercKind,
    /// `(L, …, T)`.
    pub dims: Vec<usize>,
    /// Boundary of each spatial axis.
    pub spatial_boundary: Boundary,
    pub p: f64,
    pub seed: u64,
}

impl PercConfig {
    /// `L^d × L` with periodic spatial axes.
    pub fn cube(kind: PercKind, spatial_dims: usize, l: usize, p: f64, seed: u64) -> Self {
        PercConfig {
            kind,
            dims: vec![l; spatial_dims + 1],
            spatial_boundary: Boundary::Periodic,
            p,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 || self.dims.iter().any(|&d| d < 2) {
            return Err(Error::Geometry(format!("invalid percolation dims {:?}", self.dims)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidInput(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if self.dims.iter().product::<usize>() >= u32::MAX as usize {
            return Err(Error::Geometry("lattice too large".into()));
        }
        Ok(())
    }
}

/// Disjoint-set forest with union by size and path compression.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x as u32;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x as u32;
        while cur != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root as usize
    }

    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        ra
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

/// One sampled configuration with its cluster labels.
#[derive(Clone, Debug)]
pub struct Realization {
    pub dims: Vec<usize>,
    /// Occupied sites (all sites for bond percolation).
    pub occupied: Vec<bool>,
    /// Root label of every site.
    pub labels: Vec<u32>,
}

/// Samples realization `id` of `cfg`.
pub fn perc_realization(cfg: &PercConfig, id: u64) -> Result<Realization> {
    cfg.validate()?;
    let mut rng = stream(cfg.seed, id);
    let dims = &cfg.dims;
    let n: usize = dims.iter().product();
    let axes = dims.len();
    let mut strides = vec![1usize; axes];
    for a in 1..axes {
        strides[a] = strides[a - 1] * dims[a - 1];
    }
    let occupied: Vec<bool> = match cfg.kind {
        PercKind::Site => (0..n).map(|_| rng.random::<f64>() < cfg.p).collect(),
        PercKind::Bond => vec![true; n],
    };
    let mut uf = UnionFind::new(n);
    let mut coord = vec![0usize; axes];
    for site in 0..n {
        for a in 0..axes {
            let c = coord[a];
            let last = c + 1 == dims[a];
            let periodic = a + 1 < axes && cfg.spatial_boundary == Boundary::Periodic;
            if last && !periodic {
                continue;
            }
            // a periodic axis of length 2 has one bond per pair
            if last && dims[a] == 2 {
                continue;
            }
            let other = if last { site + strides[a] - dims[a] * strides[a] } else { site + strides[a] };
            let open = match cfg.kind {
                PercKind::Bond => rng.random::<f64>() < cfg.p,
                PercKind::Site => occupied[site] && occupied[other],
            };
            if open {
                uf.union(site, other);
            }
        }
        for a in 0..axes {
            coord[a] += 1;
            if coord[a] < dims[a] {
                break;
            }
            coord[a] = 0;
        }
    }
    let labels = (0..n).map(|s| uf.find(s) as u32).collect();
    Ok(Realization {
        dims: dims.clone(),
        occupied,
        labels,
    })
}

impl Realization {
    fn slice_len(&self) -> usize {
        self.dims[..self.dims.len() - 1].iter().product()
    }

    /// Some cluster touches both the first and the last time slice.
    pub fn spans(&self) -> bool {
        let s = self.slice_len();
        let n = self.labels.len();
        let mut bottom = vec![false; n];
        for i in 0..s {
            if self.occupied[i] {
                bottom[self.labels[i] as usize] = true;
            }
        }
        (n - s..n).any(|i| self.occupied[i] && bottom[self.labels[i] as usize])
    }

    /// Occupied final-slice sites per cluster.
    pub fn surface_sizes(&self) -> Vec<usize> {
        let s = self.slice_len();
        let n = self.labels.len();
        let mut count = std::collections::HashMap::new();
        for i in n - s..n {
            if self.occupied[i] {
                *count.entry(self.labels[i]).or_insert(0usize) += 1;
            }
        }
        let mut sizes: Vec<usize> = count.into_values().collect();
        sizes.sort_unstable();
        sizes
    }
}

/// Surface-cluster statistics: sizes are surface-site counts of the clusters
/// that reach the final time slice, normalised by the slice area.
pub fn surface_cluster_stats(real: &Realization) -> Result<ClusterStats> {
    ClusterStats::from_sizes(real.surface_sizes(), real.slice_len())
}

/// Spanning probability for each `(L, p)` on `L^d × L` lattices and the
/// crossing estimate of the threshold.
pub fn threshold_scan(
    kind: PercKind,
    spatial_dims: usize,
    sizes: &[usize],
    ps: &[f64],
    n_real: usize,
    seed: u64,
) -> Result<(Vec<CollapsePoint>, CrossingEstimate)> {
    if sizes.len() < 2 || ps.len() < 3 || n_real < 2 {
        return Err(Error::InvalidInput("threshold scan needs ≥2 sizes, ≥3 p values and ≥2 realizations".into()));
    }
    let mut points = Vec::new();
    for (si, &l) in sizes.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            let cfg = PercConfig::cube(kind, spatial_dims, l, p, derive_seed(seed, &[si as u64, pi as u64]));
            let spans: Vec<bool> = (0..n_real as u64)
                .into_par_iter()
                .map(|id| perc_realization(&cfg, id).map(|r| r.spans()))
                .collect::<Result<_>>()?;
            let hits = spans.iter().filter(|&&s| s).count();
            let q = hits as f64 / n_real as f64;
            // binomial error with a floor so that 0 and 1 stay usable
            let d = (q * (1.0 - q) / n_real as f64).sqrt().max(0.5 / n_real as f64);
            points.push(CollapsePoint { p, l: l as f64, y: q, d });
        }
    }
    let est = crossing_point(&points)?;
    Ok((points, est))
}
