//! Entanglement clusters: connected components of the graph-state graph.

use std::collections::{BTreeMap, VecDeque};

use crate::graph::GraphState;
use crate::{Error, Result};

/// Connected components of the subgraph induced on `sites`, in order of
/// their smallest listed site. Vertices outside `sites` are never entered.
pub fn find_components<N: AsRef<[usize]>>(adjacency: &[N], sites: &[usize]) -> Vec<Vec<usize>> {
    bfs_components(adjacency.len(), sites, |v, out| out.extend_from_slice(adjacency[v].as_ref()))
}

/// [`find_components`] on the graph of a graph state; vertex operators are
/// ignored.
pub fn state_components(state: &GraphState, sites: &[usize]) -> Vec<Vec<usize>> {
    bfs_components(state.len(), sites, |v, out| out.extend(state.neighbors(v)))
}

fn bfs_components(n: usize, sites: &[usize], neighbors: impl Fn(usize, &mut Vec<usize>)) -> Vec<Vec<usize>> {
    let mut state = vec![0u8; n]; // 0 outside, 1 unvisited, 2 visited
    for &s in sites {
        state[s] = 1;
    }
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    let mut nb = Vec::new();
    for &s in sites {
        if state[s] != 1 {
            continue;
        }
        state[s] = 2;
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            nb.clear();
            neighbors(v, &mut nb);
            for &w in &nb {
                if state[w] == 1 {
                    state[w] = 2;
                    queue.push_back(w);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Size statistics of a set of clusters within a volume of `volume` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterStats {
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    pub volume: usize,
    /// `Σ n_s s² / Σ n_s s`.
    pub s_mean: f64,
    pub s_max: usize,
}

impl ClusterStats {
    pub fn from_sizes(mut sizes: Vec<usize>, volume: usize) -> Result<Self> {
        sizes.retain(|&s| s > 0);
        if sizes.is_empty() {
            return Err(Error::InvalidInput("no clusters".into()));
        }
        if volume == 0 {
            return Err(Error::InvalidInput("volume must be positive".into()));
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let (s1, s2) = sizes
            .iter()
            .fold((0u64, 0u64), |(a, b), &s| (a + s as u64, b + (s as u64) * (s as u64)));
        Ok(ClusterStats {
            s_mean: s2 as f64 / s1 as f64,
            s_max: sizes[0],
            sizes,
            volume,
        })
    }

    /// Number of size-`s` clusters per unit volume.
    pub fn n_s(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (s, c) in size_counts(&self.sizes) {
            out.insert(s, c as f64 / self.volume as f64);
        }
        out
    }

    pub fn largest_fraction(&self) -> f64 {
        self.s_max as f64 / self.volume as f64
    }
}

pub fn cluster_stats(components: &[Vec<usize>], volume: usize) -> Result<ClusterStats> {
    ClusterStats::from_sizes(components.iter().map(Vec::len).collect(), volume)
}

/// `s_max / volume`.
pub fn largest_cluster_fraction(stats: &ClusterStats) -> f64 {
    stats.largest_fraction()
}

/// Size → number of clusters of that size.
pub fn size_counts(sizes: &[usize]) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    for &s in sizes {
        *out.entry(s).or_insert(0) += 1;
    }
    out
}

/// Cluster sizes with the largest one removed (the percolating peak).
pub fn without_largest(sizes: &[usize]) -> Vec<usize> {
    let mut v = sizes.to_vec();
    if let Some(i) = v.iter().enumerate().max_by_key(|&(_, s)| *s).map(|(i, _)| i) {
        v.swap_remove(i);
    }
    v
}

/// Fit window `[8, L^d/8]` for the power-law tail of `n_s`.
pub fn tail_window(l: usize, dim: usize) -> (usize, usize) {
    (8, l.pow(dim as u32) / 8)
}

/// One logarithmic bin of an `n_s` histogram.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogBin {
    pub lo: usize,
    /// Exclusive.
    pub hi: usize,
    /// Geometric centre.
    pub s: f64,
    /// Mean `n_s` per integer size inside the bin.
    pub n_s: f64,
}

/// Averages `n_s` over logarithmically spaced size bins with `per_decade`
/// bins per factor of ten. Bins containing no integer are skipped.
pub fn log_bin(n_s: &BTreeMap<usize, f64>, per_decade: usize) -> Vec<LogBin> {
    let Some((&max, _)) = n_s.iter().next_back() else {
        return Vec::new();
    };
    let ratio = 10f64.powf(1.0 / per_decade.max(1) as f64);
    let mut out = Vec::new();
    let mut edge = 1.0f64;
    let mut lo = 1usize;
    while lo <= max {
        edge *= ratio;
        let hi = (edge.ceil() as usize).max(lo + 1);
        if hi > lo {
            let total: f64 = n_s.range(lo..hi).map(|(_, v)| v).sum();
            out.push(LogBin {
                lo,
                hi,
                s: ((lo as f64) * ((hi - 1) as f64)).sqrt(),
                n_s: total / (hi - lo) as f64,
            });
            lo = hi;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn isolated_sites() {
        let adj: Vec<Vec<usize>> = vec![Vec::new(); 5];
        let comps = find_components(&adj, &[0, 1, 2, 3, 4]);
        assert_eq!(comps.len(), 5);
        let st = cluster_stats(&comps, 5).unwrap();
        assert_eq!((st.s_mean, st.s_max), (1.0, 1));
    }

    #[test]
    fn path_plus_isolated() {
        let adj = vec![vec![1], vec![0, 2], vec![1], vec![]];
        let comps = find_components(&adj, &[0, 1, 2, 3]);
        let sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 1]);
    }

    #[test]
    fn induced_subgraph_only() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let comps = find_components(&adj, &[0, 2]);
        assert_eq!(comps, vec![vec![0], vec![2]]);
    }

    #[test]
    fn mean_size_arithmetic() {
        let st = ClusterStats::from_sizes(vec![3, 3, 2], 8).unwrap();
        assert_eq!(st.s_mean, 2.75);
        assert_eq!(st.s_max, 3);
        assert_eq!(st.largest_fraction(), 3.0 / 8.0);
        let total: f64 = st.n_s().iter().map(|(s, n)| *s as f64 * n * 8.0).sum();
        assert!((total - 8.0).abs() < 1e-12);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(cluster_stats(&[], 4).is_err());
    }

    #[test]
    fn peak_removal_and_window() {
        assert_eq!(without_largest(&[2, 9, 1]).len(), 2);
        assert!(!without_largest(&[2, 9, 1]).contains(&9));
        assert_eq!(tail_window(32, 2), (8, 128));
    }

    #[test]
    fn log_bins_preserve_mass() {
        let mut n_s = BTreeMap::new();
        for s in 1..=200usize {
            n_s.insert(s, 1.0 / (s * s) as f64);
        }
        let bins = log_bin(&n_s, 5);
        let binned: f64 = bins.iter().map(|b| b.n_s * (b.hi - b.lo) as f64).sum();
        let direct: f64 = n_s.values().sum();
        assert!((binned - direct).abs() < 1e-12);
        assert!(bins.windows(2).all(|w| w[0].hi == w[1].lo));
    }

    proptest! {
        #[test]
        fn components_partition_the_sites(edges in prop::collection::vec((0usize..30, 0usize..30), 0..60), mask in any::<u32>()) {
            let mut adj = vec![Vec::new(); 30];
            for (a, b) in edges {
                if a != b && !adj[a].contains(&b) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
            let sites: Vec<usize> = (0..30).filter(|s| mask >> s & 1 == 1).collect();
            let comps = find_components(&adj, &sites);
            let mut seen: Vec<usize> = comps.concat();
            seen.sort();
            prop_assert_eq!(&seen, &sites);
            // relabelling by reversal leaves the statistics unchanged
            let n = 30;
            let radj: Vec<Vec<usize>> = (0..n).map(|v| adj[n - 1 - v].iter().map(|w| n - 1 - w).collect()).collect();
            let rsites: Vec<usize> = sites.iter().rev().map(|s| n - 1 - s).collect();
            if !sites.is_empty() {
                let a = cluster_stats(&comps, n).unwrap();
                let b = cluster_stats(&find_components(&radj, &rsites), n).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
