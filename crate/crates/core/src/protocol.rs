//! Trajectory drivers for the hybrid-circuit and measurement-only protocols.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{sample_c2, LocalClifford, Pauli};
use crate::clusters::{state_components, ClusterStats};
use crate::graph::GraphState;
use crate::lattice::{quarter_partition, Boundary, GateLayer, Lattice};
use crate::rng::stream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Clifford1d,
    Clifford2d,
    Ptfim1d,
    Ptfim2d,
}

impl Protocol {
    pub fn dim(self) -> usize {
        match self {
            Protocol::Clifford1d | Protocol::Ptfim1d => 1,
            Protocol::Clifford2d | Protocol::Ptfim2d => 2,
        }
    }

    pub fn is_ptfim(self) -> bool {
        matches!(self, Protocol::Ptfim1d | Protocol::Ptfim2d)
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Clifford1d => "clifford1d",
            Protocol::Clifford2d => "clifford2d",
            Protocol::Ptfim1d => "ptfim1d",
            Protocol::Ptfim2d => "ptfim2d",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    #[default]
    None,
    I3,
    HalfEntropy,
    Purification,
    AncillaPair,
    SingleAncilla,
}

impl Probe {
    /// Name of the recorded observable.
    pub fn observable(self) -> Option<&'static str> {
        match self {
            Probe::None => None,
            Probe::I3 => Some("i3"),
            Probe::HalfEntropy => Some("s_half"),
            Probe::Purification => Some("s_sys"),
            Probe::AncillaPair => Some("i2_pair"),
            Probe::SingleAncilla => Some("s_anc"),
        }
    }

    fn uses_ancillas(self) -> bool {
        matches!(self, Probe::AncillaPair | Probe::SingleAncilla)
    }
}

fn default_window() -> usize {
    4
}

/// One experiment: a protocol on a lattice at a fixed measurement rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    #[serde(rename = "L", alias = "l")]
    pub l: usize,
    #[serde(default)]
    pub boundary: Boundary,
    pub p: f64,
    /// Defaults to `4L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<usize>,
    /// Ancilla attachment step; the ancilla joins after step `t0`.
    #[serde(default)]
    pub t0: usize,
    #[serde(default)]
    pub probe: Probe,
    #[serde(default = "default_window")]
    pub window: usize,
    pub n_traj: usize,
    #[serde(default)]
    pub seed: u64,
    /// First recorded step. Defaults depend on the probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_from: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(protocol: Protocol, l: usize, p: f64, probe: Probe, n_traj: usize) -> Self {
        ExperimentConfig {
            protocol,
            l,
            boundary: Boundary::Periodic,
            p,
            t_max: None,
            t0: 0,
            probe,
            window: default_window(),
            n_traj,
            seed: 0,
            record_from: None,
        }
    }

    pub fn t_max(&self) -> usize {
        self.t_max.unwrap_or(4 * self.l)
    }

    pub fn record_from(&self) -> usize {
        self.record_from.unwrap_or(match self.probe {
            Probe::I3 | Probe::SingleAncilla | Probe::None => (self.t_max() + 1).saturating_sub(self.window),
            Probe::HalfEntropy | Probe::Purification => 1,
            Probe::AncillaPair => self.t0,
        })
    }

    /// Recorded steps.
    pub fn times(&self) -> std::ops::RangeInclusive<usize> {
        self.record_from()..=self.t_max()
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.protocol.dim(), self.l, self.boundary)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p must lie in [0, 1], got {}", self.p));
        }
        if self.l < 2 {
            return bad(format!("L must be at least 2, got {}", self.l));
        }
        if !self.protocol.is_ptfim() && self.l % 2 != 0 {
            return bad(format!("{} needs even L, got {}", self.protocol.name(), self.l));
        }
        if self.probe == Probe::I3 && self.l % 4 != 0 {
            return bad(format!("the i3 probe needs L divisible by 4, got {}", self.l));
        }
        if self.probe == Probe::AncillaPair && self.l % 2 != 0 {
            return bad(format!("the ancilla_pair probe needs even L, got {}", self.l));
        }
        if self.t_max() == 0 {
            return bad("t_max must be at least 1".into());
        }
        if self.window == 0 {
            return bad("window must be at least 1".into());
        }
        if self.n_traj == 0 {
            return bad("n_traj must be at least 1".into());
        }
        if self.probe.uses_ancillas() && self.t0 > self.t_max() {
            return bad(format!("t0 = {} exceeds t_max = {}", self.t0, self.t_max()));
        }
        let from = self.record_from();
        if from > self.t_max() {
            return bad(format!("record_from = {from} exceeds t_max = {}", self.t_max()));
        }
        if self.probe.uses_ancillas() && from < self.t0 {
            return bad(format!("record_from = {from} precedes ancilla attachment at t0 = {}", self.t0));
        }
        let recorded = self.t_max() - from + 1;
        if self.probe != Probe::None && self.window > recorded {
            return bad(format!("window {} exceeds the {recorded} recorded steps", self.window));
        }
        let n = self.lattice()?.sites();
        let total = if self.probe == Probe::Purification { 2 * n } else { n + 2 };
        if total > u32::MAX as usize {
            return bad("lattice too large".into());
        }
        Ok(())
    }
}

/// Observable time series and final-state clusters of one trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub traj_id: u64,
    pub times: Vec<usize>,
    /// `(name, values)` aligned with `times`.
    pub series: Vec<(&'static str, Vec<f64>)>,
    /// Components of the system register at `t_max`.
    pub clusters: ClusterStats,
}

impl TrajectoryRecord {
    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|(n, _)| *n == name).map(|(_, v)| v.as_slice())
    }
}

/// `N` Bell pairs: system qubit `i` with reference qubit `N + i`.
pub fn setup_purification(n: usize) -> Result<GraphState> {
    let mut g = GraphState::new_plus_state(2 * n)?;
    for i in 0..n {
        g.apply_cz(i, n + i)?;
        g.apply_local(n + i, LocalClifford::H)?;
    }
    Ok(g)
}

/// Resets `q` to `|0⟩` through a Z measurement, then entangles a fresh
/// `|+⟩` ancilla with it by a CNOT. Returns the ancilla index.
pub fn attach_ancilla<R: Rng + ?Sized>(state: &mut GraphState, q: usize, rng: &mut R) -> Result<usize> {
    if state.measure_pauli(q, Pauli::Z, rng)?.is_minus() {
        state.apply_local(q, LocalClifford::X)?;
    }
    let anc = state.add_qubit();
    state.apply_cnot(anc, q)?;
    Ok(anc)
}

/// One measurement-only step: `Z_i Z_j` on each bond with probability
/// `1 − p` (bonds in raster order), then `X_i` on each site with
/// probability `p`.
pub fn run_ptfim_step<R: Rng + ?Sized>(state: &mut GraphState, lat: &Lattice, p: f64, rng: &mut R) -> Result<()> {
    run_ptfim_step_on(state, &lat.edges(), lat.sites(), p, rng)
}

fn run_ptfim_step_on<R: Rng + ?Sized>(
    state: &mut GraphState,
    edges: &[(usize, usize)],
    sites: usize,
    p: f64,
    rng: &mut R,
) -> Result<()> {
    for &(a, b) in edges {
        if rng.random::<f64>() >= p {
            state.measure_parity_zz(a, b, rng)?;
        }
    }
    for q in 0..sites {
        if rng.random::<f64>() < p {
            state.measure_pauli(q, Pauli::X, rng)?;
        }
    }
    Ok(())
}

/// One hybrid-circuit step: a layer of fresh uniform two-qubit Cliffords,
/// then a Z measurement on each site with probability `p`, in site order.
pub fn run_clifford_step<R: Rng + ?Sized>(
    state: &mut GraphState,
    layer: &GateLayer,
    sites: usize,
    p: f64,
    rng: &mut R,
) -> Result<()> {
    for g in layer {
        let c = sample_c2(rng);
        state.apply_two_qubit_clifford(g.control, g.partner, c)?;
    }
    for q in 0..sites {
        if rng.random::<f64>() < p {
            state.measure_pauli(q, Pauli::Z, rng)?;
        }
    }
    Ok(())
}

/// `S_A + S_B + S_C − S_AB − S_AC − S_BC + S_ABC`.
pub fn tripartite_information(state: &GraphState, a: &[usize], b: &[usize], c: &[usize]) -> i64 {
    let s = |r: &[&[usize]]| state.entanglement_entropy(&r.concat()) as i64;
    s(&[a]) + s(&[b]) + s(&[c]) - s(&[a, b]) - s(&[a, c]) - s(&[b, c]) + s(&[a, b, c])
}

/// `S_a + S_b − S_ab`.
pub fn mutual_information(state: &GraphState, a: &[usize], b: &[usize]) -> i64 {
    state.entanglement_entropy(a) as i64 + state.entanglement_entropy(b) as i64
        - state.entanglement_entropy(&[a, b].concat()) as i64
}

/// Sites of the two probe ancillas: `(0, L/2)` and `(L/2, L/2)` in 2D,
/// `0` and `L/2` in 1D.
pub fn ancilla_pair_sites(lat: &Lattice) -> (usize, usize) {
    let h = lat.size() / 2;
    if lat.dim() == 1 {
        (0, h)
    } else {
        (lat.index(0, h), lat.index(h, h))
    }
}

/// Runs trajectory `traj_id` of `cfg` on its own random stream.
pub fn run_trajectory(cfg: &ExperimentConfig, traj_id: u64) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let lat = cfg.lattice()?;
    let n = lat.sites();
    let mut rng = stream(cfg.seed, traj_id);
    let mut state = if cfg.probe == Probe::Purification {
        setup_purification(n)?
    } else {
        GraphState::new_plus_state(n)?
    };

    let (layers, edges) = if cfg.protocol.is_ptfim() {
        (Vec::new(), lat.edges())
    } else {
        let period = if lat.dim() == 1 { 2 } else { 8 };
        ((0..period).map(|k| lat.schedule(k)).collect::<Result<Vec<_>>>()?, Vec::new())
    };
    let quarters = if cfg.probe == Probe::I3 {
        Some(quarter_partition(&lat)?)
    } else {
        None
    };
    let half = lat.half();
    let system: Vec<usize> = (0..n).collect();

    let t_max = cfg.t_max();
    let from = cfg.record_from();
    let mut times = Vec::with_capacity(t_max + 1 - from);
    let mut values = Vec::with_capacity(t_max + 1 - from);
    let mut ancillas: Vec<usize> = Vec::new();

    for t in 0..=t_max {
        if t > 0 {
            if cfg.protocol.is_ptfim() {
                run_ptfim_step_on(&mut state, &edges, n, cfg.p, &mut rng)?;
            } else {
                let layer = &layers[(t - 1) % layers.len()];
                run_clifford_step(&mut state, layer, n, cfg.p, &mut rng)?;
            }
        }
        if t == cfg.t0 {
            match cfg.probe {
                Probe::SingleAncilla => ancillas.push(attach_ancilla(&mut state, 0, &mut rng)?),
                Probe::AncillaPair => {
                    let (s1, s2) = ancilla_pair_sites(&lat);
                    ancillas.push(attach_ancilla(&mut state, s1, &mut rng)?);
                    ancillas.push(attach_ancilla(&mut state, s2, &mut rng)?);
                }
                _ => {}
            }
        }
        if t < from {
            continue;
        }
        let value = match cfg.probe {
            Probe::None => continue,
            Probe::I3 => {
                let q = quarters.as_ref().expect("quarters exist for the i3 probe");
                tripartite_information(&state, &q[0], &q[1], &q[2]) as f64
            }
            Probe::HalfEntropy => state.entanglement_entropy(&half) as f64,
            Probe::Purification => state.entanglement_entropy(&system) as f64,
            Probe::AncillaPair => mutual_information(&state, &ancillas[..1], &ancillas[1..]) as f64,
            Probe::SingleAncilla => state.entanglement_entropy(&ancillas) as f64,
        };
        times.push(t);
        values.push(value);
    }

    let comps = state_components(&state, &system);
    let clusters = ClusterStats::from_sizes(comps.iter().map(Vec::len).collect(), n)?;
    let series = cfg.probe.observable().map(|name| vec![(name, values)]).unwrap_or_default();
    Ok(TrajectoryRecord {
        traj_id,
        times,
        series,
        clusters,
    })
}

/// Trailing block means over `w` consecutive entries, aligned so that the
/// last block ends at the last entry. A partial leading block is dropped.
pub fn window_average(series: &[f64], w: usize) -> Result<Vec<f64>> {
    if w == 0 {
        return Err(Error::InvalidInput("window must be at least 1".into()));
    }
    if w > series.len() {
        return Err(Error::WindowTooLarge {
            window: w,
            len: series.len(),
        });
    }
    let skip = series.len() % w;
    Ok(series[skip..]
        .chunks_exact(w)
        .map(|c| c.iter().sum::<f64>() / w as f64)
        .collect())
}

/// [`window_average`] together with the time stamp of each block's last
/// entry.
pub fn window_average_times(times: &[usize], series: &[f64], w: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    if times.len() != series.len() {
        return Err(Error::InvalidInput("times and values differ in length".into()));
    }
    let avg = window_average(series, w)?;
    let skip = series.len() % w;
    let t = times[skip..].chunks_exact(w).map(|c| c[w - 1]).collect();
    Ok((t, avg))
}
