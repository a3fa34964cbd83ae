//! Graph-state stabilizer engine.
//!
//! A stabilizer state on `n` qubits is stored as a simple undirected graph
//! `G` plus one local Clifford ("vertex operator", VOP) per vertex:
//! `|ψ⟩ = (⊗_v VOP_v) |G⟩`, where `|G⟩` is `|+⟩^n` with a CZ applied across
//! every edge. VOPs are elements of the projective single-qubit Clifford
//! group; since that group contains the Paulis, signs of measured operators
//! are fully determined by the VOPs and no separate phase bits are needed.
//!
//! Adjacency is a packed bit matrix, so a local complementation at `v` costs
//! `deg(v)` row XORs of `n/64` words each.

mod tables;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{LocalClifford, Pauli, Step, TwoQubitClifford};
use crate::gf2::BitMatrix;
use crate::{Error, Result};

use tables::{engine_tables, Reducer};

/// Largest register accepted by [`GraphState::to_statevector`].
pub const MAX_DENSE_QUBITS: usize = 12;

/// Result of a projective measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// `+1` or `-1`.
    pub value: i8,
    /// The outcome was fixed by the state; no random bit was consumed.
    pub deterministic: bool,
}

impl Outcome {
    pub fn is_minus(self) -> bool {
        self.value < 0
    }
}

const WORD: usize = 64;

/// Graph plus vertex operators. Row `v` of the packed adjacency matrix holds
/// the neighbour set of `v`; iteration is in increasing vertex order.
#[derive(Clone, Debug)]
pub struct GraphState {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    vop: Vec<LocalClifford>,
}

/// Plain snapshot of a state, used for fixtures and debugging.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDump {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub vops: Vec<usize>,
}

/// Set bits of a packed row, in increasing order.
#[derive(Clone)]
pub struct Neighbors<'a> {
    words: &'a [u64],
    k: usize,
    cur: u64,
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.cur == 0 {
            self.k += 1;
            self.cur = *self.words.get(self.k)?;
        }
        let b = self.cur.trailing_zeros() as usize;
        self.cur &= self.cur - 1;
        Some(self.k * WORD + b)
    }
}

impl PartialEq for GraphState {
    fn eq(&self, other: &Self) -> bool {
        self.vop == other.vop && (0..self.n).all(|v| self.neighbors(v).eq(other.neighbors(v)))
    }
}

impl Eq for GraphState {}

impl GraphState {
    /// `|+⟩^{⊗n}`: no edges, identity VOPs.
    pub fn new_plus_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        // room for a couple of scratch or ancilla qubits
        let stride = (n + 2).div_ceil(WORD);
        Ok(GraphState {
            n,
            stride,
            rows: vec![0; n * stride],
            vop: vec![LocalClifford::IDENTITY; n],
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        let words = self.row(v);
        Neighbors {
            words,
            k: 0,
            cur: words[0],
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Neighbour lists of all vertices.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|v| self.neighbors(v).collect()).collect()
    }

    pub fn vop(&self, v: usize) -> LocalClifford {
        self.vop[v]
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.stride + b / WORD] >> (b % WORD) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.neighbors(a).filter(move |&b| b > a).map(move |b| (a, b)))
    }

    /// Appends a fresh qubit in `|+⟩` and returns its index.
    pub fn add_qubit(&mut self) -> usize {
        if self.n + 1 > self.stride * WORD {
            let stride = (self.n + 1).div_ceil(WORD) + 1;
            let mut rows = vec![0; self.n * stride];
            for v in 0..self.n {
                rows[v * stride..v * stride + self.stride].copy_from_slice(self.row(v));
            }
            self.rows = rows;
            self.stride = stride;
        }
        self.rows.resize((self.n + 1) * self.stride, 0);
        self.vop.push(LocalClifford::IDENTITY);
        self.n += 1;
        self.n - 1
    }

    /// Drops the highest-index qubit, which must be unentangled.
    pub fn remove_last_qubit(&mut self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyRegister);
        }
        let last = self.n - 1;
        if self.row(last).iter().any(|&w| w != 0) {
            return Err(Error::InvalidInput(format!("qubit {last} is still entangled")));
        }
        self.rows.truncate(last * self.stride);
        self.vop.pop();
        self.n = last;
        Ok(())
    }

    fn check(&self, q: usize) -> Result<()> {
        if q < self.len() {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                index: q,
                len: self.len(),
            })
        }
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SameQubit(a));
        }
        Ok(())
    }

    /// `VOP_q ← g ∘ VOP_q`.
    pub fn apply_local(&mut self, q: usize, g: LocalClifford) -> Result<()> {
        self.check(q)?;
        self.vop[q] = g.compose(self.vop[q]);
        Ok(())
    }

    /// CNOT with the given control and target.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.apply_local(target, LocalClifford::H)?;
        self.apply_cz(control, target)?;
        self.apply_local(target, LocalClifford::H)
    }

    /// Local complementation at `q`. The represented state is unchanged:
    /// edges inside `N(q)` are toggled and the VOPs of `q` and `N(q)` absorb
    /// the compensating local Cliffords.
    pub fn local_complement(&mut self, q: usize) -> Result<()> {
        self.check(q)?;
        self.lc(q);
        Ok(())
    }

    fn lc(&mut self, v: usize) {
        let t = engine_tables();
        let st = self.stride;
        let base = v * st;
        // row v is untouched: only rows of neighbours change
        for k in 0..st {
            let mut word = self.rows[base + k];
            while word != 0 {
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                let w = k * WORD + bit;
                let wbase = w * st;
                for j in 0..st {
                    let x = self.rows[base + j];
                    self.rows[wbase + j] ^= x;
                }
                self.rows[wbase + k] ^= 1 << bit;
                self.vop[w] = self.vop[w].compose(t.lc_neighbor);
            }
        }
        self.vop[v] = self.vop[v].compose(t.lc_vertex);
    }

    #[inline]
    fn toggle_edge(&mut self, a: usize, b: usize) {
        self.rows[a * self.stride + b / WORD] ^= 1 << (b % WORD);
        self.rows[b * self.stride + a / WORD] ^= 1 << (a % WORD);
    }

    fn lowest_neighbor_except(&self, v: usize, avoid: usize) -> Option<usize> {
        self.neighbors(v).find(|&w| w != avoid)
    }

    fn has_other_neighbor(&self, v: usize, avoid: usize) -> bool {
        self.lowest_neighbor_except(v, avoid).is_some()
    }

    /// Strips `VOP_v` to the identity using complementations at `v` and at
    /// its lowest-index neighbour other than `avoid`.
    fn remove_vop(&mut self, v: usize, avoid: usize) {
        let t = engine_tables();
        let word = &t.reduce[self.vop[v].index()];
        if word.is_empty() {
            return;
        }
        let helper = self.lowest_neighbor_except(v, avoid);
        for step in word {
            match step {
                Reducer::AtVertex => self.lc(v),
                Reducer::AtNeighbor => self.lc(helper.expect("VOP reduction needs a neighbour")),
            }
        }
        debug_assert_eq!(self.vop[v], LocalClifford::IDENTITY);
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        self.cz(a, b);
        Ok(())
    }

    fn cz(&mut self, a: usize, b: usize) {
        if self.has_other_neighbor(a, b) {
            self.remove_vop(a, b);
        }
        if self.has_other_neighbor(b, a) {
            self.remove_vop(b, a);
        }
        if self.has_other_neighbor(a, b) && !self.vop[a].is_diagonal() {
            self.remove_vop(a, b);
        }
        let (va, vb) = (self.vop[a], self.vop[b]);
        debug_assert!(va.is_diagonal() || !self.has_other_neighbor(a, b));
        debug_assert!(vb.is_diagonal() || !self.has_other_neighbor(b, a));
        if va.is_diagonal() && vb.is_diagonal() {
            self.toggle_edge(a, b);
        } else {
            let edge = self.has_edge(a, b);
            let (edge2, va2, vb2) = engine_tables().cz_entry(edge, va, vb);
            if edge != edge2 {
                self.toggle_edge(a, b);
            }
            self.vop[a] = va2;
            self.vop[b] = vb2;
        }
    }

    /// Applies `c` to the ordered pair `(a, b)` by replaying its CZ-based
    /// decomposition.
    pub fn apply_two_qubit_clifford(&mut self, a: usize, b: usize, c: TwoQubitClifford) -> Result<()> {
        self.check_pair(a, b)?;
        for step in c.decomposition() {
            match *step {
                Step::LocalA(g) => self.vop[a] = g.compose(self.vop[a]),
                Step::LocalB(g) => self.vop[b] = g.compose(self.vop[b]),
                Step::Cz => self.cz(a, b),
            }
        }
        Ok(())
    }

    /// Projective measurement of `basis` on qubit `q`.
    ///
    /// The observable is pulled back through `VOP_q`. A graph-basis `X` on an
    /// isolated vertex is deterministic; graph-basis `X` and `Y` otherwise are
    /// turned into `Z` by local complementations, and a graph-basis `Z`
    /// consumes one random bit and isolates the vertex.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, q: usize, basis: Pauli, rng: &mut R) -> Result<Outcome> {
        self.check(q)?;
        Ok(self.measure(q, basis, rng))
    }

    fn measure<R: Rng + ?Sized>(&mut self, q: usize, basis: Pauli, rng: &mut R) -> Outcome {
        loop {
            let pulled = self.vop[q].conjugate_pauli(basis);
            match pulled.pauli {
                Pauli::X if self.is_isolated(q) => {
                    return Outcome {
                        value: pulled.sign,
                        deterministic: true,
                    };
                }
                Pauli::X => {
                    let w = self.neighbors(q).next().expect("vertex has a neighbour");
                    self.lc(w);
                }
                Pauli::Y => self.lc(q),
                Pauli::Z => {
                    let minus = rng.random::<bool>();
                    self.project_graph_z(q, minus);
                    return Outcome {
                        value: if minus { -pulled.sign } else { pulled.sign },
                        deterministic: false,
                    };
                }
            }
        }
    }

    fn is_isolated(&self, v: usize) -> bool {
        self.row(v).iter().all(|&w| w == 0)
    }

    /// Projects the graph state onto `Z_v = ±1` (graph frame).
    fn project_graph_z(&mut self, v: usize, minus: bool) {
        let st = self.stride;
        let vmask = 1u64 << (v % WORD);
        for k in 0..st {
            let mut word = std::mem::take(&mut self.rows[v * st + k]);
            while word != 0 {
                let w = k * WORD + word.trailing_zeros() as usize;
                word &= word - 1;
                self.rows[w * st + v / WORD] &= !vmask;
                if minus {
                    self.vop[w] = self.vop[w].compose(LocalClifford::Z);
                }
            }
        }
        let frame = if minus { LocalClifford::XH } else { LocalClifford::H };
        self.vop[v] = self.vop[v].compose(frame);
    }

    /// Measures `Z_a Z_b` through a scratch ancilla: prepare `|0⟩`, CNOT from
    /// `a` and from `b`, measure the ancilla in Z and drop it.
    pub fn measure_parity_zz<R: Rng + ?Sized>(&mut self, a: usize, b: usize, rng: &mut R) -> Result<Outcome> {
        self.check_pair(a, b)?;
        // |0⟩ = H|+⟩ and the CNOT's leading H cancel it; the inner H pair cancels too
        let anc = self.add_qubit();
        self.cz(a, anc);
        self.cz(b, anc);
        self.vop[anc] = LocalClifford::H.compose(self.vop[anc]);
        let outcome = self.measure(anc, Pauli::Z, rng);
        debug_assert!(self.is_isolated(anc));
        self.remove_last_qubit()?;
        Ok(outcome)
    }

    /// Entanglement entropy (in bits) between `region` and its complement:
    /// the GF(2) rank of the biadjacency matrix across the cut.
    pub fn entanglement_entropy(&self, region: &[usize]) -> usize {
        let st = self.stride;
        let mut mask = vec![0u64; st];
        let mut size = 0;
        for &q in region {
            let m = 1u64 << (q % WORD);
            if mask[q / WORD] & m == 0 {
                mask[q / WORD] |= m;
                size += 1;
            }
        }
        // the side with fewer vertices gives fewer rows
        let complement = 2 * size > self.n;
        if complement {
            for (k, m) in mask.iter_mut().enumerate() {
                let valid = if (k + 1) * WORD <= self.n {
                    u64::MAX
                } else if k * WORD >= self.n {
                    0
                } else {
                    (1u64 << (self.n - k * WORD)) - 1
                };
                *m = !*m & valid;
            }
        }
        let members: Vec<usize> = Neighbors {
            words: &mask,
            k: 0,
            cur: mask[0],
        }
        .filter(|&q| self.row(q).iter().zip(&mask).any(|(r, m)| r & !m != 0))
        .collect();
        if members.is_empty() {
            return 0;
        }
        let mut m = BitMatrix::zeros(members.len(), self.n);
        for (i, &q) in members.iter().enumerate() {
            for ((dst, r), msk) in m.row_words_mut(i).iter_mut().zip(self.row(q)).zip(&mask) {
                *dst = r & !msk;
            }
        }
        m.rank_in_place()
    }

    /// Dense amplitudes, qubit `q` on bit `q` of the basis index.
    pub fn to_statevector(&self) -> Result<Vec<Complex64>> {
        let n = self.len();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                n,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let norm = (dim as f64).sqrt().recip();
        let mut psi: Vec<Complex64> = (0..dim)
            .map(|z| {
                let parity = self.edges().filter(|&(a, b)| (z >> a) & 1 == 1 && (z >> b) & 1 == 1).count();
                Complex64::new(if parity % 2 == 0 { norm } else { -norm }, 0.0)
            })
            .collect();
        for q in 0..n {
            let m = self.vop[q].matrix();
            let bit = 1usize << q;
            for z in 0..dim {
                if z & bit == 0 {
                    let (x0, x1) = (psi[z], psi[z | bit]);
                    psi[z] = m.0[0][0] * x0 + m.0[0][1] * x1;
                    psi[z | bit] = m.0[1][0] * x0 + m.0[1][1] * x1;
                }
            }
        }
        Ok(psi)
    }

    /// Checks symmetry, absence of self-loops and clear padding bits.
    pub fn is_consistent(&self) -> bool {
        self.vop.len() == self.n
            && self.rows.len() == self.n * self.stride
            && (0..self.n).all(|v| {
                !self.has_edge(v, v) && self.neighbors(v).all(|w| w < self.n && self.has_edge(w, v))
            })
    }

    pub fn dump(&self) -> GraphDump {
        GraphDump {
            n: self.len(),
            edges: self.edges().collect(),
            vops: self.vop.iter().map(|g| g.index()).collect(),
        }
    }

    pub fn from_dump(dump: &GraphDump) -> Result<Self> {
        let mut g = Self::new_plus_state(dump.n)?;
        if dump.vops.len() != dump.n {
            return Err(Error::InvalidInput("vop list length differs from n".into()));
        }
        for &(a, b) in &dump.edges {
            g.check_pair(a, b)?;
            if g.has_edge(a, b) {
                return Err(Error::InvalidInput(format!("duplicate edge ({a}, {b})")));
            }
            g.toggle_edge(a, b);
        }
        for (q, &i) in dump.vops.iter().enumerate() {
            g.vop[q] = LocalClifford::new(i)
                .ok_or_else(|| Error::InvalidInput(format!("vop index {i} out of range")))?;
        }
        Ok(g)
    }
}
