//! Lookup tables specific to the graph-state engine.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::clifford::matrix::{self, Mat2};
use crate::clifford::{LocalClifford, LOCAL_GROUP_ORDER};

/// A local complementation used to strip a vertex operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Reducer {
    /// Complement at the vertex itself: right-multiplies its VOP by
    /// `exp(-iπ/4 X)†`.
    AtVertex,
    /// Complement at a neighbour: right-multiplies the VOP by `exp(iπ/4 Z)†`.
    AtNeighbor,
}

pub(crate) struct EngineTables {
    /// VOP factor appended at the complemented vertex.
    pub lc_vertex: LocalClifford,
    /// VOP factor appended at each neighbour of the complemented vertex.
    pub lc_neighbor: LocalClifford,
    pub reduce: Vec<Vec<Reducer>>,
    /// `cz[edge][vop_a][vop_b] = (edge', vop_a', vop_b')`
    pub cz: Vec<(bool, LocalClifford, LocalClifford)>,
}

impl EngineTables {
    #[inline]
    pub fn cz_entry(&self, edge: bool, a: LocalClifford, b: LocalClifford) -> (bool, LocalClifford, LocalClifford) {
        self.cz[(edge as usize * LOCAL_GROUP_ORDER + a.index()) * LOCAL_GROUP_ORDER + b.index()]
    }
}

pub(crate) fn engine_tables() -> &'static EngineTables {
    static TABLES: OnceLock<EngineTables> = OnceLock::new();
    TABLES.get_or_init(build)
}

fn build() -> EngineTables {
    let lc_vertex = LocalClifford::from_matrix(&matrix::sqrt_minus_i_x().adjoint()).unwrap();
    let lc_neighbor = LocalClifford::from_matrix(&matrix::sqrt_i_z().adjoint()).unwrap();
    let reduce = LocalClifford::all()
        .map(|g| reduction_word(g, lc_vertex, lc_neighbor))
        .collect();
    EngineTables {
        lc_vertex,
        lc_neighbor,
        reduce,
        cz: cz_table(),
    }
}

/// Shortest word `r_1 … r_k` with `g · f(r_1) ⋯ f(r_k) = I`.
fn reduction_word(g: LocalClifford, at_vertex: LocalClifford, at_neighbor: LocalClifford) -> Vec<Reducer> {
    let mut prev: Vec<Option<(usize, Reducer)>> = vec![None; LOCAL_GROUP_ORDER];
    let mut seen = vec![false; LOCAL_GROUP_ORDER];
    let mut queue = std::collections::VecDeque::from([g]);
    seen[g.index()] = true;
    while let Some(h) = queue.pop_front() {
        if h == LocalClifford::IDENTITY {
            let mut word = Vec::new();
            let mut cur = h.index();
            while let Some((p, r)) = prev[cur] {
                word.push(r);
                cur = p;
            }
            word.reverse();
            return word;
        }
        for (r, f) in [(Reducer::AtVertex, at_vertex), (Reducer::AtNeighbor, at_neighbor)] {
            let next = h.compose(f);
            if !seen[next.index()] {
                seen[next.index()] = true;
                prev[next.index()] = Some((h.index(), r));
                queue.push_back(next);
            }
        }
    }
    unreachable!("local complementations generate the local Clifford group")
}

type Ket2 = [Complex64; 4];

/// `(A ⊗ B) CZ^edge |++⟩`, qubit `a` is the high-order bit.
fn two_qubit_graph_state(edge: bool, a: &Mat2, b: &Mat2) -> Ket2 {
    let half = Complex64::new(0.5, 0.0);
    let mut psi = [half; 4];
    if edge {
        psi[3] = -half;
    }
    let u = a.kron(b);
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|k| u.0[i][k] * psi[k]).sum();
    }
    out
}

fn same_ray(x: &Ket2, y: &Ket2) -> bool {
    let overlap: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    (overlap.norm() - 1.0).abs() < 1e-9
}

/// Result of a CZ on an isolated pair (or on a pair whose operands with
/// outside neighbours carry diagonal VOPs). Whenever an input VOP is
/// diagonal the chosen output VOP on that qubit is diagonal too, so CZs to
/// outside neighbours still commute through it.
fn cz_table() -> Vec<(bool, LocalClifford, LocalClifford)> {
    let mut candidates = Vec::with_capacity(2 * LOCAL_GROUP_ORDER * LOCAL_GROUP_ORDER);
    for edge in [false, true] {
        for a in LocalClifford::all() {
            for b in LocalClifford::all() {
                candidates.push(((edge, a, b), two_qubit_graph_state(edge, &a.matrix(), &b.matrix())));
            }
        }
    }
    let cz = matrix::cz();
    let mut table = Vec::with_capacity(candidates.len());
    for &((_, a, b), psi) in &candidates {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = cz.0[i][i] * psi[i];
        }
        let entry = candidates
            .iter()
            .find(|((_, a2, b2), phi)| {
                (!a.is_diagonal() || a2.is_diagonal())
                    && (!b.is_diagonal() || b2.is_diagonal())
                    && same_ray(&out, phi)
            })
            .map(|&(key, _)| key)
            .expect("CZ lookup table has no admissible entry");
        table.push(entry);
    }
    table
}
