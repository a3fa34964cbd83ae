//! The two-qubit Clifford group modulo global phase.
//!
//! Elements are identified by their action on the Pauli group (images of
//! `X_a, Z_a, X_b, Z_b` with signs), which is faithful modulo phase. Ids are
//! assigned in breadth-first order from the identity using the generator
//! order `[H_a, H_b, S_a, S_b, CZ]`, so they are stable across runs.
//!
//! Each element is decomposed as `(A ⊗ B) · E_k · (C ⊗ D)` where `E_k` is one
//! of four double-coset representatives using 0, 1, 2 or 3 CZ gates.

use std::sync::OnceLock;

use rand::Rng;

use super::local::LocalClifford;
use super::matrix::{self, Mat4};
use super::Pauli;

pub const GROUP_ORDER: usize = 11_520;

/// Number of elements using 0, 1, 2 and 3 CZ gates.
pub const CLASS_SIZES: [usize; 4] = [576, 5184, 5184, 576];

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct TwoQubitClifford(u16);

/// One step of a decomposition acting on an ordered pair `(a, b)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Step {
    LocalA(LocalClifford),
    LocalB(LocalClifford),
    Cz,
}

impl TwoQubitClifford {
    pub const IDENTITY: Self = Self(0);

    pub fn from_id(id: usize) -> Option<Self> {
        (id < GROUP_ORDER).then_some(Self(id as u16))
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn cz() -> Self {
        let t = tables();
        Self(t.index_of(&CZ_TABLEAU).expect("CZ is a Clifford"))
    }

    /// The element realised by `g_a ⊗ g_b`.
    pub fn local(g_a: LocalClifford, g_b: LocalClifford) -> Self {
        let t = tables();
        Self(t.index_of(&apply_local_tableau(g_a, g_b, &IDENTITY_TABLEAU)).expect("local Clifford"))
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..GROUP_ORDER as u16).map(Self)
    }

    pub fn decomposition(self) -> &'static [Step] {
        &tables().decompositions[self.id()]
    }

    /// Number of CZ gates in the decomposition, which labels the double coset
    /// `C1⊗C1 \ C2 / C1⊗C1` the element lives in.
    pub fn entangling_class(self) -> usize {
        tables().class[self.id()] as usize
    }

    /// Unitary accumulated along the breadth-first enumeration path; it does
    /// not depend on the decomposition.
    pub fn unitary(self) -> Mat4 {
        unitaries()[self.id()]
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(rng.random_range(0..GROUP_ORDER as u16))
    }

    /// Images of `X_a, Z_a, X_b, Z_b` under conjugation, as signed Paulis on
    /// the pair. Returned as `(sign, [Option<Pauli>; 2])`.
    pub fn pauli_images(self) -> [(i8, [Option<Pauli>; 2]); 4] {
        tables().tableaux[self.id()].map(|p| {
            let sign = if p & SIGN != 0 { -1 } else { 1 };
            let q = |x: u8, z: u8| match (x, z) {
                (0, 0) => None,
                (1, 0) => Some(Pauli::X),
                (0, 1) => Some(Pauli::Z),
                _ => Some(Pauli::Y),
            };
            (sign, [q(p & 1, (p >> 1) & 1), q((p >> 2) & 1, (p >> 3) & 1)])
        })
    }
}

pub fn sample_c2<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitClifford {
    TwoQubitClifford::sample(rng)
}

pub fn decompose_c2(c: TwoQubitClifford) -> &'static [Step] {
    c.decomposition()
}

// --- Pauli tableaux -------------------------------------------------------

/// Hermitian two-qubit Pauli: bit0 x_a, bit1 z_a, bit2 x_b, bit3 z_b, bit4 sign.
type Pauli2 = u8;
const SIGN: u8 = 1 << 4;
type Tableau = [Pauli2; 4];

const XA: u8 = 0b0001;
const ZA: u8 = 0b0010;
const XB: u8 = 0b0100;
const ZB: u8 = 0b1000;

const IDENTITY_TABLEAU: Tableau = [XA, ZA, XB, ZB];
const CZ_TABLEAU: Tableau = [XA | ZB, ZA, XB | ZA, ZB];

fn generators() -> [(Tableau, Mat4, [Step; 1]); 5] {
    let h = LocalClifford::H;
    let s = LocalClifford::S;
    [
        ([ZA, XA, XB, ZB], matrix::on_a(&matrix::hadamard()), [Step::LocalA(h)]),
        ([XA, ZA, ZB, XB], matrix::on_b(&matrix::hadamard()), [Step::LocalB(h)]),
        ([XA | ZA, ZA, XB, ZB], matrix::on_a(&matrix::phase_s()), [Step::LocalA(s)]),
        ([XA, ZA, XB | ZB, ZB], matrix::on_b(&matrix::phase_s()), [Step::LocalB(s)]),
        (CZ_TABLEAU, matrix::cz(), [Step::Cz]),
    ]
}

/// Phase exponent `e` (mod 4) and bits of `i^e σ(p) σ(q)`-normalised product.
#[inline]
fn mul_phase(p: u8, q: u8) -> (u8, u8) {
    let mut e: i32 = 0;
    for qubit in 0..2 {
        let sh = 2 * qubit;
        let (x1, z1) = (((p >> sh) & 1) as i32, ((p >> (sh + 1)) & 1) as i32);
        let (x2, z2) = (((q >> sh) & 1) as i32, ((q >> (sh + 1)) & 1) as i32);
        let (x, z) = (x1 ^ x2, z1 ^ z2);
        e += x1 * z1 + x2 * z2 + 2 * z1 * x2 - x * z;
    }
    ((p ^ q) & 0b1111, e.rem_euclid(4) as u8)
}

/// Conjugates a Hermitian Pauli by the Clifford described by `t`.
fn apply_tableau(t: &Tableau, p: Pauli2) -> Pauli2 {
    let mut e: u8 = if p & SIGN != 0 { 2 } else { 0 };
    // σ(x, z) = i^{xz} X^x Z^z on each qubit
    e += (p & 1) & ((p >> 1) & 1);
    e += ((p >> 2) & 1) & ((p >> 3) & 1);
    let mut bits = 0u8;
    for (k, &img) in t.iter().enumerate() {
        if p & (1 << k) != 0 {
            if img & SIGN != 0 {
                e += 2;
            }
            let (b, ph) = mul_phase(bits, img & 0b1111);
            bits = b;
            e += ph;
        }
    }
    e %= 4;
    debug_assert!(e % 2 == 0, "image of a Hermitian Pauli must be Hermitian");
    bits | if e == 2 { SIGN } else { 0 }
}

fn compose_tableau(outer: &Tableau, inner: &Tableau) -> Tableau {
    inner.map(|p| apply_tableau(outer, p))
}

fn map_local(g: LocalClifford, x: u8, z: u8) -> (u8, u8, bool) {
    let p = match (x, z) {
        (0, 0) => return (0, 0, false),
        (1, 0) => Pauli::X,
        (0, 1) => Pauli::Z,
        _ => Pauli::Y,
    };
    let img = g.map_pauli(p);
    let (xo, zo) = match img.pauli {
        Pauli::X => (1, 0),
        Pauli::Z => (0, 1),
        Pauli::Y => (1, 1),
    };
    (xo, zo, img.sign < 0)
}

fn apply_local_tableau(g_a: LocalClifford, g_b: LocalClifford, t: &Tableau) -> Tableau {
    t.map(|p| {
        let (xa, za, na) = map_local(g_a, p & 1, (p >> 1) & 1);
        let (xb, zb, nb) = map_local(g_b, (p >> 2) & 1, (p >> 3) & 1);
        let neg = (p & SIGN != 0) ^ na ^ nb;
        xa | (za << 1) | (xb << 2) | (zb << 3) | if neg { SIGN } else { 0 }
    })
}

fn key(t: &Tableau) -> usize {
    t.iter().enumerate().fold(0usize, |acc, (k, &p)| acc | ((p as usize) << (5 * k)))
}

struct Tables {
    /// tableau key (20 bits) → id + 1, zero when absent
    index: Vec<u16>,
    tableaux: Vec<Tableau>,
    bfs_parent: Vec<(u16, u8)>,
    decompositions: Vec<Vec<Step>>,
    class: Vec<u8>,
}

impl Tables {
    fn index_of(&self, t: &Tableau) -> Option<u16> {
        match self.index[key(t)] {
            0 => None,
            i => Some(i - 1),
        }
    }
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(build)
}

fn unitaries() -> &'static [Mat4] {
    static UNITARIES: OnceLock<Vec<Mat4>> = OnceLock::new();
    UNITARIES.get_or_init(|| {
        let t = tables();
        let gens = generators();
        let mut out: Vec<Mat4> = Vec::with_capacity(GROUP_ORDER);
        for (id, &(parent, g)) in t.bfs_parent.iter().enumerate() {
            if id == 0 {
                out.push(Mat4::identity());
            } else {
                out.push(gens[g as usize].1.mul(&out[parent as usize]));
            }
        }
        out
    })
}

/// Coset representatives `E_k`, `k` = number of CZ gates.
fn class_representatives() -> [Vec<Step>; 4] {
    let h = LocalClifford::H;
    [
        vec![],
        vec![Step::Cz],
        vec![Step::Cz, Step::LocalA(h), Step::LocalB(h), Step::Cz],
        // SWAP as three CNOTs, each CNOT = H_target · CZ · H_target
        vec![
            Step::LocalB(h),
            Step::Cz,
            Step::LocalB(h),
            Step::LocalA(h),
            Step::Cz,
            Step::LocalA(h),
            Step::LocalB(h),
            Step::Cz,
            Step::LocalB(h),
        ],
    ]
}

fn steps_tableau(steps: &[Step]) -> Tableau {
    let mut t = IDENTITY_TABLEAU;
    for step in steps {
        t = match *step {
            Step::LocalA(g) => apply_local_tableau(g, LocalClifford::IDENTITY, &t),
            Step::LocalB(g) => apply_local_tableau(LocalClifford::IDENTITY, g, &t),
            Step::Cz => compose_tableau(&CZ_TABLEAU, &t),
        };
    }
    t
}

/// Merges runs of local gates on the same qubit and drops identities.
fn normalize(steps: impl IntoIterator<Item = Step>) -> Vec<Step> {
    let mut out = Vec::new();
    let mut pending_a = LocalClifford::IDENTITY;
    let mut pending_b = LocalClifford::IDENTITY;
    let flush = |out: &mut Vec<Step>, a: &mut LocalClifford, b: &mut LocalClifford| {
        if *a != LocalClifford::IDENTITY {
            out.push(Step::LocalA(*a));
        }
        if *b != LocalClifford::IDENTITY {
            out.push(Step::LocalB(*b));
        }
        *a = LocalClifford::IDENTITY;
        *b = LocalClifford::IDENTITY;
    };
    for step in steps {
        match step {
            Step::LocalA(g) => pending_a = g.compose(pending_a),
            Step::LocalB(g) => pending_b = g.compose(pending_b),
            Step::Cz => {
                flush(&mut out, &mut pending_a, &mut pending_b);
                out.push(Step::Cz);
            }
        }
    }
    flush(&mut out, &mut pending_a, &mut pending_b);
    out
}

fn build() -> Tables {
    let gens = generators();
    let mut index = vec![0u16; 1 << 20];
    let mut tableaux = vec![IDENTITY_TABLEAU];
    let mut bfs_parent = vec![(0u16, 0u8)];
    index[key(&IDENTITY_TABLEAU)] = 1;
    let mut head = 0;
    while head < tableaux.len() {
        let current = tableaux[head];
        for (g, (gt, _, _)) in gens.iter().enumerate() {
            let next = compose_tableau(gt, &current);
            let k = key(&next);
            if index[k] == 0 {
                tableaux.push(next);
                bfs_parent.push((head as u16, g as u8));
                index[k] = tableaux.len() as u16;
            }
        }
        head += 1;
    }
    assert_eq!(tableaux.len(), GROUP_ORDER, "two-qubit Clifford enumeration");

    let mut decompositions: Vec<Option<Vec<Step>>> = vec![None; GROUP_ORDER];
    let mut class = vec![u8::MAX; GROUP_ORDER];
    let mut found = 0;
    'classes: for (k, rep) in class_representatives().iter().enumerate() {
        let rep_t = steps_tableau(rep);
        for c in LocalClifford::all() {
            for d in LocalClifford::all() {
                let inner = compose_tableau(&rep_t, &apply_local_tableau(c, d, &IDENTITY_TABLEAU));
                for a in LocalClifford::all() {
                    for b in LocalClifford::all() {
                        let t = apply_local_tableau(a, b, &inner);
                        let id = (index[key(&t)] - 1) as usize;
                        if decompositions[id].is_none() {
                            let steps = [Step::LocalA(c), Step::LocalB(d)]
                                .into_iter()
                                .chain(rep.iter().copied())
                                .chain([Step::LocalA(a), Step::LocalB(b)]);
                            decompositions[id] = Some(normalize(steps));
                            class[id] = k as u8;
                            found += 1;
                            if found == GROUP_ORDER {
                                break 'classes;
                            }
                        }
                    }
                }
            }
        }
    }
    assert_eq!(found, GROUP_ORDER, "double-coset decomposition must cover the group");
    Tables {
        index,
        tableaux,
        bfs_parent,
        decompositions: decompositions.into_iter().map(Option::unwrap).collect(),
        class,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::matrix::Mat2;

    fn replay(steps: &[Step]) -> Mat4 {
        let mut u = Mat4::identity();
        for step in steps {
            let g = match *step {
                Step::LocalA(g) => matrix::on_a(&g.matrix()),
                Step::LocalB(g) => matrix::on_b(&g.matrix()),
                Step::Cz => matrix::cz(),
            };
            u = g.mul(&u);
        }
        u
    }

    #[test]
    fn enumeration_has_11520_elements() {
        assert_eq!(tables().tableaux.len(), 11_520);
        let mut keys: Vec<usize> = tables().tableaux.iter().map(key).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), 11_520);
    }

    #[test]
    fn every_decomposition_replays_to_its_unitary() {
        for c in TwoQubitClifford::all() {
            let steps = c.decomposition();
            assert!(steps.iter().filter(|s| **s == Step::Cz).count() <= 3);
            assert!(replay(steps).eq_up_to_phase(&c.unitary()), "element {}", c.id());
        }
    }

    #[test]
    fn tableau_matches_unitary_conjugation() {
        let paulis = [
            matrix::on_a(&matrix::pauli_x()),
            matrix::on_a(&matrix::pauli_z()),
            matrix::on_b(&matrix::pauli_x()),
            matrix::on_b(&matrix::pauli_z()),
        ];
        let single = |p: Option<Pauli>| p.map_or(Mat2::identity(), Pauli::matrix);
        for c in TwoQubitClifford::all().step_by(7) {
            let u = c.unitary();
            for (k, (sign, [pa, pb])) in c.pauli_images().into_iter().enumerate() {
                let expected = u.mul(&paulis[k]).mul(&u.adjoint());
                let got = single(pa).kron(&single(pb)).scale(matrix::c(sign as f64, 0.0));
                let same = expected
                    .0
                    .iter()
                    .flatten()
                    .zip(got.0.iter().flatten())
                    .all(|(x, y)| (x - y).norm() < 1e-9);
                assert!(same, "element {} generator {k}", c.id());
            }
        }
    }

    #[test]
    fn identity_and_cz_decompositions() {
        assert!(TwoQubitClifford::IDENTITY.decomposition().is_empty());
        assert_eq!(TwoQubitClifford::cz().decomposition(), &[Step::Cz]);
    }

    #[test]
    fn class_sizes_match_double_cosets() {
        let mut counts = [0usize; 4];
        for c in TwoQubitClifford::all() {
            counts[c.entangling_class()] += 1;
        }
        assert_eq!(counts, CLASS_SIZES);
    }

    #[test]
    fn local_elements_have_no_cz() {
        let c = TwoQubitClifford::local(LocalClifford::H, LocalClifford::S);
        assert_eq!(c.entangling_class(), 0);
        assert_eq!(
            c.decomposition(),
            &[Step::LocalA(LocalClifford::H), Step::LocalB(LocalClifford::S)]
        );
    }
}
