//! The single-qubit Clifford group modulo global phase.
//!
//! Elements are numbered `4 * j + k` and stand for the product `P_k · R_j`
//! (apply `R_j` first), with `P = [I, X, Y, Z]` and
//! `R = [I, H, S, S·H, H·S, H·S·H]`. The six `R_j` realise the six
//! permutations of the Pauli axes, so each element has a unique index.

use std::fmt;
use std::sync::OnceLock;

use super::matrix::{self, Mat2};
use super::{Pauli, SignedPauli};

pub const GROUP_ORDER: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalClifford(u8);

impl LocalClifford {
    pub const IDENTITY: Self = Self(0);
    pub const X: Self = Self(1);
    pub const Y: Self = Self(2);
    pub const Z: Self = Self(3);
    pub const H: Self = Self(4);
    /// `X · H`: maps `|+⟩` to `|1⟩`.
    pub const XH: Self = Self(5);
    pub const S: Self = Self(8);
    pub const S_DAG: Self = Self(11);

    pub fn new(index: usize) -> Option<Self> {
        (index < GROUP_ORDER).then_some(Self(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..GROUP_ORDER as u8).map(Self)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    #[inline]
    pub fn compose(self, other: Self) -> Self {
        Self(tables().compose[self.index()][other.index()])
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Self(tables().inverse[self.index()])
    }

    /// `g† P g` as a signed Pauli. This is the Pauli that has to be measured
    /// on a state `|φ⟩` to measure `P` on `g|φ⟩`.
    #[inline]
    pub fn conjugate_pauli(self, p: Pauli) -> SignedPauli {
        tables().pull_back[self.index()][p.index()]
    }

    /// `g P g†`, the image of `P` under the gate.
    #[inline]
    pub fn map_pauli(self, p: Pauli) -> SignedPauli {
        tables().push_forward[self.index()][p.index()]
    }

    /// Diagonal in the computational basis (commutes with CZ).
    #[inline]
    pub fn is_diagonal(self) -> bool {
        tables().diagonal[self.index()]
    }

    /// A representative unitary (phase fixed by the construction).
    pub fn matrix(self) -> Mat2 {
        tables().matrices[self.index()]
    }

    /// Finds the element equal to `m` up to a global phase.
    pub fn from_matrix(m: &Mat2) -> Option<Self> {
        tables()
            .matrices
            .iter()
            .position(|g| g.eq_up_to_phase(m))
            .map(|i| Self(i as u8))
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }
}

impl fmt::Debug for LocalClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C1[{}:{}]", self.0, self.name())
    }
}

const NAMES: [&str; GROUP_ORDER] = [
    "I", "X", "Y", "Z", "H", "XH", "YH", "ZH", "S", "XS", "YS", "ZS", "SH", "XSH", "YSH", "ZSH",
    "HS", "XHS", "YHS", "ZHS", "HSH", "XHSH", "YHSH", "ZHSH",
];

pub(crate) struct Tables {
    matrices: [Mat2; GROUP_ORDER],
    compose: [[u8; GROUP_ORDER]; GROUP_ORDER],
    inverse: [u8; GROUP_ORDER],
    pull_back: [[SignedPauli; 3]; GROUP_ORDER],
    push_forward: [[SignedPauli; 3]; GROUP_ORDER],
    diagonal: [bool; GROUP_ORDER],
}

pub(crate) fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(build)
}

fn lookup(matrices: &[Mat2], m: &Mat2) -> u8 {
    matrices
        .iter()
        .position(|g| g.eq_up_to_phase(m))
        .expect("product of Clifford matrices left the group") as u8
}

fn signed_pauli_of(m: &Mat2) -> SignedPauli {
    for p in Pauli::ALL {
        let pm = p.matrix();
        for sign in [1i8, -1] {
            let target = pm.scale(matrix::c(sign as f64, 0.0));
            if m.0.iter()
                .flatten()
                .zip(target.0.iter().flatten())
                .all(|(a, b)| (a - b).norm() < 1e-9)
            {
                return SignedPauli { sign, pauli: p };
            }
        }
    }
    panic!("conjugated Pauli is not a signed Pauli");
}

fn build() -> Tables {
    let h = matrix::hadamard();
    let s = matrix::phase_s();
    let perms = [
        Mat2::identity(),
        h,
        s,
        s.mul(&h),
        h.mul(&s),
        h.mul(&s).mul(&h),
    ];
    let paulis = [
        Mat2::identity(),
        matrix::pauli_x(),
        matrix::pauli_y(),
        matrix::pauli_z(),
    ];
    let mut matrices = [Mat2::identity(); GROUP_ORDER];
    for (j, r) in perms.iter().enumerate() {
        for (k, p) in paulis.iter().enumerate() {
            matrices[4 * j + k] = p.mul(r);
        }
    }
    for a in 0..GROUP_ORDER {
        for b in 0..a {
            assert!(
                !matrices[a].eq_up_to_phase(&matrices[b]),
                "duplicate Clifford elements {a} and {b}"
            );
        }
    }

    let mut compose = [[0u8; GROUP_ORDER]; GROUP_ORDER];
    let mut inverse = [0u8; GROUP_ORDER];
    let mut pull_back = [[SignedPauli { sign: 1, pauli: Pauli::X }; 3]; GROUP_ORDER];
    let mut push_forward = pull_back;
    let mut diagonal = [false; GROUP_ORDER];
    for a in 0..GROUP_ORDER {
        for b in 0..GROUP_ORDER {
            compose[a][b] = lookup(&matrices, &matrices[a].mul(&matrices[b]));
        }
        inverse[a] = lookup(&matrices, &matrices[a].adjoint());
        let g = matrices[a];
        let gd = g.adjoint();
        for p in Pauli::ALL {
            pull_back[a][p.index()] = signed_pauli_of(&gd.mul(&p.matrix()).mul(&g));
            push_forward[a][p.index()] = signed_pauli_of(&g.mul(&p.matrix()).mul(&gd));
        }
        diagonal[a] = g.0[0][1].norm() < 1e-9 && g.0[1][0].norm() < 1e-9;
    }
    Tables {
        matrices,
        compose,
        inverse,
        pull_back,
        push_forward,
        diagonal,
    }
}
