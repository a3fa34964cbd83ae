//! Clifford group tables.
//!
//! Both groups are built once, on first use, from explicit matrix arithmetic
//! and are read-only afterwards. Elements are taken modulo global phase.

mod local;
pub mod matrix;
mod two_qubit;

pub use local::{LocalClifford, GROUP_ORDER as LOCAL_GROUP_ORDER};
pub use two_qubit::{
    decompose_c2, sample_c2, Step, TwoQubitClifford, CLASS_SIZES, GROUP_ORDER as TWO_QUBIT_GROUP_ORDER,
};

use matrix::Mat2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::X => matrix::pauli_x(),
            Pauli::Y => matrix::pauli_y(),
            Pauli::Z => matrix::pauli_z(),
        }
    }
}

/// `sign · pauli` with `sign ∈ {+1, -1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub sign: i8,
    pub pauli: Pauli,
}

impl SignedPauli {
    pub fn to_matrix(self) -> Mat2 {
        self.pauli.matrix().scale(matrix::c(self.sign as f64, 0.0))
    }
}

/// `g† p g` as a signed Pauli.
pub fn c1_conjugate_pauli(g: LocalClifford, p: Pauli) -> SignedPauli {
    g.conjugate_pauli(p)
}

/// `a ∘ b` (apply `b` first).
pub fn c1_compose(a: LocalClifford, b: LocalClifford) -> LocalClifford {
    a.compose(b)
}
