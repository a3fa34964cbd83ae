//! Small dense complex matrices used to build and verify the Clifford tables.

use num_complex::Complex64;

pub type C = Complex64;

pub const fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Row-major square matrix of dimension `D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const D: usize>(pub [[C; D]; D]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

impl<const D: usize> Mat<D> {
    pub fn identity() -> Self {
        let mut m = [[c(0.0, 0.0); D]; D];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(1.0, 0.0);
        }
        Mat(m)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[c(0.0, 0.0); D]; D];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..D).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Mat(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = [[c(0.0, 0.0); D]; D];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[j][i].conj();
            }
        }
        Mat(out)
    }

    pub fn scale(&self, s: C) -> Self {
        let mut out = self.0;
        for row in out.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        Mat(out)
    }

    /// Multiplies by a global phase so that the first non-negligible entry
    /// (in row-major order) is real and positive.
    pub fn phase_normalized(&self) -> Self {
        let pivot = self
            .0
            .iter()
            .flatten()
            .find(|z| z.norm() > 1e-9)
            .copied()
            .unwrap_or(c(1.0, 0.0));
        self.scale(pivot.conj() / pivot.norm())
    }

    /// True when `self = e^{iφ} other` for some real φ.
    pub fn eq_up_to_phase(&self, other: &Self) -> bool {
        let a = self.phase_normalized();
        let b = other.phase_normalized();
        a.0.iter()
            .flatten()
            .zip(b.0.iter().flatten())
            .all(|(x, y)| (x - y).norm() < 1e-9)
    }

    /// Hashable fingerprint of the phase-normalized matrix.
    pub fn phase_key(&self) -> Vec<(i64, i64)> {
        self.phase_normalized()
            .0
            .iter()
            .flatten()
            .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
            .collect()
    }
}

impl Mat2 {
    pub fn kron(&self, rhs: &Mat2) -> Mat4 {
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = self.0[i / 2][j / 2] * rhs.0[i % 2][j % 2];
            }
        }
        Mat(out)
    }
}

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn pauli_x() -> Mat2 {
    Mat([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn pauli_y() -> Mat2 {
    Mat([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn pauli_z() -> Mat2 {
    Mat([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
}

pub fn hadamard() -> Mat2 {
    Mat([[c(R, 0.0), c(R, 0.0)], [c(R, 0.0), c(-R, 0.0)]])
}

pub fn phase_s() -> Mat2 {
    Mat([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]])
}

/// `exp(-iπ/4 X)`
pub fn sqrt_minus_i_x() -> Mat2 {
    Mat([[c(R, 0.0), c(0.0, -R)], [c(0.0, -R), c(R, 0.0)]])
}

/// `exp(+iπ/4 Z)`
pub fn sqrt_i_z() -> Mat2 {
    Mat([[c(R, R), c(0.0, 0.0)], [c(0.0, 0.0), c(R, -R)]])
}

pub fn cz() -> Mat4 {
    let mut m = Mat4::identity();
    m.0[3][3] = c(-1.0, 0.0);
    m
}

/// Embeds a single-qubit gate on qubit `a` (the high-order bit) of a pair.
pub fn on_a(g: &Mat2) -> Mat4 {
    g.kron(&Mat2::identity())
}

/// Embeds a single-qubit gate on qubit `b` (the low-order bit) of a pair.
pub fn on_b(g: &Mat2) -> Mat4 {
    Mat2::identity().kron(g)
}
