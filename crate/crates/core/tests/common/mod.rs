//! Dense state-vector reference simulator shared by the integration tests.
#![allow(dead_code)]

use mipt::clifford::{Pauli, TwoQubitClifford};
use mipt::graph::GraphState;
use num_complex::Complex64 as C;
use rand::Rng;

pub struct Dense {
    pub n: usize,
    pub amps: Vec<C>,
}

fn pauli(p: Pauli) -> [[C; 2]; 2] {
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match p {
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

impl Dense {
    pub fn plus(n: usize) -> Self {
        let dim = 1 << n;
        Dense {
            n,
            amps: vec![C::new((dim as f64).sqrt().recip(), 0.0); dim],
        }
    }

    pub fn apply1(&mut self, q: usize, m: &[[C; 2]; 2]) {
        let bit = 1 << q;
        for z in 0..self.amps.len() {
            if z & bit == 0 {
                let (a, b) = (self.amps[z], self.amps[z | bit]);
                self.amps[z] = m[0][0] * a + m[0][1] * b;
                self.amps[z | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    /// `m` acts on `(a, b)` with `a` as the high bit of its index.
    pub fn apply2(&mut self, a: usize, b: usize, m: &[[C; 4]; 4]) {
        let (ba, bb) = (1 << a, 1 << b);
        for z in 0..self.amps.len() {
            if z & ba == 0 && z & bb == 0 {
                let idx = [z, z | bb, z | ba, z | ba | bb];
                let v: Vec<C> = idx.iter().map(|&k| self.amps[k]).collect();
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| m[r][c] * v[c]).sum();
                }
            }
        }
    }

    pub fn apply_clifford(&mut self, a: usize, b: usize, c: TwoQubitClifford) {
        self.apply2(a, b, &c.unitary().0);
    }

    /// Projects onto the `sign` eigenspace of the Pauli string `ops`;
    /// returns the probability of that outcome before renormalising.
    pub fn project(&mut self, ops: &[(usize, Pauli)], sign: i8) -> f64 {
        let mut flipped = Dense {
            n: self.n,
            amps: self.amps.clone(),
        };
        for &(q, p) in ops {
            flipped.apply1(q, &pauli(p));
        }
        let s = sign as f64;
        for (a, f) in self.amps.iter_mut().zip(&flipped.amps) {
            *a = (*a + f * s) * 0.5;
        }
        let prob: f64 = self.amps.iter().map(|a| a.norm_sqr()).sum();
        if prob > 1e-12 {
            let k = prob.sqrt().recip();
            for a in &mut self.amps {
                *a *= k;
            }
        }
        prob
    }

    /// Rényi-2 entropy of the qubits in `mask`, in bits.
    pub fn entropy(&self, mask: usize) -> f64 {
        let inside: Vec<usize> = (0..self.n).filter(|q| mask >> q & 1 == 1).collect();
        let outside: Vec<usize> = (0..self.n).filter(|q| mask >> q & 1 == 0).collect();
        let pack = |z: usize, qs: &[usize]| qs.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((z >> q & 1) << k));
        let (da, db) = (1 << inside.len(), 1 << outside.len());
        let mut m = vec![C::new(0.0, 0.0); da * db];
        for (z, a) in self.amps.iter().enumerate() {
            m[pack(z, &inside) * db + pack(z, &outside)] = *a;
        }
        let mut purity = 0.0;
        for i in 0..da {
            for j in 0..da {
                let r: C = (0..db).map(|b| m[i * db + b] * m[j * db + b].conj()).sum();
                purity += r.norm_sqr();
            }
        }
        -purity.log2()
    }

    /// `|⟨self|other⟩| ≈ 1` for normalised vectors.
    pub fn same_ray(&self, other: &[C]) -> bool {
        let overlap: C = self.amps.iter().zip(other).map(|(a, b)| a.conj() * b).sum();
        let norm: f64 = other.iter().map(|a| a.norm_sqr()).sum();
        (overlap.norm() - 1.0).abs() < 1e-9 && (norm - 1.0).abs() < 1e-9
    }
}

/// Differences found by [`compare`].
#[derive(Debug, Default)]
pub struct Mismatch {
    pub state: bool,
    pub entropy: Option<(usize, usize, f64)>,
}

/// Compares amplitudes and every region's entropy.
pub fn compare(g: &GraphState, d: &Dense) -> Mismatch {
    let mut out = Mismatch::default();
    let psi = g.to_statevector().expect("small register");
    out.state = !d.same_ray(&psi);
    for mask in 1..(1usize << d.n) - 1 {
        let region: Vec<usize> = (0..d.n).filter(|q| mask >> q & 1 == 1).collect();
        let (engine, dense) = (g.entanglement_entropy(&region), d.entropy(mask));
        if (engine as f64 - dense).abs() > 1e-9 {
            out.entropy = Some((mask, engine, dense));
            break;
        }
    }
    out
}

/// Random hybrid circuit on `n` qubits: two-qubit Cliffords on random pairs
/// and single-qubit Z measurements whose outcomes the engine draws and the
/// dense simulator follows. Returns a description of the first failure.
pub fn run_random_circuit<R: Rng>(n: usize, ops: usize, rng: &mut R) -> Result<(), String> {
    let mut g = GraphState::new_plus_state(n).map_err(|e| e.to_string())?;
    let mut d = Dense::plus(n);
    for step in 0..ops {
        if rng.random::<f64>() < 0.6 {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            let c = TwoQubitClifford::sample(rng);
            g.apply_two_qubit_clifford(a, b, c).map_err(|e| e.to_string())?;
            d.apply_clifford(a, b, c);
        } else {
            let q = rng.random_range(0..n);
            let out = g.measure_pauli(q, Pauli::Z, rng).map_err(|e| e.to_string())?;
            let prob = d.project(&[(q, Pauli::Z)], out.value);
            let expected = if out.deterministic { 1.0 } else { 0.5 };
            if (prob - expected).abs() > 1e-9 {
                return Err(format!("step {step}: outcome {} had probability {prob}", out.value));
            }
        }
        let m = compare(&g, &d);
        if m.state {
            return Err(format!("step {step}: states differ"));
        }
        if let Some((mask, e, s)) = m.entropy {
            return Err(format!("step {step}: region {mask:b} engine {e} dense {s}"));
        }
    }
    Ok(())
}
