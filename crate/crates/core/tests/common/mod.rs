//! Dense-matrix reference implementations for small registers. Every
//! operator is built as an explicit `2^n x 2^n` matrix from Kronecker
//! products, independent of the statevector kernels.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qpeak::observables::{DiagonalObservable, SectorRule};
use qpeak::{CircuitSpec, Gate, QuantumState};

#[derive(Debug, Clone)]
pub struct Dense {
    pub dim: usize,
    pub data: Vec<C>,
}

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

impl Dense {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_2x2(a: [[C; 2]; 2]) -> Self {
        Self {
            dim: 2,
            data: vec![a[0][0], a[0][1], a[1][0], a[1][1]],
        }
    }

    pub fn diag(d: &[C]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = *x;
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn kron(&self, other: &Self) -> Self {
        let d = self.dim * other.dim;
        let mut m = Self::zeros(d);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.at(r1, c1);
                if a == ZERO {
                    continue;
                }
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        m.data[(r1 * other.dim + r2) * d + c1 * other.dim + c2] = a * other.at(r2, c2);
                    }
                }
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.at(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    m.data[r * d + c] += a * other.at(k, c);
                }
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: C) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }

    /// `<v|M|v>`.
    pub fn expect(&self, v: &[C]) -> C {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }
}

pub fn pauli_x() -> Dense {
    Dense::from_2x2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_z() -> Dense {
    Dense::from_2x2([[ONE, ZERO], [ZERO, -ONE]])
}

pub fn proj0() -> Dense {
    Dense::from_2x2([[ONE, ZERO], [ZERO, ZERO]])
}

pub fn proj1() -> Dense {
    Dense::from_2x2([[ZERO, ZERO], [ZERO, ONE]])
}

pub fn hadamard() -> Dense {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Dense::from_2x2([[h, h], [h, -h]])
}

/// `op` on qubit `q`, identity elsewhere. Qubit 0 is the rightmost factor,
/// i.e. the least significant bit of the basis index.
pub fn embed(op: &Dense, q: usize, n: usize) -> Dense {
    let id = Dense::identity(2);
    (0..n)
        .rev()
        .fold(Dense::identity(1), |m, k| m.kron(if k == q { op } else { &id }))
}

pub fn product(ops: impl IntoIterator<Item = Dense>, n: usize) -> Dense {
    ops.into_iter()
        .fold(Dense::identity(1 << n), |acc, m| acc.mul(&m))
}

pub fn z_string(support: &[usize], n: usize) -> Dense {
    product(support.iter().map(|&q| embed(&pauli_z(), q, n)), n)
}

pub fn gate_matrix(gate: &Gate, n: usize) -> Dense {
    let dim = 1 << n;
    match gate {
        Gate::H(q) => embed(&hadamard(), *q, n),
        Gate::X(q) => embed(&pauli_x(), *q, n),
        Gate::Ry(q, t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            let m = Dense::from_2x2([
                [C::new(c, 0.0), C::new(-s, 0.0)],
                [C::new(s, 0.0), C::new(c, 0.0)],
            ]);
            embed(&m, *q, n)
        }
        Gate::Rz(q, t) => {
            let m = Dense::diag(&[C::from_polar(1.0, -t / 2.0), C::from_polar(1.0, t / 2.0)]);
            embed(&m, *q, n)
        }
        Gate::Cnot { control, target } => embed(&proj0(), *control, n)
            .add(&embed(&proj1(), *control, n).mul(&embed(&pauli_x(), *target, n))),
        Gate::Cz(a, b) => {
            // I - 2 |11><11|
            let p11 = embed(&proj1(), *a, n).mul(&embed(&proj1(), *b, n));
            Dense::identity(dim).add(&p11.scale(C::new(-2.0, 0.0)))
        }
        Gate::Mcz(qs) => {
            let p = product(qs.iter().map(|&q| embed(&proj1(), q, n)), n);
            Dense::identity(dim).add(&p.scale(C::new(-2.0, 0.0)))
        }
        Gate::PhaseOracle(pred) => {
            let d: Vec<C> = (0..dim)
                .map(|z| if pred.contains(z) { -ONE } else { ONE })
                .collect();
            Dense::diag(&d)
        }
        Gate::Diffusion(set) => {
            // W (2 |0><0|_set - I) W with W = H on the set
            let w = product(set.iter().map(|&q| embed(&hadamard(), q, n)), n);
            let p0 = product(set.iter().map(|&q| embed(&proj0(), q, n)), n);
            let refl = p0.scale(C::new(2.0, 0.0)).add(&Dense::identity(dim).scale(-ONE));
            w.mul(&refl).mul(&w)
        }
    }
}

pub fn dense_simulate(circuit: &CircuitSpec) -> Vec<C> {
    let n = circuit.num_qubits;
    let mut v = vec![ZERO; 1 << n];
    v[0] = ONE;
    for g in &circuit.gates {
        v = gate_matrix(g, n).apply(&v);
    }
    v
}

pub fn dense_observable(obs: &DiagonalObservable) -> Dense {
    let n = obs.num_qubits();
    obs.terms().iter().fold(Dense::zeros(1 << n), |acc, t| {
        acc.add(&z_string(&t.support(), n).scale(C::new(t.coefficient(), 0.0)))
    })
}

/// `Z_S` for the rule's qubit set.
pub fn dense_sector_z(rule: &SectorRule, n: usize) -> Dense {
    match rule {
        SectorRule::SingleQubit(k) => embed(&pauli_z(), *k, n),
        SectorRule::ParitySubset(s) => z_string(s, n),
    }
}

/// `(I + Z_S) / 2` and `(I - Z_S) / 2`.
pub fn dense_projectors(rule: &SectorRule, n: usize) -> (Dense, Dense) {
    let z = dense_sector_z(rule, n);
    let i = Dense::identity(1 << n);
    let half = C::new(0.5, 0.0);
    (i.add(&z).scale(half), i.add(&z.scale(-ONE)).scale(half))
}

/// Reference sector fields `[pi_up, pi_down, w_up, w_down, c_e, a_avg]`.
pub fn dense_sector_fields(state: &[C], obs: &DiagonalObservable, rule: &SectorRule) -> [f64; 6] {
    let n = obs.num_qubits();
    let a = dense_observable(obs);
    let (pu, pd) = dense_projectors(rule, n);
    let zs = dense_sector_z(rule, n);
    [
        pu.expect(state).re,
        pd.expect(state).re,
        pu.mul(&a).mul(&pu).expect(state).re,
        pd.mul(&a).mul(&pd).expect(state).re,
        a.mul(&zs).expect(state).re,
        a.expect(state).re,
    ]
}

pub fn to_state(v: Vec<C>) -> QuantumState {
    QuantumState::from_amplitudes(v).expect("valid amplitudes")
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
