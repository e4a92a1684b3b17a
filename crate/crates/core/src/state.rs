//! Dense statevector with the gate set needed by the state-preparation
//! families, plus basis-weight extraction and computational-basis sampling.
//!
//! Bit `k` of a basis index is the outcome of qubit `k` (qubit 0 is the
//! least significant bit).

use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::observables::{qubits_of, Predicate, MAX_MASK_QUBITS};
use crate::rng;

/// Default ceiling on the register size (2^24 amplitudes, 256 MiB).
pub const DEFAULT_MAX_QUBITS: usize = 24;

pub const BIT_ORDER: &str = "little-endian: bit k of the basis index is qubit k";

/// Index into the computational basis.
pub type BasisIndex = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Ry(usize, f64),
    /// Diagonal `diag(e^{-i theta/2}, e^{i theta/2})`.
    Rz(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    Cz(usize, usize),
    /// Phase flip on strings with every listed qubit set.
    Mcz(Vec<usize>),
    PhaseOracle(Predicate),
    /// Reflection `2|s><s| - I` about the uniform superposition on the
    /// listed qubits, identity on the rest.
    Diffusion(Vec<usize>),
}

fn check_qubit(q: usize, n: usize, gate: &str) -> Result<()> {
    if q >= n {
        return Err(Error::validation(format!(
            "{gate}: qubit {q} outside a {n}-qubit register"
        )));
    }
    Ok(())
}

fn check_set(qs: &[usize], n: usize, gate: &str) -> Result<u64> {
    if qs.is_empty() {
        return Err(Error::validation(format!("{gate}: qubit set is empty")));
    }
    let mut mask = 0u64;
    for &q in qs {
        check_qubit(q, n, gate)?;
        if mask >> q & 1 == 1 {
            return Err(Error::validation(format!("{gate}: qubit {q} repeated")));
        }
        mask |= 1 << q;
    }
    Ok(mask)
}

impl Gate {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Gate::H(q) => check_qubit(*q, n, "H"),
            Gate::X(q) => check_qubit(*q, n, "X"),
            Gate::Ry(q, t) | Gate::Rz(q, t) => {
                if !t.is_finite() {
                    return Err(Error::validation("rotation angle must be finite"));
                }
                check_qubit(*q, n, "rotation")
            }
            Gate::Cnot { control, target } => {
                check_qubit(*control, n, "CNOT")?;
                check_qubit(*target, n, "CNOT")?;
                if control == target {
                    return Err(Error::validation("CNOT: control equals target"));
                }
                Ok(())
            }
            Gate::Cz(a, b) => {
                check_qubit(*a, n, "CZ")?;
                check_qubit(*b, n, "CZ")?;
                if a == b {
                    return Err(Error::validation("CZ: qubits must be distinct"));
                }
                Ok(())
            }
            Gate::Mcz(qs) => check_set(qs, n, "MCZ").map(|_| ()),
            Gate::PhaseOracle(p) => {
                if p.num_qubits() != n {
                    return Err(Error::validation(format!(
                        "oracle predicate arity {} does not match register size {n}",
                        p.num_qubits()
                    )));
                }
                Ok(())
            }
            Gate::Diffusion(qs) => check_set(qs, n, "diffusion").map(|_| ()),
        }
    }
}

/// Ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl CircuitSpec {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.num_qubits))
    }

    /// Runs the circuit on `|0...0>`.
    pub fn simulate(&self) -> Result<QuantumState> {
        self.validate()?;
        let mut state = QuantumState::new_zero_state(self.num_qubits)?;
        for g in &self.gates {
            state.apply_unchecked(g);
        }
        Ok(state)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// `|0...0>` on `n` qubits, `1 <= n <= DEFAULT_MAX_QUBITS`.
    pub fn new_zero_state(n: usize) -> Result<Self> {
        Self::new_zero_state_with_ceiling(n, DEFAULT_MAX_QUBITS)
    }

    pub fn new_zero_state_with_ceiling(n: usize, ceiling: usize) -> Result<Self> {
        if n == 0 || n > ceiling || n >= MAX_MASK_QUBITS {
            return Err(Error::Capacity {
                num_qubits: n,
                ceiling,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes`; length must be a power of two.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::validation(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > DEFAULT_MAX_QUBITS {
            return Err(Error::Capacity {
                num_qubits: n,
                ceiling: DEFAULT_MAX_QUBITS,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::validation("amplitudes have zero or non-finite norm"));
        }
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Uniform superposition `H^{(x)n}|0>`.
    pub fn uniform(n: usize) -> Result<Self> {
        let mut s = Self::new_zero_state(n)?;
        let a = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        s.amplitudes.iter_mut().for_each(|x| *x = a);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &CircuitSpec) -> Result<()> {
        if circuit.num_qubits != self.num_qubits {
            return Err(Error::validation(format!(
                "circuit is for {} qubits, state has {}",
                circuit.num_qubits, self.num_qubits
            )));
        }
        circuit.validate()?;
        circuit.gates.iter().for_each(|g| self.apply_unchecked(g));
        Ok(())
    }

    pub fn apply_phase_oracle(&mut self, pred: &Predicate) -> Result<()> {
        let g = Gate::PhaseOracle(pred.clone());
        g.validate(self.num_qubits)?;
        self.phase_oracle(pred);
        Ok(())
    }

    pub fn apply_diffusion(&mut self, mixing_set: &[usize]) -> Result<()> {
        let mask = check_set(mixing_set, self.num_qubits, "diffusion")?;
        self.diffusion(mask);
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &Gate) {
        match gate {
            Gate::H(q) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                self.real_1q(*q, [[h, h], [h, -h]]);
            }
            Gate::X(q) => self.pairs(*q, std::mem::swap),
            Gate::Ry(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                self.real_1q(*q, [[c, -s], [s, c]]);
            }
            Gate::Rz(q, theta) => {
                let lo = Complex64::from_polar(1.0, -theta / 2.0);
                let hi = Complex64::from_polar(1.0, theta / 2.0);
                self.pairs(*q, |a, b| {
                    *a *= lo;
                    *b *= hi;
                });
            }
            Gate::Cnot { control, target } => {
                let cbit = 1usize << control;
                let tbit = 1usize << target;
                for i in 0..self.amplitudes.len() {
                    if i & cbit != 0 && i & tbit == 0 {
                        self.amplitudes.swap(i, i | tbit);
                    }
                }
            }
            Gate::Cz(a, b) => self.flip_where(|i| i >> a & i >> b & 1 == 1),
            Gate::Mcz(qs) => {
                let mask: usize = qs.iter().fold(0, |m, q| m | 1 << q);
                self.flip_where(|i| i & mask == mask);
            }
            Gate::PhaseOracle(p) => self.phase_oracle(p),
            Gate::Diffusion(qs) => {
                let mask = qs.iter().fold(0u64, |m, q| m | 1 << q);
                self.diffusion(mask);
            }
        }
    }

    /// Calls `f` on every amplitude pair differing only in qubit `q`.
    fn pairs(&mut self, q: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.iter_mut().zip(hi.iter_mut()).for_each(|(a, b)| f(a, b));
        }
    }

    fn real_1q(&mut self, q: usize, m: [[f64; 2]; 2]) {
        self.pairs(q, |a, b| {
            let (x, y) = (*a, *b);
            *a = x * m[0][0] + y * m[0][1];
            *b = x * m[1][0] + y * m[1][1];
        });
    }

    fn flip_where(&mut self, pred: impl Fn(usize) -> bool) {
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if pred(i) {
                *a = -*a;
            }
        }
    }

    fn phase_oracle(&mut self, pred: &Predicate) {
        self.flip_where(|z| pred.contains(z));
    }

    fn diffusion(&mut self, mask: u64) {
        let mask = mask as usize;
        let dim = self.amplitudes.len();
        if mask == dim - 1 {
            let mean = self.amplitudes.iter().sum::<Complex64>() / dim as f64;
            self.amplitudes.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
            return;
        }
        // Mean inversion within each coset of the non-mixing bits.
        let rest = qubits_of(!mask as u64 & (dim as u64 - 1));
        let compress = |z: usize| {
            rest.iter()
                .enumerate()
                .fold(0usize, |acc, (j, &q)| acc | (z >> q & 1) << j)
        };
        let group = 1usize << mask.count_ones();
        let mut means = vec![Complex64::new(0.0, 0.0); 1 << rest.len()];
        for (z, a) in self.amplitudes.iter().enumerate() {
            means[compress(z)] += a;
        }
        means.iter_mut().for_each(|m| *m /= group as f64);
        for (z, a) in self.amplitudes.iter_mut().enumerate() {
            *a = 2.0 * means[compress(z)] - *a;
        }
    }

    /// `q_z = |<z|r>|^2` in integer basis order.
    pub fn basis_weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `n_shots` i.i.d. computational-basis outcomes, reproducible from `seed`.
    pub fn sample_shots(&self, n_shots: usize, seed: u64) -> Vec<BasisIndex> {
        ShotSampler::new(&self.basis_weights()).sample(n_shots, &mut rng::from_seed(seed))
    }
}

/// Inverse-CDF sampler over a fixed weight table.
#[derive(Debug, Clone)]
pub struct ShotSampler {
    cdf: Vec<f64>,
}

impl ShotSampler {
    pub fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn draw(&self, rng: &mut rng::Rng) -> BasisIndex {
        let total = *self.cdf.last().expect("non-empty weight table");
        let u = rng.random::<f64>() * total;
        // first index whose cumulative weight exceeds u; zero-weight entries are never hit
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }

    pub fn sample(&self, n_shots: usize, rng: &mut rng::Rng) -> Vec<BasisIndex> {
        (0..n_shots).map(|_| self.draw(rng)).collect()
    }
}
