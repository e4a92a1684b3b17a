//! State-preparation families: uniform baseline, Haar-random states,
//! Grover-type peaking and oracle-free shallow peaking.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::Predicate;
use crate::rng;
use crate::state::{CircuitSpec, Gate, QuantumState, DEFAULT_MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entangler {
    Cnot,
    Cz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub control: usize,
    pub target: usize,
    #[serde(default = "default_entangler")]
    pub gate: Entangler,
}

fn default_entangler() -> Entangler {
    Entangler::Cnot
}

impl Edge {
    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            control,
            target,
            gate: Entangler::Cnot,
        }
    }

    fn gate(&self) -> Gate {
        match self.gate {
            Entangler::Cnot => Gate::Cnot {
                control: self.control,
                target: self.target,
            },
            Entangler::Cz => Gate::Cz(self.control, self.target),
        }
    }
}

/// Optional Z-rotation layer appended after the shaping layers. Angles are
/// drawn uniformly from `[0, max_angle)` per qubit and per draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Randomization {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<usize>>,
    #[serde(default = "two_pi")]
    pub max_angle: f64,
}

fn two_pi() -> f64 {
    std::f64::consts::TAU
}

mod angle_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    // Integer map keys do not survive the buffering done for tagged enums.
    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, f64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, f64>, D::Error> {
        Ok(Vec::<(usize, f64)>::deserialize(d)?.into_iter().collect())
    }
}

/// Shallow template: H layer, X layer, then `depth` layers of (Ry bias
/// rotations, edges), then the optional Z-rotation layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShallowSpec {
    pub num_qubits: usize,
    #[serde(default)]
    pub hadamard_set: Vec<usize>,
    /// Serialized as `[[qubit, angle], ...]`.
    #[serde(default, with = "angle_pairs")]
    pub bias_angles: BTreeMap<usize, f64>,
    #[serde(default)]
    pub x_set: Vec<usize>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub depth: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub randomization: Option<Randomization>,
}

/// Angles of the default ring template, for qubits 0..4 of each block.
pub const DEFAULT_BIAS_ANGLES: [f64; 4] = [2.6, 0.6, 0.2, 0.2];

impl ShallowSpec {
    /// Default template on 10-qubit blocks: H and Ry on qubits 0..4, X on
    /// 5, 7, 9 and a CNOT ring 3->2->1->0->3 per layer. Larger registers
    /// repeat the block; qubits beyond the last full block stay idle.
    pub fn default_template(num_qubits: usize, depth: u32) -> Result<Self> {
        if num_qubits < 10 {
            return Err(Error::validation(format!(
                "default shallow template needs at least 10 qubits, got {num_qubits}"
            )));
        }
        let mut spec = Self {
            num_qubits,
            hadamard_set: vec![],
            bias_angles: BTreeMap::new(),
            x_set: vec![],
            edges: vec![],
            depth,
            randomization: None,
        };
        for block in 0..num_qubits / 10 {
            let o = 10 * block;
            spec.hadamard_set.extend(o..o + 4);
            for (i, &theta) in DEFAULT_BIAS_ANGLES.iter().enumerate() {
                spec.bias_angles.insert(o + i, theta);
            }
            spec.x_set.extend([o + 5, o + 7, o + 9]);
            spec.edges.extend([
                Edge::cnot(o + 3, o + 2),
                Edge::cnot(o + 2, o + 1),
                Edge::cnot(o + 1, o),
                Edge::cnot(o, o + 3),
            ]);
        }
        Ok(spec)
    }

    fn randomized_qubits(&self) -> Vec<usize> {
        self.randomization
            .as_ref()
            .and_then(|r| r.qubits.clone())
            .unwrap_or_else(|| (0..self.num_qubits).collect())
    }

    /// Builds the circuit; `draw_seed` feeds the Z-rotation layer only.
    pub fn build_circuit(&self, draw_seed: u64) -> Result<CircuitSpec> {
        let mut c = CircuitSpec::new(self.num_qubits);
        for &q in &self.hadamard_set {
            c.push(Gate::H(q));
        }
        for &q in &self.x_set {
            c.push(Gate::X(q));
        }
        for _ in 0..self.depth {
            for (&q, &theta) in &self.bias_angles {
                c.push(Gate::Ry(q, theta));
            }
            for e in &self.edges {
                c.push(e.gate());
            }
        }
        if let Some(r) = &self.randomization {
            if !(r.max_angle.is_finite() && r.max_angle >= 0.0) {
                return Err(Error::validation(
                    "randomization max_angle must be finite and >= 0",
                ));
            }
            let mut g = rng::from_seed(draw_seed);
            for q in self.randomized_qubits() {
                let phi = g.random::<f64>() * r.max_angle;
                c.push(Gate::Rz(q, phi));
            }
        }
        c.validate().map_err(|e| match e {
            Error::Validation(m) => Error::Validation(format!("shallow template: {m}")),
            other => other,
        })?;
        Ok(c)
    }
}

/// Declarative description of a state-preparation family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Uniform {
        num_qubits: usize,
    },
    Haar {
        num_qubits: usize,
        #[serde(default)]
        seed: u64,
    },
    GroverPeaked {
        num_qubits: usize,
        predicate: Predicate,
        iterations: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mixing_set: Option<Vec<usize>>,
    },
    ShallowPeaked(ShallowSpec),
}

impl EnsembleSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            EnsembleSpec::Uniform { num_qubits }
            | EnsembleSpec::Haar { num_qubits, .. }
            | EnsembleSpec::GroverPeaked { num_qubits, .. } => *num_qubits,
            EnsembleSpec::ShallowPeaked(s) => s.num_qubits,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnsembleSpec::Uniform { .. } => "uniform",
            EnsembleSpec::Haar { .. } => "haar",
            EnsembleSpec::GroverPeaked { .. } => "grover_peaked",
            EnsembleSpec::ShallowPeaked(_) => "shallow_peaked",
        }
    }

    /// Good-set predicate carried by the spec, if any.
    pub fn predicate(&self) -> Option<&Predicate> {
        match self {
            EnsembleSpec::GroverPeaked { predicate, .. } => Some(predicate),
            _ => None,
        }
    }

    /// Whether distinct draws can yield distinct states.
    pub fn is_stochastic(&self) -> bool {
        match self {
            EnsembleSpec::Haar { .. } => true,
            EnsembleSpec::ShallowPeaked(s) => s.randomization.is_some(),
            _ => false,
        }
    }

    /// Structural checks that do not allocate a state.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits();
        if n == 0 || n > DEFAULT_MAX_QUBITS {
            return Err(Error::Capacity {
                num_qubits: n,
                ceiling: DEFAULT_MAX_QUBITS,
            });
        }
        match self {
            EnsembleSpec::GroverPeaked { .. } => self.circuit(0).map(|_| ()),
            EnsembleSpec::ShallowPeaked(s) => s.build_circuit(0).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Circuit realizing a deterministic family; `None` for Haar.
    pub fn circuit(&self, draw_seed: u64) -> Result<Option<CircuitSpec>> {
        Ok(match self {
            EnsembleSpec::Uniform { num_qubits } => {
                let mut c = CircuitSpec::new(*num_qubits);
                (0..*num_qubits).for_each(|q| {
                    c.push(Gate::H(q));
                });
                Some(c)
            }
            EnsembleSpec::Haar { .. } => None,
            EnsembleSpec::GroverPeaked {
                num_qubits,
                predicate,
                iterations,
                mixing_set,
            } => Some(build_grover_circuit(
                *num_qubits,
                predicate,
                *iterations,
                mixing_set.as_deref(),
            )?),
            EnsembleSpec::ShallowPeaked(s) => Some(s.build_circuit(draw_seed)?),
        })
    }

    /// Draw `draw_index` of the family, reproducible from `master_seed`.
    pub fn prepare(&self, draw_index: u64, master_seed: u64) -> Result<EnsembleDraw> {
        self.validate()?;
        let (state, seed_used) = match self {
            EnsembleSpec::Uniform { num_qubits } => (QuantumState::uniform(*num_qubits)?, master_seed),
            EnsembleSpec::Haar { num_qubits, seed } => {
                let s = rng::derive_seed(master_seed, &[*seed, draw_index]);
                (sample_haar_state(*num_qubits, s)?, s)
            }
            EnsembleSpec::GroverPeaked { .. } => {
                let c = self.circuit(0)?.expect("grover circuit");
                (c.simulate()?, master_seed)
            }
            EnsembleSpec::ShallowPeaked(spec) => {
                let s = match &spec.randomization {
                    Some(r) => rng::derive_seed(master_seed, &[r.seed, draw_index]),
                    None => master_seed,
                };
                (spec.build_circuit(s)?.simulate()?, s)
            }
        };
        Ok(EnsembleDraw {
            state,
            draw_index,
            seed_used,
        })
    }

    /// Copy with the register size replaced (Uniform and Haar only).
    pub fn with_num_qubits(&self, n: usize) -> Result<Self> {
        match self {
            EnsembleSpec::Uniform { .. } => Ok(EnsembleSpec::Uniform { num_qubits: n }),
            EnsembleSpec::Haar { seed, .. } => Ok(EnsembleSpec::Haar {
                num_qubits: n,
                seed: *seed,
            }),
            _ => Err(Error::validation(format!(
                "cannot resize a {} ensemble",
                self.name()
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleDraw {
    pub state: QuantumState,
    pub draw_index: u64,
    pub seed_used: u64,
}

/// Mixing layer on `mixing_set` (default: all qubits), then `iterations`
/// rounds of phase oracle followed by diffusion.
pub fn build_grover_circuit(
    num_qubits: usize,
    predicate: &Predicate,
    iterations: u32,
    mixing_set: Option<&[usize]>,
) -> Result<CircuitSpec> {
    if predicate.num_qubits() != num_qubits {
        return Err(Error::validation(format!(
            "predicate arity {} does not match register size {num_qubits}",
            predicate.num_qubits()
        )));
    }
    let mixing: Vec<usize> = match mixing_set {
        Some(m) => m.to_vec(),
        None => (0..num_qubits).collect(),
    };
    let mut c = CircuitSpec::new(num_qubits);
    for &q in &mixing {
        c.push(Gate::H(q));
    }
    for _ in 0..iterations {
        c.push(Gate::PhaseOracle(predicate.clone()));
        c.push(Gate::Diffusion(mixing.clone()));
    }
    c.validate()?;
    Ok(c)
}

/// Haar-random pure state: i.i.d. standard complex Gaussians, normalized.
pub fn sample_haar_state(num_qubits: usize, seed: u64) -> Result<QuantumState> {
    if num_qubits == 0 || num_qubits > DEFAULT_MAX_QUBITS {
        return Err(Error::Capacity {
            num_qubits,
            ceiling: DEFAULT_MAX_QUBITS,
        });
    }
    let mut g = rng::from_seed(seed);
    let amps = (0..1usize << num_qubits)
        .map(|_| {
            let re: f64 = g.sample(StandardNormal);
            let im: f64 = g.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    QuantumState::from_amplitudes(amps)
}
