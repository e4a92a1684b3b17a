use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::Error;
use crate::observables::{ObservableSpec, Predicate, SectorRule};
use crate::state::DEFAULT_MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Weights,
    Cumulative,
    Sector,
    GroverSweep,
    ShallowSweep,
    HaarScaling,
}

fn default_seeds() -> usize {
    1
}

fn default_k_list() -> Vec<usize> {
    vec![1, 8, 32, 64]
}

fn default_output_dir() -> String {
    ".".into()
}

/// One experiment, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub master_seed: u64,
    pub ensemble: EnsembleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSpec>,
    pub sector_rule: SectorRule,
    /// Good-set marking for weight and trace tables; defaults to the
    /// ensemble's own predicate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<Predicate>,
    #[serde(default)]
    pub shots: usize,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub draw_index: u64,
    #[serde(default = "default_k_list")]
    pub k_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_list: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d_list: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    /// Not part of the embedded config: results do not depend on it.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: String,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Canonical compact serialization; embedded in outputs and hashed.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn effective_predicate(&self) -> Option<&Predicate> {
        self.predicate.as_ref().or_else(|| self.ensemble.predicate())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Validation,
    Capacity,
}

/// A problem that would stop `run`, tied to the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
    pub kind: DiagnosticKind,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

struct Collector(Vec<Diagnostic>);

impl Collector {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            field: field.into(),
            message: message.into(),
            kind: DiagnosticKind::Validation,
        });
    }

    fn capacity(&mut self, field: &str, n: usize) {
        self.0.push(Diagnostic {
            field: field.into(),
            message: format!("{n} qubits requested, supported range is 1..={DEFAULT_MAX_QUBITS}"),
            kind: DiagnosticKind::Capacity,
        });
    }

    fn error(&mut self, field: &str, e: Error) {
        match e {
            Error::Capacity { num_qubits, .. } => self.capacity(field, num_qubits),
            other => self.push(field, other.to_string()),
        }
    }
}

fn in_capacity(n: usize) -> bool {
    (1..=DEFAULT_MAX_QUBITS).contains(&n)
}

/// Pure precondition check; empty iff `run` would get past validation.
pub fn validate(cfg: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Collector(vec![]);
    let n = cfg.ensemble.num_qubits();
    let scaling = cfg.experiment == ExperimentKind::HaarScaling;

    if !scaling {
        if !in_capacity(n) {
            out.capacity("ensemble.num_qubits", n);
        } else if let Err(e) = cfg.ensemble.validate() {
            out.error("ensemble", e);
        }
    }

    match cfg.experiment {
        ExperimentKind::GroverSweep => {
            if !matches!(cfg.ensemble, EnsembleSpec::GroverPeaked { .. }) {
                out.push("ensemble.kind", "grover-sweep needs a grover_peaked ensemble");
            }
            if cfg.t_list.is_empty() {
                out.push("t_list", "grover-sweep needs a non-empty t_list");
            }
        }
        ExperimentKind::ShallowSweep => {
            if !matches!(cfg.ensemble, EnsembleSpec::ShallowPeaked(_)) {
                out.push("ensemble.kind", "shallow-sweep needs a shallow_peaked ensemble");
            }
            if cfg.d_list.is_empty() {
                out.push("d_list", "shallow-sweep needs a non-empty d_list");
            }
        }
        ExperimentKind::HaarScaling => {
            if !matches!(cfg.ensemble, EnsembleSpec::Haar { .. }) {
                out.push("ensemble.kind", "haar-scaling needs a haar ensemble");
            }
            if cfg.n_list.len() < 4 {
                out.push(
                    "n_list",
                    format!("needs at least 4 register sizes, got {}", cfg.n_list.len()),
                );
            }
            if cfg.n_list.windows(2).any(|w| w[0] >= w[1]) {
                out.push("n_list", "must be strictly ascending");
            }
            for &m in &cfg.n_list {
                if !in_capacity(m) {
                    out.capacity("n_list", m);
                }
            }
            if cfg.draws.unwrap_or(0) == 0 {
                out.push("draws", "haar-scaling needs draws >= 1");
            }
        }
        _ => {}
    }

    let needs_obs = cfg.experiment != ExperimentKind::Weights;
    let sizes: Vec<usize> = if scaling {
        cfg.n_list.iter().copied().filter(|&m| in_capacity(m)).collect()
    } else if in_capacity(n) {
        vec![n]
    } else {
        vec![]
    };
    match &cfg.observable {
        None if needs_obs => out.push("observable", "this experiment needs an observable"),
        None => {}
        Some(spec) => {
            for &m in &sizes {
                if let Err(e) = spec.build(m) {
                    out.error("observable", e);
                    break;
                }
            }
        }
    }
    for &m in &sizes {
        if let Err(e) = cfg.sector_rule.validate(m) {
            out.error("sector_rule", e);
            break;
        }
    }
    if let Some(p) = &cfg.predicate {
        if !scaling && p.num_qubits() != n {
            out.push(
                "predicate.num_qubits",
                format!(
                    "predicate arity {} does not match ensemble num_qubits {n}",
                    p.num_qubits()
                ),
            );
        }
    }
    if cfg.seeds == 0 {
        out.push("seeds", "seeds must be >= 1");
    }
    if cfg.k_list.contains(&0) {
        out.push("k_list", "K values must be >= 1");
    }
    if cfg.output_dir.is_empty() {
        out.push("output_dir", "output directory must not be empty");
    }
    out.0
}
