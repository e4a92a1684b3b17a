use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::{DiagonalObservable, Predicate, Sector, SectorRule};
use crate::state::{BasisIndex, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub z: BasisIndex,
    pub a_z: f64,
    pub contribution: f64,
    /// Running sum `S(i)` through this entry.
    pub s: f64,
    pub sector: Option<Sector>,
    pub in_good_set: Option<bool>,
}

/// Signed contributions `q_z a_z` and their running sum in integer basis
/// order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeTrace {
    pub entries: Vec<TraceEntry>,
}

impl CumulativeTrace {
    pub fn final_value(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.s)
    }

    pub fn max_abs_partial_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.s.abs()).fold(0.0, f64::max)
    }

    /// Attach sector labels and good-set flags for figure shading.
    pub fn annotate(&mut self, rule: Option<&SectorRule>, predicate: Option<&Predicate>) {
        for e in &mut self.entries {
            e.sector = rule.map(|r| r.sector_of(e.z));
            e.in_good_set = predicate.map(|p| p.contains(e.z));
        }
    }
}

pub fn cumulative_trace(state: &QuantumState, obs: &DiagonalObservable) -> Result<CumulativeTrace> {
    if obs.num_qubits() != state.num_qubits() {
        return Err(Error::validation(format!(
            "observable arity {} does not match register size {}",
            obs.num_qubits(),
            state.num_qubits()
        )));
    }
    let mut s = 0.0;
    let entries = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(z, amp)| {
            let a_z = obs.eval_profile(z);
            let contribution = amp.norm_sqr() * a_z;
            s += contribution;
            TraceEntry {
                z,
                a_z,
                contribution,
                s,
                sector: None,
                in_good_set: None,
            }
        })
        .collect();
    Ok(CumulativeTrace { entries })
}
