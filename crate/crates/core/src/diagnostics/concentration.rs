use serde::Serialize;

use crate::state::{BasisIndex, QuantumState};

/// Weights sorted in descending order (ties by ascending basis index) and
/// the top-K masses `M(K)` at the requested `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationCurve {
    #[serde(skip)]
    pub sorted: Vec<(BasisIndex, f64)>,
    #[serde(skip)]
    prefix: Vec<f64>,
    pub points: Vec<(usize, f64)>,
}

impl ConcentrationCurve {
    pub fn from_weights(weights: &[f64], ks: &[usize]) -> Self {
        let mut sorted: Vec<(BasisIndex, f64)> = weights.iter().copied().enumerate().collect();
        sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut acc = 0.0;
        let prefix = sorted
            .iter()
            .map(|(_, q)| {
                acc += q;
                acc
            })
            .collect();
        let mut curve = Self {
            sorted,
            prefix,
            points: vec![],
        };
        curve.points = ks.iter().map(|&k| (k, curve.mass(k))).collect();
        curve
    }

    /// `M(K)` relative to the total weight, so `M(2^n)` is exactly 1;
    /// `K = 0` gives 0 and `K` beyond the basis size gives 1.
    pub fn mass(&self, k: usize) -> f64 {
        let total = self.prefix.last().copied().unwrap_or(0.0);
        match k {
            0 => 0.0,
            _ if total == 0.0 => 0.0,
            k => self.prefix[k.min(self.prefix.len()) - 1] / total,
        }
    }
}

pub fn concentration_curve(state: &QuantumState, ks: &[usize]) -> ConcentrationCurve {
    ConcentrationCurve::from_weights(&state.basis_weights(), ks)
}
