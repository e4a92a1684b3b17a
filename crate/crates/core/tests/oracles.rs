mod common;

use common::*;
use qpeak::ensembles::build_grover_circuit;
use qpeak::observables::PredicateSpec;
use qpeak::{EnsembleSpec, Predicate, QuantumState, ShallowSpec};
use serde_json::json;

const SNAPSHOT: &str = "tests/data/shallow_default_n10.json";
const SNAPSHOT_DEPTHS: [u32; 4] = [0, 1, 2, 3];

fn top_k(weights: &[f64], k: usize) -> f64 {
    let mut w = weights.to_vec();
    w.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = w.iter().sum();
    w[..k].iter().sum::<f64>() / total
}

/// Regenerate with `QPEAK_REGENERATE_SNAPSHOTS=1 cargo test --test oracles`.
#[test]
fn shallow_snapshot_matches_dense_oracle() {
    let (mut m1, mut m8) = (vec![], vec![]);
    for d in SNAPSHOT_DEPTHS {
        let c = ShallowSpec::default_template(10, d)
            .unwrap()
            .build_circuit(0)
            .unwrap();
        let q: Vec<f64> = dense_simulate(&c).iter().map(|a| a.norm_sqr()).collect();
        m1.push(top_k(&q, 1));
        m8.push(top_k(&q, 8));
    }
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(SNAPSHOT);
    if std::env::var_os("QPEAK_REGENERATE_SNAPSHOTS").is_some() {
        let doc = json!({"num_qubits": 10, "depths": SNAPSHOT_DEPTHS, "m1": m1, "m8": m8});
        std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap() + "\n").unwrap();
    }
    let snap: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for (key, ours) in [("m1", &m1), ("m8", &m8)] {
        let stored: Vec<f64> = serde_json::from_value(snap[key].clone()).unwrap();
        assert!(
            max_abs_diff(ours, &stored) <= 1e-12,
            "{key}: {ours:?} vs {stored:?}"
        );
    }
}

#[test]
fn grover_circuits_match_dense_products() {
    for n in 2..=5usize {
        let preds = [
            PredicateSpec::BitConstraint {
                num_qubits: n,
                bits: vec![(0, 1)],
            },
            PredicateSpec::Parity {
                num_qubits: n,
                qubits: vec![0, n - 1],
                parity: 0,
            },
            PredicateSpec::SectorParity {
                num_qubits: n,
                bits: vec![(n - 1, 0)],
                qubits: vec![0],
                parity: 1,
            },
            PredicateSpec::IntervalUnion {
                num_qubits: n,
                intervals: vec![(1, 2)],
            },
        ];
        for spec in preds {
            let pred = Predicate::try_from(spec).unwrap();
            for t in 0..4 {
                for mixing in [None, Some(vec![0, n - 1])] {
                    let c = build_grover_circuit(n, &pred, t, mixing.as_deref()).unwrap();
                    let dense = dense_simulate(&c);
                    let sv = c.simulate().unwrap();
                    let dev = sv
                        .amplitudes()
                        .iter()
                        .zip(&dense)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    assert!(dev < 1e-12, "n={n} T={t} mixing={mixing:?}: {dev:e}");
                }
            }
        }
    }
}

/// Upper `1 - 0.001` quantile of chi-square with `k` degrees of freedom
/// (Wilson-Hilferty).
fn chi2_critical_999(k: f64) -> f64 {
    let z = 3.090_232_306_167_813;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

fn chi_square(state: &QuantumState, shots: usize, seed: u64) -> (f64, f64) {
    let q = state.basis_weights();
    let mut counts = vec![0usize; q.len()];
    for z in state.sample_shots(shots, seed) {
        counts[z] += 1;
    }
    // pool bins with small expectation so the statistic stays chi-square
    let mut bins = vec![];
    let (mut e_acc, mut o_acc) = (0.0, 0.0);
    for (z, &w) in q.iter().enumerate() {
        e_acc += w * shots as f64;
        o_acc += counts[z] as f64;
        if e_acc >= 5.0 {
            bins.push((o_acc, e_acc));
            e_acc = 0.0;
            o_acc = 0.0;
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += o_acc;
        last.1 += e_acc;
    }
    let stat = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    (stat, (bins.len() - 1) as f64)
}

#[test]
fn shot_histograms_pass_chi_square() {
    let states = [
        QuantumState::uniform(6).unwrap(),
        EnsembleSpec::Haar {
            num_qubits: 6,
            seed: 3,
        }
        .prepare(0, 11)
        .unwrap()
        .state,
        EnsembleSpec::Haar {
            num_qubits: 4,
            seed: 5,
        }
        .prepare(1, 11)
        .unwrap()
        .state,
        ShallowSpec {
            num_qubits: 5,
            hadamard_set: vec![0, 1, 2],
            bias_angles: [(0, 0.7), (2, 1.9)].into_iter().collect(),
            x_set: vec![4],
            edges: vec![],
            depth: 2,
            randomization: None,
        }
        .build_circuit(0)
        .unwrap()
        .simulate()
        .unwrap(),
    ];
    for (i, s) in states.iter().enumerate() {
        let (stat, dof) = chi_square(s, 100_000, 1000 + i as u64);
        let crit = chi2_critical_999(dof);
        assert!(
            stat < crit,
            "state {i}: chi2={stat:.1} dof={dof} critical={crit:.1}"
        );
    }
}

#[test]
fn chi_square_detects_a_wrong_distribution() {
    // sampling the uniform state but testing against a tilted one must fail
    let uniform = QuantumState::uniform(4).unwrap();
    let mut tilted = QuantumState::uniform(4).unwrap();
    tilted.apply_gate(&qpeak::Gate::Ry(0, 0.4)).unwrap();
    let q = tilted.basis_weights();
    let shots = uniform.sample_shots(100_000, 9);
    let mut counts = vec![0.0; 16];
    for z in shots {
        counts[z] += 1.0;
    }
    let stat: f64 = q
        .iter()
        .zip(&counts)
        .map(|(w, o)| (o - w * 1e5).powi(2) / (w * 1e5))
        .sum();
    assert!(stat > chi2_critical_999(15.0));
}
