mod common;

use proptest::prelude::*;
use qpeak::diagnostics::RunningStats;
use qpeak::ensembles::{Edge, Entangler, Randomization};
use qpeak::observables::PredicateSpec;
use qpeak::{
    concentration_curve, cumulative_trace, exact_sector_estimates, p_g_ideal, shot_sector_estimates,
    CircuitSpec, DiagonalObservable, EnsembleSpec, Gate, Predicate, QuantumState, Sector, SectorRule,
    ShallowSpec, ZString,
};

fn subset(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n)
}

fn nonempty_subset(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n)
}

fn predicate(n: usize) -> impl Strategy<Value = Predicate> {
    let dim = 1u64 << n;
    prop_oneof![
        nonempty_subset(n)
            .prop_flat_map(|s| {
                let k = s.len();
                (Just(s), proptest::collection::vec(0u8..2, k))
            })
            .prop_map(move |(s, b)| PredicateSpec::BitConstraint {
                num_qubits: n,
                bits: s.into_iter().zip(b).collect()
            }),
        (nonempty_subset(n), 0u8..2).prop_map(move |(qubits, parity)| PredicateSpec::Parity {
            num_qubits: n,
            qubits,
            parity
        }),
        (0..dim, 0..dim).prop_map(move |(a, b)| PredicateSpec::IntervalUnion {
            num_qubits: n,
            intervals: vec![(a.min(b), a.max(b))]
        }),
    ]
    .prop_map(|s| Predicate::try_from(s).unwrap())
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    let pair = (0..n, 1..n.max(2)).prop_map(move |(a, d)| (a, (a + d) % n));
    prop_oneof![
        (0..n).prop_map(Gate::H),
        (0..n).prop_map(Gate::X),
        (0..n, -7.0..7.0f64).prop_map(|(q, t)| Gate::Ry(q, t)),
        (0..n, -7.0..7.0f64).prop_map(|(q, t)| Gate::Rz(q, t)),
        pair.clone()
            .prop_map(|(control, target)| Gate::Cnot { control, target }),
        pair.prop_map(|(a, b)| Gate::Cz(a, b)),
        nonempty_subset(n).prop_map(Gate::Mcz),
        predicate(n).prop_map(Gate::PhaseOracle),
        nonempty_subset(n).prop_map(Gate::Diffusion),
    ]
}

fn circuit(max_n: usize, max_len: usize) -> impl Strategy<Value = CircuitSpec> {
    (2..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(gate(n), 0..max_len)
            .prop_map(move |gates| CircuitSpec { num_qubits: n, gates })
    })
}

fn observable(n: usize) -> impl Strategy<Value = DiagonalObservable> {
    proptest::collection::vec((subset(n), -2.0..2.0f64), 1..4).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .map(|(s, c)| ZString::new(&s, c).unwrap())
            .collect();
        DiagonalObservable::new(n, terms).unwrap()
    })
}

fn rule(n: usize) -> impl Strategy<Value = SectorRule> {
    prop_oneof![
        (0..n).prop_map(SectorRule::SingleQubit),
        nonempty_subset(n).prop_map(SectorRule::ParitySubset)
    ]
}

fn dist(a: &QuantumState, b: &QuantumState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A state, an observable and a rule on the same register.
fn scenario() -> impl Strategy<Value = (QuantumState, DiagonalObservable, SectorRule)> {
    circuit(8, 40).prop_flat_map(|c| {
        let n = c.num_qubits;
        (Just(c.simulate().unwrap()), observable(n), rule(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn circuits_preserve_norm(c in circuit(8, 200)) {
        let s = c.simulate().unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-9);
        prop_assert_eq!(s.amplitudes().len(), 1 << c.num_qubits);
    }

    #[test]
    fn gates_match_dense_matrices((n, g, seed) in (2usize..=4).prop_flat_map(|n| (Just(n), gate(n), any::<u64>()))) {
        let state = EnsembleSpec::Haar { num_qubits: n, seed }.prepare(0, 0).unwrap().state;
        let mut s = state.clone();
        s.apply_gate(&g).unwrap();
        let dense = common::gate_matrix(&g, n).apply(state.amplitudes());
        let dev = s.amplitudes().iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(dev <= 1e-12, "{:?}: {}", g, dev);
    }

    #[test]
    fn oracle_is_an_involution((c, pred) in circuit(7, 20).prop_flat_map(|c| { let n = c.num_qubits; (Just(c), predicate(n)) })) {
        let s0 = c.simulate().unwrap();
        let mut s = s0.clone();
        s.apply_phase_oracle(&pred).unwrap();
        s.apply_phase_oracle(&pred).unwrap();
        prop_assert!(dist(&s, &s0) <= 1e-15);
    }

    #[test]
    fn diffusion_is_an_involution((c, set) in circuit(7, 20).prop_flat_map(|c| { let n = c.num_qubits; (Just(c), nonempty_subset(n)) })) {
        let s0 = c.simulate().unwrap();
        let mut s = s0.clone();
        s.apply_diffusion(&set).unwrap();
        s.apply_diffusion(&set).unwrap();
        prop_assert!(dist(&s, &s0) <= 1e-12);
    }

    #[test]
    fn sector_rule_partitions_and_decomposes_z(n in 1usize..=10, r in (1usize..=10).prop_flat_map(rule)) {
        prop_assume!(r.validate(n).is_ok());
        let up = (0..1usize << n).filter(|&z| r.sector_of(z) == Sector::Up).count();
        let down = (0..1usize << n).filter(|&z| r.sector_of(z) == Sector::Down).count();
        prop_assert_eq!(up + down, 1 << n);
        if let SectorRule::SingleQubit(k) = r {
            let zk = DiagonalObservable::z_string(n, &[k]).unwrap();
            for z in 0..1usize << n {
                let expect = if r.sector_of(z) == Sector::Up { 1.0 } else { -1.0 };
                prop_assert_eq!(zk.eval_profile(z), expect);
            }
        }
    }

    #[test]
    fn profile_matches_dense_diagonal(n in 1usize..=6, support in (1usize..=6).prop_flat_map(subset)) {
        let support: Vec<usize> = support.into_iter().filter(|&q| q < n).collect();
        let obs = DiagonalObservable::z_string(n, &support).unwrap();
        let dense = common::dense_observable(&obs);
        for z in 0..1usize << n {
            prop_assert_eq!(obs.eval_profile(z), dense.at(z, z).re);
            prop_assert!(obs.eval_profile(z).abs() == 1.0);
        }
    }

    #[test]
    fn ideal_good_set_mass_is_non_monotone(f in 1e-3..0.45f64) {
        let period = (std::f64::consts::PI / (2.0 * f.sqrt().asin())).ceil() as u32 + 2;
        let p: Vec<f64> = (0..=period).map(|t| p_g_ideal(t, f).unwrap()).collect();
        prop_assert!(p.windows(3).any(|w| w[1] > w[0] && w[1] > w[2]), "{:?}", p);
    }

    #[test]
    fn sector_fields_are_consistent((s, obs, r) in scenario()) {
        let e = exact_sector_estimates(&s, &obs, &r).unwrap();
        let bound: f64 = obs.terms().iter().map(|t| t.coefficient().abs()).sum();
        prop_assert!((e.pi_up + e.pi_down - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&e.pi_up));
        prop_assert!(e.c_e.abs() <= bound + 1e-12);
        prop_assert!(e.w_up.abs() <= bound * e.pi_up + 1e-12);
        let trace = cumulative_trace(&s, &obs).unwrap();
        prop_assert!((trace.final_value() - e.a_avg).abs() <= 1e-12);
    }

    #[test]
    fn concentration_is_monotone_and_concave((s, _, _) in scenario()) {
        let dim = s.dim();
        let c = concentration_curve(&s, &[]);
        let m: Vec<f64> = (0..=dim).map(|k| c.mass(k)).collect();
        prop_assert_eq!(m[dim], 1.0);
        for k in 1..=dim {
            prop_assert!(m[k] >= m[k - 1]);
            prop_assert!(m[k] + 1e-12 >= k as f64 / dim as f64);
            if k >= 2 {
                prop_assert!(m[k] - m[k - 1] <= m[k - 1] - m[k - 2] + 1e-15);
            }
        }
    }

    #[test]
    fn shot_estimates_match_running_means((s, obs, r) in scenario(), shots in 1usize..300, seed in any::<u64>()) {
        let outcomes = s.sample_shots(shots, seed);
        prop_assert_eq!(&outcomes, &s.sample_shots(shots, seed));
        let e = shot_sector_estimates(&outcomes, &obs, &r).unwrap();
        prop_assert_eq!(e.pi_up + e.pi_down, 1.0);
        let mut stats = RunningStats::default();
        for &z in &outcomes {
            let sign = if r.sector_of(z) == Sector::Up { 1.0 } else { -1.0 };
            stats.push(sign * obs.eval_profile(z));
        }
        prop_assert!((e.c_e - stats.mean()).abs() <= 1e-12);
        let se = e.std_errors.unwrap();
        prop_assert!(se.to_array().iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn randomization_preserves_weights(
        hs in subset(6), xs in subset(6), depth in 0u32..4, seed in any::<u64>(), draw in 0u64..5,
        a in 0.0..3.0f64,
    ) {
        let plain = ShallowSpec {
            num_qubits: 6,
            hadamard_set: hs,
            bias_angles: [(0, a), (3, 2.0 * a)].into_iter().collect(),
            x_set: xs,
            edges: vec![Edge { control: 0, target: 1, gate: Entangler::Cnot }, Edge { control: 3, target: 2, gate: Entangler::Cz }],
            depth,
            randomization: None,
        };
        let mut randomized = plain.clone();
        randomized.randomization = Some(Randomization { seed, qubits: None, max_angle: std::f64::consts::TAU });
        let q0 = EnsembleSpec::ShallowPeaked(plain).prepare(draw, 1).unwrap().state.basis_weights();
        let spec = EnsembleSpec::ShallowPeaked(randomized);
        let q1 = spec.prepare(draw, 1).unwrap().state.basis_weights();
        prop_assert!(common::max_abs_diff(&q0, &q1) <= 1e-12);
        // deterministic in (spec, draw, master seed)
        let (a, b) = (spec.prepare(draw, 1).unwrap().state, spec.prepare(draw, 1).unwrap().state);
        prop_assert_eq!(a.amplitudes(), b.amplitudes());
    }
}
