use proptest::prelude::*;

use spinquench::mitigation::{
    dd_insert, pauli_twirl, sm_mitigate, trex_expand, zne_extrapolate, zne_fold, DdSpec, ZneFit, ZnePoint,
};
use spinquench::model::{build_layered, neel_state, Boundary, XXZParams};
use spinquench::noise::global_depolarizing_reference;
use spinquench::observables::{staggered_magnetization_distribution, staggered_magnetization_exact};
use spinquench::qmp::{pack, split_counts};
use spinquench::runner::ExperimentConfig;
use spinquench::sim::{apply_circuit, phase_distance, Circuit, CountsHistogram, Distribution, Gate, StateVector};

const N: usize = 4;

fn one_qubit_gate() -> impl Strategy<Value = Gate> {
    (0..N, 0..4u8, -3.0..3.0f64).prop_map(|(q, k, theta)| match k {
        0 => Gate::h(q),
        1 => Gate::sx(q),
        2 => Gate::x(q),
        _ => Gate::rz(q, theta),
    })
}

fn any_gate() -> impl Strategy<Value = Gate> {
    prop_oneof![
        3 => one_qubit_gate(),
        1 => (0..N, 1..N).prop_map(|(a, d)| Gate::cx(a, (a + d) % N)),
        1 => (0..N, 1..N).prop_map(|(a, d)| Gate::cz(a, (a + d) % N)),
    ]
}

fn random_circuit() -> impl Strategy<Value = Circuit> {
    prop::collection::vec(any_gate(), 1..30).prop_map(|gates| {
        let mut c = Circuit::new(N);
        for g in gates {
            c.push(vec![g]).unwrap();
        }
        c
    })
}

fn plus_state() -> StateVector {
    let mut c = Circuit::new(N);
    c.push((0..N).map(Gate::h).collect()).unwrap();
    apply_circuit(StateVector::zero(N), &c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circuits_preserve_the_norm(c in random_circuit()) {
        let s = apply_circuit(plus_state(), &c).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gate_order_within_a_layer_is_irrelevant(
        angles in prop::collection::vec(-3.0..3.0f64, N),
        cx_first in any::<bool>(),
    ) {
        let mut gates: Vec<Gate> = angles.iter().enumerate().skip(2).map(|(q, &t)| Gate::rz(q, t)).collect();
        gates.push(Gate::cx(0, 1));
        if cx_first {
            gates.rotate_right(1);
        }
        let mut a = Circuit::new(N);
        a.push(gates.clone()).unwrap();
        gates.reverse();
        let mut b = Circuit::new(N);
        b.push(gates).unwrap();
        let s = plus_state();
        let d = phase_distance(&apply_circuit(s.clone(), &a).unwrap(), &apply_circuit(s, &b).unwrap());
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn mitigation_transforms_keep_noiseless_distributions(c in random_circuit(), seed in any::<u64>()) {
        let s = plus_state();
        let base = apply_circuit(s.clone(), &c).unwrap().probabilities();
        for copy in pauli_twirl(&c, 3, seed).unwrap() {
            let p = apply_circuit(s.clone(), &copy).unwrap().probabilities();
            prop_assert!(base.iter().zip(&p).all(|(x, y)| (x - y).abs() < 1e-10));
        }
        let dd = dd_insert(&c, &DdSpec::default()).unwrap();
        let p = apply_circuit(s.clone(), &dd).unwrap().probabilities();
        prop_assert!(base.iter().zip(&p).all(|(x, y)| (x - y).abs() < 1e-10));
        for factor in [3, 5] {
            let p = apply_circuit(s.clone(), &zne_fold(&c, factor).unwrap()).unwrap().probabilities();
            prop_assert!(base.iter().zip(&p).all(|(x, y)| (x - y).abs() < 1e-10));
        }
        for (copy, mask) in trex_expand(&c, 4, seed).unwrap() {
            let p = apply_circuit(s.clone(), &copy).unwrap().probabilities();
            for (k, x) in base.iter().enumerate() {
                prop_assert!((x - p[k ^ mask as usize]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn staggered_magnetization_is_bounded_and_consistent(c in random_circuit()) {
        let s = apply_circuit(plus_state(), &c).unwrap();
        let exact = staggered_magnetization_exact(&s);
        let dist = Distribution::from_dense(N, &s.probabilities());
        let from_dist = staggered_magnetization_distribution(&dist, N).unwrap();
        prop_assert!(exact.abs() <= 0.5 + 1e-12);
        prop_assert!((exact - from_dist).abs() < 1e-12);
    }

    #[test]
    fn pure_zz_evolution_keeps_basis_states(basis in 0usize..64, thetas in prop::collection::vec(-2.0..2.0f64, 1..6)) {
        let p = XXZParams::new(6, 1.0, 0.5, 1, Boundary::Periodic);
        let layers: Vec<[f64; 3]> = thetas.iter().map(|&t| [0.0, 0.0, t]).collect();
        let c = build_layered(&p, &layers).unwrap();
        let s = StateVector::basis(6, basis);
        let before = staggered_magnetization_exact(&s);
        let after = staggered_magnetization_exact(&apply_circuit(s, &c).unwrap());
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn split_histograms_conserve_counts(
        outcomes in prop::collection::vec((0u64..64, 1u64..50), 1..40),
        width_a in 1usize..4,
    ) {
        let width_b = 6 - width_a;
        let (_, layout) = pack(&Circuit::new(width_a), &Circuit::new(width_b)).unwrap();
        layout.validate().unwrap();
        prop_assert!(layout.spacers.iter().all(|s| *s >= width_a && *s < layout.offset_b()));
        let mut merged = CountsHistogram::new(6);
        for (k, n) in outcomes {
            merged.add(k, n);
        }
        let (a, b) = split_counts(&merged, &layout).unwrap();
        prop_assert_eq!(a.total(), merged.total());
        prop_assert_eq!(b.total(), merged.total());
        prop_assert_eq!(a.width(), width_a);
        prop_assert_eq!(b.width(), width_b);
    }

    #[test]
    fn counts_text_round_trips(outcomes in prop::collection::vec((0u64..256, 1u64..1000), 1..30)) {
        let mut h = CountsHistogram::new(8);
        for (k, n) in outcomes {
            h.add(k, n);
        }
        prop_assert_eq!(CountsHistogram::from_text(&h.to_text()).unwrap(), h);
    }

    #[test]
    fn sm_is_exact_under_global_depolarizing(p in 0.0..0.9f64, ideal in -0.5..0.5f64) {
        let target = global_depolarizing_reference(p, ideal).unwrap();
        let test = global_depolarizing_reference(p, -0.5).unwrap();
        let e = sm_mitigate(target, test, -0.5);
        prop_assert!((e.mitigated - ideal).abs() < 1e-12);
        prop_assert!((e.breakdown.sm_p.unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn zne_improves_on_monotone_decay(amplitude in 0.05..0.5f64, rate in 0.01..1.0f64) {
        let points: Vec<ZnePoint> = [1.0, 3.0, 5.0]
            .iter()
            .map(|&f| ZnePoint { factor: f, value: amplitude * (-rate * f).exp(), std_error: 0.0 })
            .collect();
        for fit in [ZneFit::Linear, ZneFit::Exponential] {
            let e = zne_extrapolate(&points, fit).unwrap();
            prop_assert!((e.mitigated - amplitude).abs() < (points[0].value - amplitude).abs());
        }
    }

    #[test]
    fn config_survives_its_canonical_form(
        n in 2usize..12,
        steps in 1usize..11,
        seed in any::<u64>(),
        preset in prop::sample::select(vec!["NOQEM", "TREX", "TREX+DD+PT", "TREX+DD+PT+ZNE", "TREX+SM"]),
    ) {
        let text = format!(
            "[experiment]\nseed = {seed}\n[model]\nn_qubits = {n}\nsteps = {steps}\n[mitigation]\npreset = {preset}\n"
        );
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let again = ExperimentConfig::parse(&cfg.to_ini()).unwrap();
        prop_assert_eq!(again.hash(), cfg.hash());
        prop_assert_eq!(again.to_ini(), cfg.to_ini());
    }
}

#[test]
fn neel_state_of_every_even_length_is_minus_half() {
    for n in (2..=12).step_by(2) {
        assert_eq!(staggered_magnetization_exact(&neel_state(n).unwrap()), -0.5);
    }
}
