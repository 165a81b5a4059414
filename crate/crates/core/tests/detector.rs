use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use proptest::prelude::*;

use qnd_core::circuit::{
    detect_presence, deterministic_run, weak_measure, OutcomeClass, SignalInput, SignalQubit,
};
use qnd_core::metrics::{self, linspace, TradeoffPoint};
use qnd_core::{tradeoff_curve, Execution, C64};

fn qubit() -> impl Strategy<Value = SignalQubit> {
    (0.0f64..std::f64::consts::PI, -3.2f64..3.2).prop_map(|(t, p)| SignalQubit::from_bloch(t, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn presence_heralds_half_and_restores_signal(q in qubit()) {
        let rep = detect_presence(&SignalInput::Photon(q), true).unwrap();
        prop_assert!((rep.coincidence_probability - 0.5).abs() < 1e-10);
        prop_assert!((rep.total_probability() - 1.0).abs() < 1e-12);
        for o in rep.retained() {
            prop_assert!((o.fidelity.unwrap() - 1.0).abs() < 1e-10);
        }
        let bare = detect_presence(&SignalInput::Photon(q), false).unwrap();
        prop_assert!((bare.success_probability - 0.25).abs() < 1e-10);
    }

    #[test]
    fn superposed_vacuum_heralds_photon_part(q in qubit(), w in 0.0f64..1.0) {
        let input = SignalInput::Superposed {
            vacuum: C64::new((1.0 - w).sqrt(), 0.0),
            photon: C64::new(w.sqrt(), 0.0),
            qubit: q,
        };
        let rep = detect_presence(&input, true).unwrap();
        prop_assert!((rep.coincidence_probability - 0.5 * w).abs() < 1e-12);
        prop_assert!((rep.total_probability() - 1.0).abs() < 1e-12);
        for o in rep.retained() {
            prop_assert!((o.fidelity.unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn weak_metrics_match_closed_forms(q in qubit(), phi in -FRAC_PI_2..FRAC_PI_2) {
        let sim = TradeoffPoint::simulated(&q, phi).unwrap();
        let closed = TradeoffPoint::closed(&q, phi);
        prop_assert!(sim.max_deviation(&closed) < 1e-10, "{:?} vs {:?}", sim, closed);
        let h = metrics::holevo_bound(&q);
        prop_assert!(sim.i_mutual <= h + 1e-10);
        prop_assert!(sim.i_c <= h + 1e-10);
        prop_assert!(sim.i_mutual >= -1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&sim.fidelity));
    }

    #[test]
    fn metrics_ignore_relative_phase(t in 0.0f64..3.0, p in -3.2f64..3.2, phi in 0.0f64..FRAC_PI_2) {
        let a = TradeoffPoint::simulated(&SignalQubit::from_bloch(t, 0.0), phi).unwrap();
        let b = TradeoffPoint::simulated(&SignalQubit::from_bloch(t, p), phi).unwrap();
        prop_assert!(a.max_deviation(&b) < 1e-12);
    }

    #[test]
    fn fidelity_symmetric_about_quarter_turn(q in qubit(), d in 0.0f64..FRAC_PI_4) {
        let lo = metrics::fidelity_simulated(&q, FRAC_PI_4 - d).unwrap();
        let hi = metrics::fidelity_simulated(&q, FRAC_PI_4 + d).unwrap();
        prop_assert!((lo - hi).abs() < 1e-10);
    }

    #[test]
    fn coherent_eigenvalues_sum_to_one(q in qubit(), phi in -3.2f64..3.2) {
        let ci = metrics::coherent_information_closed(&q, phi);
        prop_assert_eq!(ci.lambda1 + ci.lambda2, 1.0);
        prop_assert!((0.0..=1.0).contains(&ci.i_c));
    }

    #[test]
    fn deterministic_branch_table(q in qubit()) {
        let rep = deterministic_run(&q).unwrap();
        prop_assert!((rep.total_probability - 1.0).abs() < 1e-12);
        prop_assert!((rep.class_probability(OutcomeClass::Coincidence) - 0.5).abs() < 1e-12);
        prop_assert!((rep.class_probability(OutcomeClass::DoubleD1) - q.p_h() / 2.0).abs() < 1e-12);
        prop_assert!((rep.class_probability(OutcomeClass::DoubleD2) - q.p_v() / 2.0).abs() < 1e-12);
        let expected = 0.5 + (q.p_h().powi(2) + q.p_v().powi(2)) / 2.0;
        prop_assert!((rep.average_fidelity - expected).abs() < 1e-12);
    }
}

#[test]
fn tzz_is_state_independent() {
    for phi in linspace(0.0, FRAC_PI_2, 17) {
        let values: Vec<f64> = (0..9)
            .map(|k| {
                let q = SignalQubit::from_bloch(0.35 * k as f64, 0.4 * k as f64);
                weak_measure(&q, phi).unwrap().joint.tzz()
            })
            .collect();
        for v in &values {
            assert!((v - (2.0 * phi).cos()).abs() < 1e-10);
        }
    }
}

#[test]
fn fidelity_is_monotone_in_sin_squared() {
    let q = SignalQubit::from_weights(0.75, 0.0);
    let grid = linspace(0.0, FRAC_PI_4, 64);
    let pts = tradeoff_curve(&q, &grid, Execution::default()).unwrap();
    for w in pts.windows(2) {
        assert!(w[1].fidelity >= w[0].fidelity - 1e-12);
        assert!(w[1].i_c <= w[0].i_c + 1e-12);
        assert!(w[1].i_mutual <= w[0].i_mutual + 1e-12);
    }
}

#[test]
fn sequential_and_parallel_sweeps_agree_bitwise() {
    let q = SignalQubit::from_bloch(1.1, 0.2);
    let grid = linspace(-0.3, 1.7, 101);
    let a = tradeoff_curve(&q, &grid, Execution::Sequential).unwrap();
    let b = tradeoff_curve(&q, &grid, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn vacuum_and_superposition_through_config() {
    use qnd_core::{CircuitConfig, RegimeReport};
    let RegimeReport::Presence(rep) = CircuitConfig::presence(true)
        .simulate(&SignalInput::Vacuum)
        .unwrap()
    else {
        panic!("presence report expected");
    };
    assert_eq!(rep.coincidence_probability, 0.0);
    assert!(rep
        .outcomes
        .iter()
        .all(|o| o.class != OutcomeClass::Coincidence));
}
