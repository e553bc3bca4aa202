//! Randomized invariants. ODE-backed properties run with few cases; the
//! algebraic ones get the default budget.

use proptest::prelude::*;

use lz_zeno::adiabatic::{
    adiabatic_population_matrix, envelope_max, maximin_evaluate, tau_omega, AngleSchedule,
};
use lz_zeno::antiadiabatic::first_order_objective;
use lz_zeno::dp_exact::interpolate_p;
use lz_zeno::lz_core::{
    fresnel, population_matrix, propagate, AmplitudePair, Coupling, TimeInstant, FRESNEL_LIMIT,
};
use lz_zeno::objective::{apply_measurement, upper_bound, BlochVector, MeasurementSchedule};

fn sorted_instants(max_len: usize, range: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-range..range, 0..=max_len).prop_map(|mut v| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    })
}

proptest! {
    #[test]
    fn fresnel_is_odd_and_bounded(t in -60.0f64..60.0) {
        let f = fresnel(t);
        prop_assert!((f + fresnel(-t)).norm() < 1e-12);
        prop_assert!(f.norm() < 1.0);
    }

    #[test]
    fn fresnel_limit_tail(t in 10.0f64..1000.0) {
        // |F(t) - F_inf| decays like 1/t.
        prop_assert!((fresnel(t) - FRESNEL_LIMIT).norm() < 1.0 / t);
    }

    #[test]
    fn interpolate_is_exact_at_endpoints_and_center(
        f0 in 0.0f64..1.0,
        f1 in 0.0f64..1.0,
        p in 0.0f64..1.0,
    ) {
        prop_assert_eq!(interpolate_p(f0, f1, 0.5), 0.5);
        prop_assert_eq!(interpolate_p(f0, f1, 0.0), f0);
        prop_assert_eq!(interpolate_p(f0, f1, 1.0), f1);
        let v = interpolate_p(f0, f1, p);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn measurement_projects_and_contracts(
        x in -0.7f64..0.7, y in -0.7f64..0.7, z in -0.7f64..0.7,
    ) {
        let w = BlochVector::new([x, y, z]).unwrap();
        let m = apply_measurement(&w);
        prop_assert_eq!(m.w, [0.0, 0.0, z]);
        prop_assert!(m.norm() <= w.norm() + 1e-15);
        prop_assert_eq!(apply_measurement(&m).w, m.w);
    }

    #[test]
    fn mirror_is_an_involution(instants in sorted_instants(6, 10.0)) {
        let s = MeasurementSchedule::new(Coupling::new(1.0).unwrap(), instants).unwrap();
        prop_assert_eq!(s.mirror().mirror(), s);
    }

    #[test]
    fn first_order_objective_mirror_degeneracy(instants in sorted_instants(5, 8.0)) {
        let mirrored: Vec<f64> = instants.iter().rev().map(|t| -t).collect();
        let a = first_order_objective(&instants);
        let b = first_order_objective(&mirrored);
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn tau_omega_odd_and_bounded(t in -50.0f64..50.0) {
        let (tau, w) = tau_omega(t);
        let (tau_m, w_m) = tau_omega(-t);
        prop_assert!(tau.abs() <= 1.0);
        prop_assert!((tau + tau_m).abs() < 1e-14);
        prop_assert!((w + w_m).abs() < 1e-10 * (1.0 + w.abs()));
    }

    #[test]
    fn adiabatic_matrix_is_doubly_stochastic(
        gamma in 0.5f64..30.0,
        t0 in -20.0f64..20.0,
        dt in 0.0f64..20.0,
    ) {
        let c = Coupling::new(gamma).unwrap();
        let m = adiabatic_population_matrix(&c, t0, t0 + dt);
        for j in 0..2 {
            let row: f64 = (0..2).map(|k| m.entry(j, k)).sum();
            prop_assert!((row - 1.0).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&m.entry(j, 0)));
        }
    }

    #[test]
    fn envelope_matches_bound_and_grows(n in 0usize..64) {
        let e = envelope_max(n);
        prop_assert!((e - upper_bound(n, std::f64::consts::PI).unwrap()).abs() < 1e-15);
        prop_assert!(e <= envelope_max(n + 1) + 1e-15);
        prop_assert!((0.0..1.0).contains(&e));
    }

    #[test]
    fn maximin_value_never_exceeds_half(
        raw in proptest::collection::vec(0.0f64..std::f64::consts::PI, 1..=6),
    ) {
        let mut alphas = raw;
        alphas.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let schedule = AngleSchedule::new(alphas).unwrap();
        let v = maximin_evaluate(&schedule).unwrap();
        prop_assert!(v <= 0.5 + 1e-12);
        prop_assert!(v >= -1e-12);
    }
}

// ODE-backed properties: a handful of cases keeps the suite quick.
proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn propagation_preserves_norm(
        gamma in 0.05f64..4.0,
        t0 in -10.0f64..10.0,
        dt in -8.0f64..8.0,
        theta in 0.0f64..std::f64::consts::PI,
    ) {
        let c = Coupling::new(gamma).unwrap();
        let psi = AmplitudePair::new(
            (theta / 2.0).cos().into(),
            (theta / 2.0).sin().into(),
        );
        let out = propagate(&c, t0, t0 + dt, &psi).unwrap();
        prop_assert!((out.norm_sq() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn population_matrix_time_reversal(
        gamma in 0.05f64..3.0,
        a in -6.0f64..0.0,
        b in 0.0f64..6.0,
    ) {
        let c = Coupling::new(gamma).unwrap();
        let fwd = population_matrix(&c, TimeInstant::Finite(a), TimeInstant::Finite(b)).unwrap();
        let rev = population_matrix(&c, TimeInstant::Finite(-b), TimeInstant::Finite(-a)).unwrap();
        prop_assert!((fwd.entry(0, 0) - rev.entry(0, 0)).abs() < 1e-8);
    }
}
