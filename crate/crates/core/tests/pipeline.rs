use pairon_core::pairon::{extract_with, ExtractOptions};
use pairon_core::phase::eigenpair_roots;
use pairon_core::*;
use proptest::prelude::*;

fn ground(j: u32, gx: f64, gy: f64) -> (ModelParams, Spectrum) {
    let p = ModelParams::from_control(j, gx, gy, 1.0).unwrap();
    let s = diagonalize(&build_hamiltonian(&p)).unwrap();
    (p, s)
}

#[test]
fn dimer_pairon_against_closed_form() {
    // j = 1, γx = 1, γy = -1: λ = 1, γ = 0, ground pairon 1 - √2
    let (p, s) = ground(1, 1.0, -1.0);
    let x = extract_with(&p, &s, 0, &ExtractOptions::default()).unwrap();
    let e = x.pairons.pairons()[0];
    assert!((e.re - (1.0 - 2f64.sqrt())).abs() < 1e-14 && e.im.abs() < 1e-14);
    let theta = 2.0 * (1.0 + 2f64.sqrt()).sqrt().atan();
    for z in x.zeros.zeros() {
        assert!((z.point.theta() - theta).abs() < 1e-12, "{}", z.point.theta());
    }
}

#[test]
fn every_state_round_trips_off_the_special_lines() {
    let (p, s) = ground(6, 2.3, 4.1);
    for i in 0..s.pairs.len() {
        let x = extract_with(&p, &s, i, &ExtractOptions::default()).unwrap();
        assert_eq!(x.raw_zeros.total_multiplicity(), 12);
        assert_eq!(x.pairons.len(), 6 - x.pairons.seniority() as usize);
        assert!(x.diagnostics.fidelity.unwrap() > 1.0 - 1e-10, "state {i}");
        assert!(
            x.diagnostics.reconstruction_residual.unwrap() < 1e-10,
            "state {i}"
        );
        assert!(x.diagnostics.conjugation_defect < 1e-8);
    }
}

#[test]
fn rebuilt_ground_state_has_the_ground_energy() {
    let (p, s) = ground(4, 3.0, 7.0);
    let x = extract_with(&p, &s, 0, &ExtractOptions::default()).unwrap();
    let t = x.diagnostics.t;
    let rebuilt = reconstruct_state(&x.pairons, t).unwrap();
    let e = build_hamiltonian(&p).expectation(rebuilt.coeffs());
    assert!((e - s.pairs[0].energy).abs() < 1e-10 * s.norm);
}

#[test]
fn zeros_of_dicke_states_sit_at_the_poles() {
    for m in -3..=3 {
        let st = StateVector::dicke(3, m).unwrap();
        let z = cluster_zeros(&poly_roots(&majorana_poly(&st)).unwrap(), 1e-6);
        assert_eq!(z.multiplicity_at_origin(), (3 + m) as usize);
        assert_eq!(z.multiplicity_at_infinity(), (3 - m) as usize);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zero_count_is_two_j(j in 1u32..12, gx in 0.2f64..9.8, c in 1.0f64..12.0) {
        let gy = c - gx;
        prop_assume!(gy.abs() > 0.1 && (gx / gy).abs() > 1e-2);
        let (_, s) = ground(j, gx, gy);
        for pair in &s.pairs {
            prop_assert_eq!(eigenpair_roots(pair).unwrap().total_multiplicity(), 2 * j as usize);
        }
    }

    #[test]
    fn ground_state_quadrature_is_one(j in 1u32..10, gx in 0.3f64..6.0, gy in 0.3f64..6.0) {
        let (_, s) = ground(j, gx, gy);
        let q = husimi_quadrature(&s.pairs[0].state, 96, 96).unwrap();
        prop_assert!((q - 1.0).abs() < 1e-10, "{}", q);
    }
}
