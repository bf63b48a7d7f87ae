use pairon_core::collapse::*;
use pairon_core::spin::StateVector;
use pairon_core::*;

#[test]
fn sixteen_points_on_the_c10_line() {
    let pts = collapse_points(10, 10.0).unwrap();
    assert_eq!(pts.len(), 16);
    for p in &pts {
        let h = (19.0 / (19.0 - 2.0 * p.k as f64)).powi(2);
        let want = 5.0 + p.branch.sign() * (25.0 - h).sqrt();
        assert!((p.gamma_x - want).abs() < 1e-12);
        assert!((p.gamma_x * p.gamma_y - h).abs() < 1e-9);
    }
}

#[test]
fn diagonal_point_is_the_lowest_dicke_state() {
    let p = ModelParams::from_control(10, 5.0, 5.0, 1.0).unwrap();
    let s = diagonalize(&build_hamiltonian(&p)).unwrap();
    let low = StateVector::dicke(10, -10).unwrap();
    assert!(s.pairs[0].state.fidelity(&low) > 1.0 - 1e-15);
    assert!((s.pairs[0].energy - (-10.0 + 50.0 / 19.0)).abs() < 1e-12);
}

#[test]
fn dispersion_scan_finds_the_low_k_collapses() {
    let spec = TrajectorySpec::new(10, Line::Sum(10.0), 0.05, 9.95, 1000).unwrap();
    let table = scan_trajectory(&spec).unwrap();
    assert_eq!(table.skipped().count(), 0);
    let found = detect_collapses(&table, &DetectOptions::default()).unwrap();
    for p in collapse_points(10, 10.0)
        .unwrap()
        .iter()
        .filter(|p| (1..=3).contains(&p.k))
    {
        let best = found
            .iter()
            .filter(|c| c.kind == CandidateKind::DispersionMinimum)
            .map(|c| (c.gamma_x - p.gamma_x).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-3, "k = {} {}: {best}", p.k, p.branch.symbol());
    }
    let poles = locate_pole_crossings(&table);
    for p in collapse_points(10, 10.0).unwrap().iter().filter(|p| p.k == 0) {
        assert!(poles.iter().any(|c| (c.gamma_x - p.gamma_x).abs() < 1e-9));
    }
}

#[test]
fn crossings_are_verified() {
    let cs = crossing_points(10);
    assert_eq!(cs.len(), 10);
    for c in &cs {
        assert!(verify_crossing(10, c, 1.0).unwrap().verified, "k = {}", c.k);
    }
}
