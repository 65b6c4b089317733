mod common;

use common::{max_abs_diff, oracle};
use lmg_core::bethe::{solve_all, solve_bethe, SolverOptions};
use lmg_core::circuit::{build_circuit, encode, linear_angles, log_angles, distance_4pi};
use lmg_core::ego::build_eigenstate;
use lmg_core::model::{exact_spectrum, make_params, sector_spectrum, SectorConfig};
use lmg_core::sim::{encoded_expectation, fidelity, run};
use lmg_core::Exec;

fn sorted_bethe(n: usize, v: f64, w: f64) -> Vec<f64> {
    let p = make_params(n, v, w).unwrap();
    let opts = SolverOptions { allow_hyperbolic: true, ..Default::default() };
    let mut e: Vec<f64> = solve_all(&p, &opts).unwrap().iter().map(|s| s.omega).collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn n7_spectrum_from_both_methods() {
    let p = make_params(7, 0.75, 0.5).unwrap();
    let exact: Vec<f64> = exact_spectrum(&p).iter().map(|e| e.omega).collect();
    assert!(max_abs_diff(&exact, &oracle::N7_SPECTRUM) < 1e-12);
    assert!(max_abs_diff(&sorted_bethe(7, 0.75, 0.5), &oracle::N7_SPECTRUM) < 1e-10);
}

#[test]
fn other_spectra_match_oracle() {
    for (n, v, w, want) in oracle::SPECTRA {
        let p = make_params(n, v, w).unwrap();
        let exact: Vec<f64> = exact_spectrum(&p).iter().map(|e| e.omega).collect();
        assert!(max_abs_diff(&exact, want) < 1e-11, "N={n}");
    }
    // trigonometric cases also through the Bethe equations
    for (n, v, w, want) in &oracle::SPECTRA[..2] {
        assert!(max_abs_diff(&sorted_bethe(*n, *v, *w), want) < 1e-9, "N={n}");
    }
}

#[test]
fn n7_ground_state_and_angles() {
    let p = make_params(7, 0.75, 0.5).unwrap();
    let c = SectorConfig::new(3, 1, 0).unwrap();
    let sol = &solve_bethe(&c, &p, &SolverOptions::default()).unwrap()[0];
    let psi = build_eigenstate(sol).unwrap();
    assert!(max_abs_diff(psi.amps(), &oracle::N7_GROUND) < 1e-12);
    let t = encode(&psi, &c).unwrap();
    let lin = linear_angles(&t).unwrap();
    for (a, b) in lin.thetas.iter().zip(oracle::N7_LINEAR_ANGLES) {
        assert!(distance_4pi(*a, b) < 1e-11);
    }
}

#[test]
fn n7_fixture_circuits_prepare_fixture_state() {
    let p = make_params(7, 0.75, 0.5).unwrap();
    let c = SectorConfig::new(3, 1, 0).unwrap();
    let t = oracle::N7_GROUND.to_vec();
    for set in [linear_angles(&t).unwrap(), log_angles(&t).unwrap()] {
        let psi = run(&build_circuit(&set), None, Exec::Sequential).unwrap();
        assert!(fidelity(&psi, &t).unwrap() >= 1.0 - 1e-9);
        let e = encoded_expectation(&psi, &c, &p).unwrap();
        assert!(((e - oracle::N7_SPECTRUM[0]) / oracle::N7_SPECTRUM[0]).abs() < 1e-12);
    }
}

#[test]
fn n20_ground_state_and_angles() {
    let p = make_params(20, 0.75, 0.5).unwrap();
    let c = SectorConfig::new(10, 0, 0).unwrap();
    let g = &sector_spectrum(&p, c).unwrap()[0];
    assert!((g.omega - oracle::N20_GROUND_ENERGY).abs() < 1e-11);
    for (a, b) in g.state.amps().iter().zip(oracle::N20_GROUND) {
        assert!(((a - b) / b).abs() < 1e-7, "{a} vs {b}");
    }
    let th = linear_angles(&encode(&g.state, &c).unwrap()).unwrap();
    for (a, b) in th.thetas.iter().zip(oracle::N20_LINEAR_ANGLES) {
        assert!(distance_4pi(*a, b) < 1e-9);
    }
    let psi = run(&build_circuit(&th), None, Exec::Sequential).unwrap();
    assert!(fidelity(&psi, &oracle::N20_GROUND).unwrap() >= 1.0 - 1e-8);
}

#[test]
fn n20_bethe_ground_matches_oracle() {
    let p = make_params(20, 0.75, 0.5).unwrap();
    let c = SectorConfig::new(10, 0, 0).unwrap();
    let sol = &solve_bethe(&c, &p, &SolverOptions::default()).unwrap()[0];
    assert!((sol.omega - oracle::N20_GROUND_ENERGY).abs() < 1e-9);
    let psi = build_eigenstate(sol).unwrap().with_positive_peak();
    assert!(max_abs_diff(psi.amps(), &oracle::N20_GROUND) < 1e-9);
}
