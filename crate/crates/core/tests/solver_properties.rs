mod common;

use common::{max_abs_diff, trig_params};
use lmg_core::bethe::{eigenvalue, pairons_from_state, residual, solve_bethe, SolverOptions};
use lmg_core::ego::{build_eigenstate, ego_product};
use lmg_core::model::{apply_hamiltonian, make_params, sector_configs, sector_spectrum, SectorConfig};
use lmg_core::Exec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bethe_spectrum_matches_diagonalization(p in trig_params(12)) {
        for c in sector_configs(p.n()) {
            let sols = solve_bethe(&c, &p, &SolverOptions::default()).unwrap();
            let exact: Vec<f64> = sector_spectrum(&p, c).unwrap().iter().map(|e| e.omega).collect();
            let got: Vec<f64> = sols.iter().map(|s| s.omega).collect();
            prop_assert_eq!(got.len(), c.m + 1);
            prop_assert!(max_abs_diff(&got, &exact) < 1e-8);
            for s in &sols {
                let r = residual(&s.energies, &c, &p).unwrap();
                prop_assert!(r.iter().all(|x| x.abs() < 1e-8));
                let psi = build_eigenstate(s).unwrap();
                let h = apply_hamiltonian(&psi, &p).unwrap();
                let res: f64 = h.amps().iter().zip(psi.amps()).map(|(a, b)| (a - s.omega * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(res < 1e-8);
                prop_assert!((eigenvalue(&s.energies, &c, &p).unwrap() - s.omega).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_is_independent_of_pairon_order(p in trig_params(14), rot in 0usize..7) {
        let c = sector_configs(p.n())[0];
        prop_assume!(c.m >= 2);
        let sol = &solve_bethe(&c, &p, &SolverOptions::default()).unwrap()[0];
        let eta = p.eta().unwrap();
        let mut shuffled = sol.energies.clone();
        shuffled.rotate_left(rot % c.m);
        shuffled.reverse();
        let (a, la) = ego_product(&sol.energies, eta, c.nu_a, c.nu_b).unwrap();
        let (b, lb) = ego_product(&shuffled, eta, c.nu_a, c.nu_b).unwrap();
        prop_assert!(max_abs_diff(a.amps(), b.amps()) < 1e-12);
        prop_assert!((la - lb).abs() < 1e-9);
    }

    #[test]
    fn pairons_recovered_from_exact_eigenvectors(p in trig_params(10)) {
        for c in sector_configs(p.n()) {
            let sols = solve_bethe(&c, &p, &SolverOptions::default()).unwrap();
            for (s, e) in sols.iter().zip(sector_spectrum(&p, c).unwrap()) {
                let mut roots: Vec<f64> = pairons_from_state(&e.state, &c, &p).unwrap().iter().map(|z| z.re).collect();
                roots.sort_by(f64::total_cmp);
                let scale = roots.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                prop_assert!(max_abs_diff(&roots, &s.energies) < 1e-6 * scale);
            }
        }
    }

    #[test]
    fn solver_is_deterministic_across_execution_paths(p in trig_params(10), seed in any::<u64>()) {
        let c = sector_configs(p.n())[1 % sector_configs(p.n()).len()];
        let a = solve_bethe(&c, &p, &SolverOptions { seed, exec: Exec::Sequential, ..Default::default() }).unwrap();
        let b = solve_bethe(&c, &p, &SolverOptions { seed, exec: Exec::Parallel, ..Default::default() }).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn hyperbolic_needs_opt_in() {
    let p = make_params(6, 0.3, 1.0).unwrap();
    let c = SectorConfig::new(3, 0, 0).unwrap();
    assert!(solve_bethe(&c, &p, &SolverOptions::default()).is_err());
}

#[test]
fn moderate_size_sector_is_complete() {
    let p = make_params(30, 1.4, -0.6).unwrap();
    for c in sector_configs(30) {
        let sols = solve_bethe(&c, &p, &SolverOptions::default()).unwrap();
        let exact: Vec<f64> = sector_spectrum(&p, c).unwrap().iter().map(|e| e.omega).collect();
        let got: Vec<f64> = sols.iter().map(|s| s.omega).collect();
        assert!(max_abs_diff(&got, &exact) < 1e-8);
    }
}
