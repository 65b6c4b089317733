mod common;

use common::{trig_params, unit_vector};
use lmg_core::model::{
    apply_hamiltonian, exact_spectrum, expectation, make_params, sector_configs, sector_spectrum, FockVector,
    SectorConfig, TridiagonalBlock,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blocks_are_symmetric_with_matching_trace(p in trig_params(24)) {
        for c in sector_configs(p.n()) {
            let m = TridiagonalBlock::new(&p, c).unwrap().to_dense();
            prop_assert!((&m - m.transpose()).amax() == 0.0);
            let trace: f64 = m.diagonal().sum();
            let eig: f64 = sector_spectrum(&p, c).unwrap().iter().map(|e| e.omega).sum();
            prop_assert!((trace - eig).abs() <= 1e-10 * (1.0 + trace.abs()));
        }
    }

    #[test]
    fn spectrum_has_n_plus_one_states(p in trig_params(30)) {
        let s = exact_spectrum(&p);
        prop_assert_eq!(s.len(), p.n() + 1);
        prop_assert!(s.windows(2).all(|w| w[0].omega <= w[1].omega));
    }

    #[test]
    fn hamiltonian_preserves_parity_block(p in trig_params(20), parity in 0u8..2, seed in any::<u64>()) {
        prop_assume!(p.n() >= parity as usize);
        let len = FockVector::support_len(p.n(), parity).unwrap();
        let amps: Vec<f64> = (0..len).map(|k| ((seed.wrapping_mul(k as u64 + 7) % 1000) as f64 / 500.0) - 1.0).collect();
        let psi = FockVector::new(p.n(), parity, amps).unwrap();
        let h = apply_hamiltonian(&psi, &p).unwrap();
        prop_assert_eq!(h.parity(), parity);
        prop_assert_eq!(h.len(), len);
    }

    #[test]
    fn expectation_is_bounded_by_extremes(p in trig_params(16), v in unit_vector(9)) {
        let c = SectorConfig::for_parity(p.n(), 0).unwrap();
        let dim = c.dim();
        let mut amps: Vec<f64> = v.iter().copied().cycle().take(dim).collect();
        let n = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(n > 1e-6);
        amps.iter_mut().for_each(|x| *x /= n);
        let psi = FockVector::new(p.n(), 0, amps).unwrap();
        let e = expectation(&psi, &p).unwrap();
        let s = sector_spectrum(&p, c).unwrap();
        prop_assert!(e >= s[0].omega - 1e-12 && e <= s[s.len() - 1].omega + 1e-12);
    }

    #[test]
    fn eigenvectors_are_orthonormal(p in trig_params(18)) {
        for c in sector_configs(p.n()) {
            let s = sector_spectrum(&p, c).unwrap();
            for (i, a) in s.iter().enumerate() {
                for (j, b) in s.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((a.state.dot(&b.state) - want).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn unnormalized_expectation_is_rejected() {
    let p = make_params(4, 1.0, 0.2).unwrap();
    let psi = FockVector::new(4, 0, vec![1.0, 1.0, 0.0]).unwrap();
    assert!(expectation(&psi, &p).is_err());
}
