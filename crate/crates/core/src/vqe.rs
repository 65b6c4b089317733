//! Variational ground-state search over circuit angles, and a benchmark
//! report that scores circuit preparation and VQE against exact answers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bethe::{solve_bethe, SolverOptions};
use crate::circuit::{angles, build_circuit, encode, wrap_4pi, AngleSet, DepthMode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{sector_configs, sector_spectrum, ModelParams, SectorConfig};
use crate::optim::{nelder_mead, SimplexOptions};
use crate::sim::{encoded_expectation, fidelity, pauli_groups, run, sampled_expectation};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
const SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Estimator {
    Exact,
    Sampled { shots: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMode {
    /// First restart at the angles of the exact target, the rest random.
    Warm,
    /// Every restart uniformly random in `[0, 4pi)^M`.
    Cold,
}

/// Energy of the circuit state for `thetas`. `seed` only matters for the
/// sampled estimator; the returned pair is `(energy, standard error)`.
pub fn objective_with_error(
    thetas: &AngleSet,
    c: &SectorConfig,
    p: &ModelParams,
    estimator: Estimator,
    seed: u64,
) -> Result<(f64, f64)> {
    if thetas.m() != c.m {
        return Err(Error::invalid(format!("sector {c} needs {} angles, got {}", c.m, thetas.m())));
    }
    let psi = run(&build_circuit(thetas), None, Exec::Sequential)?;
    match estimator {
        Estimator::Exact => Ok((encoded_expectation(&psi, c, p)?, 0.0)),
        Estimator::Sampled { shots } => sampled_expectation(&psi, &pauli_groups(c, p)?, shots, seed),
    }
}

pub fn objective(thetas: &AngleSet, c: &SectorConfig, p: &ModelParams, estimator: Estimator, seed: u64) -> Result<f64> {
    objective_with_error(thetas, c, p, estimator, seed).map(|r| r.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VqeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub estimator: Estimator,
    pub start: StartMode,
    pub mode: DepthMode,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    /// Largest `|E - E_exact|` counted as a converged run.
    pub target_tol: f64,
    pub exec: Exec,
}

impl Default for VqeOptions {
    fn default() -> Self {
        VqeOptions {
            restarts: 10,
            seed: 0,
            estimator: Estimator::Exact,
            start: StartMode::Cold,
            mode: DepthMode::Linear,
            max_evals: 20_000,
            target_tol: 1e-6,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeResult {
    pub config: SectorConfig,
    pub best_thetas: AngleSet,
    pub best_energy: f64,
    /// Standard error of `best_energy`; zero for the exact estimator.
    pub stderr: f64,
    pub exact_energy: f64,
    pub abs_error: f64,
    /// Objective evaluations summed over all restarts.
    pub evaluations: usize,
    /// Restart that produced the best point.
    pub best_restart: usize,
    /// `(iteration, best energy so far)` for the winning restart.
    pub trace: Vec<(usize, f64)>,
    pub seed: u64,
    pub estimator: Estimator,
    pub start: StartMode,
    pub converged: bool,
}

struct Restart {
    thetas: Vec<f64>,
    value: f64,
    evaluations: usize,
    trace: Vec<f64>,
}

fn restart_seed(seed: u64, r: usize) -> u64 {
    seed ^ (r as u64).wrapping_add(1).wrapping_mul(SEED_MIX)
}

/// Minimizes the sector energy over `M` angles from seeded restarts.
pub fn optimize(c: &SectorConfig, p: &ModelParams, opts: &VqeOptions) -> Result<VqeResult> {
    if c.n() != p.n() {
        return Err(Error::invalid(format!("sector {c} does not hold N={} particles", p.n())));
    }
    if opts.restarts == 0 {
        return Err(Error::invalid("at least one restart is required"));
    }
    if matches!(opts.estimator, Estimator::Sampled { shots: 0 }) {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let ground = sector_spectrum(p, *c)?.into_iter().next().expect("sector has a state");
    let exact_energy = ground.omega;
    let warm = match opts.start {
        StartMode::Warm => Some(angles(&encode(&ground.state, c)?, opts.mode)?.thetas),
        StartMode::Cold => None,
    };

    let m = c.m;
    let one = |r: usize| -> Result<Restart> {
        let rs = restart_seed(opts.seed, r);
        let mut rng = ChaCha8Rng::seed_from_u64(rs);
        let (x0, step) = match (&warm, r) {
            (Some(t), 0) => (t.clone(), 1e-3),
            _ => ((0..m).map(|_| rng.gen_range(0.0..FOUR_PI)).collect(), 1.0),
        };
        let mut calls = 0u64;
        let f = |x: &[f64]| {
            calls += 1;
            let a = AngleSet::new(x.to_vec(), opts.mode)?;
            objective(&a, c, p, opts.estimator, rs.wrapping_add(calls.wrapping_mul(SEED_MIX)))
        };
        let simplex = SimplexOptions { step, max_evals: opts.max_evals, ..Default::default() };
        let out = nelder_mead(f, &x0, &simplex)?;
        Ok(Restart { thetas: out.x, value: out.value, evaluations: out.evaluations, trace: out.trace })
    };
    let runs: Vec<Result<Restart>> = opts.exec.map_range(opts.restarts, one);

    let mut best: Option<(usize, Restart)> = None;
    let mut evaluations = 0;
    for (r, run) in runs.into_iter().enumerate() {
        let run = run?;
        evaluations += run.evaluations;
        if best.as_ref().is_none_or(|(_, b)| run.value < b.value) {
            best = Some((r, run));
        }
    }
    let (best_restart, best) = best.expect("restarts >= 1");
    let best_thetas = AngleSet::new(best.thetas.iter().map(|&t| wrap_4pi(t)).collect(), opts.mode)?;

    // a fresh estimate removes the bias of picking the lowest noisy value
    let (best_energy, stderr) = match opts.estimator {
        Estimator::Exact => (objective(&best_thetas, c, p, Estimator::Exact, 0)?, 0.0),
        est => {
            evaluations += 1;
            objective_with_error(&best_thetas, c, p, est, restart_seed(opts.seed, usize::MAX))?
        }
    };
    let abs_error = (best_energy - exact_energy).abs();
    let tol = opts.target_tol.max(5.0 * stderr);
    Ok(VqeResult {
        config: *c,
        best_thetas,
        best_energy,
        stderr,
        exact_energy,
        abs_error,
        evaluations,
        best_restart,
        trace: best.trace.into_iter().enumerate().collect(),
        seed: opts.seed,
        estimator: opts.estimator,
        start: opts.start,
        converged: abs_error <= tol,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchmarkOptions {
    /// Run VQE on each sector's ground state.
    pub run_vqe: bool,
    /// Shot budgets for sampled runs, in addition to the exact estimator.
    pub shot_budgets: Vec<u64>,
    pub restarts: usize,
    pub seed: u64,
    pub start_modes: Vec<StartMode>,
    pub exec: Exec,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions {
            run_vqe: true,
            shot_budgets: Vec::new(),
            restarts: 4,
            seed: 0,
            start_modes: vec![StartMode::Warm, StartMode::Cold],
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchmarkRow {
    /// 1-based position in the sector, by increasing energy.
    pub index: usize,
    pub omega_exact: f64,
    pub omega_bethe: Option<f64>,
    pub fidelity_linear: Option<f64>,
    pub fidelity_log: Option<f64>,
    /// Relative error of the prepared state's energy against `omega_exact`.
    pub energy_error_linear: Option<f64>,
    pub energy_error_log: Option<f64>,
    pub vqe: Vec<VqeResult>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub config: SectorConfig,
    pub rows: Vec<BenchmarkRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchmarkReport {
    pub params: ModelParams,
    pub sectors: Vec<SectorReport>,
}

fn relative_error(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn prepare_and_score(t: &[f64], c: &SectorConfig, p: &ModelParams, omega: f64, mode: DepthMode) -> Result<(f64, f64)> {
    let psi = run(&build_circuit(&angles(t, mode)?), None, Exec::Sequential)?;
    Ok((fidelity(&psi, t)?, relative_error(encoded_expectation(&psi, c, p)?, omega)))
}

/// Scores every eigenstate of every sector: exact and Bethe energies,
/// circuit preparation in both depth modes, and VQE on each ground state.
/// Failures are recorded on the row they affect.
pub fn benchmark(p: &ModelParams, opts: &BenchmarkOptions) -> Result<BenchmarkReport> {
    let mut sectors = Vec::new();
    for c in sector_configs(p.n()) {
        let exact = sector_spectrum(p, c)?;
        let solver = SolverOptions { exec: opts.exec, ..Default::default() };
        let bethe = solve_bethe(&c, p, &solver);
        let rows = opts.exec.map_range(exact.len(), |j| {
            let pair = &exact[j];
            let mut row = BenchmarkRow {
                index: j + 1,
                omega_exact: pair.omega,
                omega_bethe: None,
                fidelity_linear: None,
                fidelity_log: None,
                energy_error_linear: None,
                energy_error_log: None,
                vqe: Vec::new(),
                error: None,
            };
            let mut errors = Vec::new();
            match &bethe {
                Ok(sols) => row.omega_bethe = sols.get(j).map(|s| s.omega),
                Err(e) => errors.push(format!("bethe: {e}")),
            }
            match encode(&pair.state, &c) {
                Ok(t) => {
                    for mode in [DepthMode::Linear, DepthMode::Log] {
                        match prepare_and_score(&t, &c, p, pair.omega, mode) {
                            Ok((f, err)) if mode == DepthMode::Linear => {
                                row.fidelity_linear = Some(f);
                                row.energy_error_linear = Some(err);
                            }
                            Ok((f, err)) => {
                                row.fidelity_log = Some(f);
                                row.energy_error_log = Some(err);
                            }
                            Err(e) => errors.push(format!("{mode}: {e}")),
                        }
                    }
                }
                Err(e) => errors.push(format!("encode: {e}")),
            }
            if j == 0 && opts.run_vqe {
                let estimators = std::iter::once(Estimator::Exact)
                    .chain(opts.shot_budgets.iter().map(|&shots| Estimator::Sampled { shots }));
                for estimator in estimators {
                    for &start in &opts.start_modes {
                        let v = VqeOptions {
                            restarts: opts.restarts,
                            seed: opts.seed,
                            estimator,
                            start,
                            exec: opts.exec,
                            ..Default::default()
                        };
                        match optimize(&c, p, &v) {
                            Ok(r) => row.vqe.push(r),
                            Err(e) => errors.push(format!("vqe: {e}")),
                        }
                    }
                }
            }
            if !errors.is_empty() {
                row.error = Some(errors.join("; "));
            }
            row
        });
        sectors.push(SectorReport { config: c, rows });
    }
    Ok(BenchmarkReport { params: *p, sectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_params;

    fn n7() -> (ModelParams, SectorConfig) {
        (make_params(7, 0.75, 0.5).unwrap(), SectorConfig::new(3, 1, 0).unwrap())
    }

    #[test]
    fn objective_is_4pi_periodic() {
        let (p, c) = n7();
        let a = AngleSet::new(vec![0.3, 1.9, -2.2], DepthMode::Log).unwrap();
        let b = AngleSet::new(vec![0.3 + FOUR_PI, 1.9, -2.2 - FOUR_PI], DepthMode::Log).unwrap();
        let ea = objective(&a, &c, &p, Estimator::Exact, 0).unwrap();
        let eb = objective(&b, &c, &p, Estimator::Exact, 0).unwrap();
        assert!((ea - eb).abs() < 1e-12);
    }

    #[test]
    fn wrong_angle_count() {
        let (p, c) = n7();
        let a = AngleSet::new(vec![0.3], DepthMode::Linear).unwrap();
        assert!(objective(&a, &c, &p, Estimator::Exact, 0).is_err());
    }

    #[test]
    fn warm_start_is_essentially_exact() {
        let (p, c) = n7();
        let opts = VqeOptions { restarts: 2, start: StartMode::Warm, ..Default::default() };
        let r = optimize(&c, &p, &opts).unwrap();
        assert!(r.abs_error < 1e-10, "{}", r.abs_error);
        assert!(r.converged);
    }

    #[test]
    fn cold_start_reaches_ground() {
        let (p, c) = n7();
        let r = optimize(&c, &p, &VqeOptions { seed: 11, ..Default::default() }).unwrap();
        assert!(r.abs_error < 1e-6, "{}", r.abs_error);
        assert!((r.exact_energy + 3.34051529181).abs() < 1e-10);
        assert!(r.best_thetas.thetas.iter().all(|t| (0.0..FOUR_PI).contains(t)));
    }

    #[test]
    fn deterministic_across_execution_paths() {
        let (p, c) = n7();
        let a = optimize(&c, &p, &VqeOptions { restarts: 3, seed: 4, exec: Exec::Sequential, ..Default::default() }).unwrap();
        let b = optimize(&c, &p, &VqeOptions { restarts: 3, seed: 4, exec: Exec::Parallel, ..Default::default() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_pair_sector() {
        let p = make_params(2, 0.75, 0.0).unwrap();
        let c = SectorConfig::new(1, 0, 0).unwrap();
        let r = optimize(&c, &p, &VqeOptions { restarts: 3, seed: 1, ..Default::default() }).unwrap();
        let exact = -(1.0f64 + 0.75 * 0.75 / 4.0).sqrt();
        assert!((r.exact_energy - exact).abs() < 1e-12);
        assert!(r.abs_error < 1e-8);
    }

    #[test]
    fn sampled_run_is_reproducible() {
        let (p, c) = n7();
        let opts = VqeOptions {
            restarts: 2,
            seed: 3,
            estimator: Estimator::Sampled { shots: 10_000 },
            start: StartMode::Warm,
            max_evals: 200,
            ..Default::default()
        };
        let a = optimize(&c, &p, &opts).unwrap();
        let b = optimize(&c, &p, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.stderr > 0.0);
    }

    #[test]
    fn small_benchmark() {
        let p = make_params(3, 1.0, 0.5).unwrap();
        let opts = BenchmarkOptions { restarts: 2, start_modes: vec![StartMode::Warm], ..Default::default() };
        let rep = benchmark(&p, &opts).unwrap();
        assert_eq!(rep.sectors.iter().map(|s| s.rows.len()).sum::<usize>(), 4);
        for s in &rep.sectors {
            for row in &s.rows {
                assert!(row.error.is_none(), "{:?}", row.error);
                assert!(row.fidelity_linear.unwrap() > 1.0 - 1e-10);
                assert!(row.fidelity_log.unwrap() > 1.0 - 1e-10);
                assert!((row.omega_bethe.unwrap() - row.omega_exact).abs() < 1e-8);
            }
            assert_eq!(s.rows[0].vqe.len(), 1);
        }
    }
}
