//! Bethe equations for the LMG model: residuals, the eigenvalue formula,
//! closed forms for one and two pairs, and a numerical solver.
//!
//! The solver works in the angle variable `phi` with `E = cot(phi)`, which
//! keeps pairons that pass through infinity on a compact track. Each of the
//! `M + 1` solutions of a sector is followed from weak coupling, where the
//! pairons cluster around `+eta` and `-eta` at Laguerre-zero offsets, up to
//! the requested coupling. Tracks that fail are replaced by Newton starts
//! from polynomial roots of the matching exact eigenvector, then a grid of
//! starts between the poles, then seeded random starts. Every accepted set
//! is checked against exact diagonalization of the same sector.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{sector_spectrum, FockVector, ModelParams, Regime, SectorConfig};

/// Minimum distance between a pairon and a pole, or between two pairons.
pub const POLE_GUARD: f64 = 1e-8;
/// Relative componentwise tolerance for treating two sets as the same.
pub const DEDUP_TOL: f64 = 1e-6;

const BATCH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Accept a set when `max |R_l| <= tol`.
    pub tol: f64,
    /// Allowed gap between a Bethe eigenvalue and its exact counterpart.
    pub match_tol: f64,
    /// Start attempts per sector; `None` means `50 (M + 1)`.
    pub budget: Option<usize>,
    pub seed: u64,
    /// Permit `V^2 < W^2`, where real pairons are not guaranteed.
    pub allow_hyperbolic: bool,
    pub exec: Exec,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            match_tol: 1e-8,
            budget: None,
            seed: 0,
            allow_hyperbolic: false,
            exec: Exec::default(),
        }
    }
}

impl SolverOptions {
    pub fn budget_for(&self, m: usize) -> usize {
        self.budget.unwrap_or(50 * (m + 1))
    }
}

/// One solution set of a sector with its eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSolution {
    pub config: SectorConfig,
    pub params: ModelParams,
    /// Sorted ascending.
    pub energies: Vec<f64>,
    pub omega: f64,
    pub residual_norm: f64,
    /// 1-based rank by `omega` within the sector.
    pub index: usize,
}

#[derive(Clone, Copy, Debug)]
struct Consts {
    n: f64,
    v: f64,
    w: f64,
    g: f64,
    eta: f64,
    s: f64,
    nu_a: f64,
    nu_b: f64,
}

impl Consts {
    fn new(c: &SectorConfig, p: &ModelParams) -> Result<Self> {
        if c.n() != p.n() {
            return Err(Error::invalid(format!(
                "sector {c} holds {} particles, params have N={}",
                c.n(),
                p.n()
            )));
        }
        let eta = p.require_eta()?;
        Ok(Consts {
            n: p.n() as f64,
            v: p.v(),
            w: p.w(),
            g: p.g(),
            eta,
            s: p.s() as f64,
            nu_a: c.nu_a as f64,
            nu_b: c.nu_b as f64,
        })
    }

    /// `1 + nu_a + nu_b`
    fn a(&self) -> f64 {
        1.0 + self.nu_a + self.nu_b
    }

    /// `nu_a - nu_b`
    fn b(&self) -> f64 {
        self.nu_a - self.nu_b
    }

    fn scaled(&self, lambda: f64) -> Self {
        Consts {
            v: self.v * lambda,
            w: self.w * lambda,
            g: self.g * lambda,
            ..*self
        }
    }
}

fn check_poles(e: &[f64], eta: f64) -> Result<()> {
    for (l, &x) in e.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::Singularity(format!("E_{} is not finite", l + 1)));
        }
        if (x - eta).abs() < POLE_GUARD || (x + eta).abs() < POLE_GUARD {
            return Err(Error::Singularity(format!(
                "E_{} = {x} is within {POLE_GUARD:e} of a pole at +-{}",
                l + 1,
                eta.abs()
            )));
        }
    }
    for l in 0..e.len() {
        for n in l + 1..e.len() {
            if (e[l] - e[n]).abs() < POLE_GUARD {
                return Err(Error::Singularity(format!(
                    "E_{} and E_{} coincide ({} vs {})",
                    l + 1,
                    n + 1,
                    e[l],
                    e[n]
                )));
            }
        }
    }
    Ok(())
}

/// Bethe residuals `R_l(E)`, one per pairon.
pub fn residual(e: &[f64], c: &SectorConfig, p: &ModelParams) -> Result<Vec<f64>> {
    let k = Consts::new(c, p)?;
    if e.len() != c.m {
        return Err(Error::invalid(format!(
            "sector {c} needs {} pairons, got {}",
            c.m,
            e.len()
        )));
    }
    check_poles(e, k.eta)?;
    Ok(residual_unchecked(&k, e))
}

fn residual_unchecked(k: &Consts, e: &[f64]) -> Vec<f64> {
    let (a, b) = (k.a(), k.b());
    (0..e.len())
        .map(|l| {
            let x = e[l];
            let mut r = 1.0
                - k.eta / (k.n * (x * x - k.eta * k.eta))
                    * (k.g * k.n * b * (1.0 + k.s * x * x) + 2.0 * k.v * x * a);
            for (n, &y) in e.iter().enumerate() {
                if n != l {
                    r += 2.0 * k.g * (1.0 + k.s * x * y) / (x - y);
                }
            }
            r
        })
        .collect()
}

/// Eigenvalue `omega` attached to a solution set.
pub fn eigenvalue(e: &[f64], c: &SectorConfig, p: &ModelParams) -> Result<f64> {
    let k = Consts::new(c, p)?;
    if e.len() != c.m {
        return Err(Error::invalid(format!(
            "sector {c} needs {} pairons, got {}",
            c.m,
            e.len()
        )));
    }
    check_poles(e, k.eta)?;
    Ok(eigenvalue_unchecked(&k, e))
}

fn fiducial_energy(k: &Consts) -> f64 {
    (k.w * (k.nu_a + k.nu_b + 2.0 * k.nu_a * k.nu_b) + k.n * (k.nu_b - k.nu_a)) / (2.0 * k.n)
}

fn eigenvalue_unchecked(k: &Consts, e: &[f64]) -> f64 {
    let sum: f64 = e
        .iter()
        .map(|&x| {
            (k.g * k.n * k.a() * (1.0 + k.s * x * x) - 2.0 * k.v * (k.nu_b - k.nu_a) * x)
                / (x * x - k.eta * k.eta)
        })
        .sum();
    fiducial_energy(k) - k.eta / k.n * sum
}

fn finish(
    config: SectorConfig,
    params: ModelParams,
    mut sets: Vec<Vec<f64>>,
) -> Result<Vec<SpectralSolution>> {
    let k = Consts::new(&config, &params)?;
    let mut out = Vec::with_capacity(sets.len());
    for e in sets.iter_mut() {
        e.sort_by(f64::total_cmp);
        check_poles(e, k.eta)?;
        let r = residual_unchecked(&k, e);
        out.push(SpectralSolution {
            config,
            params,
            energies: e.clone(),
            omega: eigenvalue_unchecked(&k, e),
            residual_norm: max_abs(&r),
            index: 0,
        });
    }
    out.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    for (i, s) in out.iter_mut().enumerate() {
        s.index = i + 1;
    }
    Ok(out)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// Both solutions of a one-pair sector, from the quadratic obtained by
/// clearing the denominator of its single residual.
pub fn solve_m1(c: &SectorConfig, p: &ModelParams) -> Result<Vec<SpectralSolution>> {
    if c.m != 1 {
        return Err(Error::invalid(format!("solve_m1 needs M=1, sector is {c}")));
    }
    let k = Consts::new(c, p)?;
    let (a, b) = (k.a(), k.b());
    // qa E^2 + qb E + qc = 0
    let qa = k.n * (1.0 - k.eta * k.g * b * k.s);
    let qb = -2.0 * k.v * k.eta * a;
    let qc = -k.n * k.eta * (k.eta + k.g * b);
    if qa.abs() < 1e-14 * (qb.abs() + qc.abs()) {
        return Err(Error::Singularity(format!(
            "one pairon of sector {c} sits at infinity for these parameters"
        )));
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::ComplexPairons(format!(
            "single pairon of sector {c} is complex (discriminant {disc:e})"
        )));
    }
    let sq = disc.sqrt();
    let sgn = if qb >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (qb + sgn * sq);
    let r1 = q / qa;
    let r2 = if q != 0.0 { qc / q } else { -r1 };
    finish(*c, *p, vec![vec![r1], vec![r2]])
}

/// The two-pair solution with `E_1 E_2 = -1` in the `W = 0`, `nu_a = nu_b`
/// sectors, where the equations reduce to a quadratic.
pub fn solve_m2_simplified(c: &SectorConfig, p: &ModelParams) -> Result<SpectralSolution> {
    if c.m != 2 {
        return Err(Error::invalid(format!("needs M=2, sector is {c}")));
    }
    if p.w() != 0.0 || c.nu_a != c.nu_b {
        return Err(Error::UnsupportedRegime(
            "closed form holds only for W=0 and nu_a = nu_b; use solve_bethe".into(),
        ));
    }
    if p.v() == 0.0 {
        return Err(Error::UnsupportedRegime("V=0 has no finite eta".into()));
    }
    let nu = c.nu_a as f64;
    let lin = (1.0 + 2.0 * nu) * p.v();
    let half = 2.0 + nu;
    let root = (lin * lin + 4.0 * half * half).sqrt();
    let e1 = -(lin + root) / (2.0 * half);
    let e2 = -(lin - root) / (2.0 * half);
    let mut v = finish(*c, *p, vec![vec![e1, e2]])?;
    Ok(v.remove(0))
}

/// Residual and Jacobian in the angle variable.
fn phi_residual(k: &Consts, ph: &[f64], jac: Option<&mut DMatrix<f64>>) -> Vec<f64> {
    let m = ph.len();
    let (a, b) = (k.a(), k.b());
    let eta2 = k.eta * k.eta;
    let mut r = vec![0.0; m];
    let mut jm = jac;
    if let Some(j) = jm.as_deref_mut() {
        j.fill(0.0);
    }
    for l in 0..m {
        let (sn, cs) = ph[l].sin_cos();
        let s2 = (2.0 * ph[l]).sin();
        let c2 = (2.0 * ph[l]).cos();
        let pp = k.g * k.n * b * (sn * sn + k.s * cs * cs) + 2.0 * k.v * a * sn * cs;
        let dp = k.g * k.n * b * (1.0 - k.s) * s2 + 2.0 * k.v * a * c2;
        let qq = k.n * (cs * cs - eta2 * sn * sn);
        let dq = -k.n * (1.0 + eta2) * s2;
        r[l] = 1.0 - k.eta * pp / qq;
        let mut diag = -k.eta * (dp * qq - pp * dq) / (qq * qq);
        for n in 0..m {
            if n == l {
                continue;
            }
            let (sm, cm) = ph[n].sin_cos();
            let aa = sn * sm + k.s * cs * cm;
            let bb = (ph[n] - ph[l]).sin();
            let cb = (ph[n] - ph[l]).cos();
            r[l] += 2.0 * k.g * aa / bb;
            if let Some(j) = jm.as_deref_mut() {
                let da_l = cs * sm - k.s * sn * cm;
                let da_n = sn * cm - k.s * cs * sm;
                diag += 2.0 * k.g * (da_l * bb + aa * cb) / (bb * bb);
                j[(l, n)] = 2.0 * k.g * (da_n * bb - aa * cb) / (bb * bb);
            }
        }
        if let Some(j) = jm.as_deref_mut() {
            j[(l, l)] = diag;
        }
    }
    r
}

struct NewtonOut {
    ph: Vec<f64>,
    ok: bool,
}

/// Damped Newton in `phi` with a backtracking line search.
fn newton_phi(k: &Consts, start: &[f64], max_it: usize) -> NewtonOut {
    let m = start.len();
    let mut ph = start.to_vec();
    let mut jac = DMatrix::zeros(m, m);
    let mut r = phi_residual(k, &ph, Some(&mut jac));
    let mut nr = max_abs(&r);
    if !nr.is_finite() {
        return NewtonOut { ph, ok: false };
    }
    for _ in 0..max_it {
        if nr < 1e-13 {
            return NewtonOut { ph, ok: true };
        }
        let rhs = DVector::from_iterator(m, r.iter().map(|x| -x));
        let dx = match jac.clone().lu().solve(&rhs) {
            Some(d) if d.iter().all(|x| x.is_finite()) => d,
            _ => break,
        };
        let mut lam = 1.0;
        let (mut pn, mut rn, mut nn);
        let mut jn = DMatrix::zeros(m, m);
        loop {
            pn = ph.iter().zip(dx.iter()).map(|(p, d)| p + lam * d).collect::<Vec<_>>();
            rn = phi_residual(k, &pn, Some(&mut jn));
            nn = max_abs(&rn);
            if (nn.is_finite() && nn < (1.0 - 0.25 * lam) * nr) || lam < 1e-3 {
                break;
            }
            lam *= 0.5;
        }
        if !nn.is_finite() {
            break;
        }
        let step = lam * dx.amax();
        ph = pn;
        r = rn;
        jac = jn;
        nr = nn;
        if step < 1e-15 {
            break;
        }
    }
    NewtonOut { ph, ok: nr < 1e-9 }
}

/// Zeros of the generalized Laguerre polynomial `L_k^alpha`.
fn laguerre_zeros(k: usize, alpha: f64) -> Option<Vec<f64>> {
    if k == 0 {
        return Some(Vec::new());
    }
    if alpha.is_nan() || alpha <= -1.0 {
        return None;
    }
    let jm = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            2.0 * i as f64 + alpha + 1.0
        } else if i + 1 == j || j + 1 == i {
            let t = i.max(j) as f64;
            (t * (t + alpha)).sqrt()
        } else {
            0.0
        }
    });
    let mut z: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    z.sort_by(f64::total_cmp);
    Some(z)
}

fn pole_angles(eta: f64) -> [f64; 2] {
    [1f64.atan2(eta).rem_euclid(PI), 1f64.atan2(-eta).rem_euclid(PI)]
}

fn circ_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(PI);
    d.min(PI - d)
}

/// For each pairon, the circular distance (period pi) to its nearest
/// neighbour among the other pairons and the two poles.
fn local_gaps(ph: &[f64], eta: f64) -> Vec<f64> {
    let poles = pole_angles(eta);
    (0..ph.len())
        .map(|i| {
            let mut g = poles.iter().fold(PI, |g, &q| g.min(circ_dist(ph[i], q)));
            for (j, &y) in ph.iter().enumerate() {
                if j != i {
                    g = g.min(circ_dist(ph[i], y));
                }
            }
            g
        })
        .collect()
}

/// Follows the weak-coupling cluster with `k` pairons near `+eta` up to
/// full coupling.
fn track(kf: &Consts, m: usize, k: usize) -> Option<Vec<f64>> {
    let (a, b) = (kf.a(), kf.b());
    let eta = kf.eta;
    let d = 2.0 * kf.g * (1.0 + kf.s * eta * eta);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let base = kf.g * kf.n * b * (1.0 + kf.s * eta * eta);
    let kp = (base + 2.0 * kf.v * eta * a) / (2.0 * kf.n);
    let km = -(base - 2.0 * kf.v * eta * a) / (2.0 * kf.n);
    let up: Vec<f64> = laguerre_zeros(k, -2.0 * kp / d - 1.0)?
        .into_iter()
        .map(|x| -d / 2.0 * x)
        .collect();
    let um: Vec<f64> = laguerre_zeros(m - k, -2.0 * km / d - 1.0)?
        .into_iter()
        .map(|x| -d / 2.0 * x)
        .collect();
    let spread = up.iter().chain(&um).fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
    let mut lam = 1e-3f64.min(0.02 * eta.abs() / spread).min(0.02 / (eta.abs() * spread));

    let mut ph = Vec::new();
    let mut seeded = false;
    for _ in 0..20 {
        let start: Vec<f64> = up
            .iter()
            .map(|u| eta + lam * u)
            .chain(um.iter().map(|u| -eta + lam * u))
            .map(|e| 1f64.atan2(e))
            .collect();
        let out = newton_phi(&kf.scaled(lam), &start, 30);
        if out.ok {
            ph = out.ph;
            seeded = true;
            break;
        }
        lam /= 4.0;
    }
    if !seeded {
        return None;
    }

    let mut h = 1.0f64;
    let mut prev: Option<(Vec<f64>, f64)> = None;
    let mut steps = 0usize;
    while lam < 1.0 {
        steps += 1;
        if steps > 200_000 {
            return None;
        }
        let ln = if lam < 0.25 { (lam * (1.0 + h)).min(1.0) } else { (lam + 0.25 * h).min(1.0) };
        let pred: Vec<f64> = match &prev {
            None => ph.clone(),
            Some((pp, lp)) => ph
                .iter()
                .zip(pp)
                .map(|(x, y)| x + (x - y) * (ln - lam) / (lam - lp))
                .collect(),
        };
        let out = newton_phi(&kf.scaled(ln), &pred, 10);
        let gaps = local_gaps(&ph, eta);
        let within = (0..m).all(|i| {
            (out.ph[i] - pred[i]).abs() < 0.1 * gaps[i] && (out.ph[i] - ph[i]).abs() < 0.5 * gaps[i]
        });
        if out.ok && within {
            prev = Some((std::mem::replace(&mut ph, out.ph), lam));
            lam = ln;
            h = (h * 1.5).min(1.0);
        } else {
            h *= 0.5;
            if h < 1e-8 {
                return None;
            }
        }
    }
    Some(ph)
}

fn phi_to_energies(ph: &[f64]) -> Option<Vec<f64>> {
    let e: Vec<f64> = ph
        .iter()
        .map(|x| {
            let (s, c) = x.sin_cos();
            c / s
        })
        .collect();
    e.iter().all(|x| x.is_finite()).then_some(e)
}

/// Polishes `start` at full coupling; returns sorted energies on success.
fn polish(k: &Consts, start: &[f64], tol: f64, max_it: usize) -> Option<Vec<f64>> {
    let out = newton_phi(k, start, max_it);
    if !out.ok {
        return None;
    }
    let mut e = phi_to_energies(&out.ph)?;
    e.sort_by(f64::total_cmp);
    check_poles(&e, k.eta).ok()?;
    (max_abs(&residual_unchecked(k, &e)) <= tol).then_some(e)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Pairons encoded in an eigenvector: roots of the polynomial whose
/// coefficients are the amplitudes with the ladder factorials divided out.
/// Roots may be complex.
pub fn pairons_from_state(psi: &FockVector, c: &SectorConfig, p: &ModelParams) -> Result<Vec<Complex64>> {
    let eta = p.require_eta()?;
    if psi.n() != c.n() || psi.parity() != c.parity() {
        return Err(Error::invalid("state is not in the requested sector"));
    }
    let m = c.m;
    if m == 0 {
        return Ok(Vec::new());
    }
    let (na, nb) = (c.nu_a as usize, c.nu_b as usize);
    let lf_na = ln_factorial(na);
    let lf_nb = ln_factorial(nb);
    let coef: Vec<f64> = (0..=m)
        .map(|k| {
            let ln_w = 0.5 * (ln_factorial(na + 2 * (m - k)) - lf_na + ln_factorial(nb + 2 * k) - lf_nb);
            psi.amps()[k] * (-ln_w).exp()
        })
        .collect();
    let lead = coef[m];
    if lead == 0.0 || coef[0] == 0.0 {
        return Err(Error::Singularity("eigenvector places a pairon on a pole".into()));
    }
    let comp = DMatrix::from_fn(m, m, |i, j| {
        if i == 0 {
            -coef[m - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eta_c = Complex64::new(eta, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok(comp
        .complex_eigenvalues()
        .iter()
        .map(|t| eta_c * (one - t) / (one + t))
        .collect())
}

fn same_set(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= DEDUP_TOL * x.abs().max(y.abs()).max(1.0))
}

enum Start {
    Track(usize),
    Roots(Vec<f64>),
    Phi(Vec<f64>),
}

/// All `M + 1` solution sets of a sector, sorted by eigenvalue and checked
/// against exact diagonalization.
pub fn solve_bethe(c: &SectorConfig, p: &ModelParams, opts: &SolverOptions) -> Result<Vec<SpectralSolution>> {
    let k = Consts::new(c, p)?;
    if p.regime() == Regime::Hyperbolic && !opts.allow_hyperbolic {
        return Err(Error::UnsupportedRegime(
            "V^2 < W^2 needs allow_hyperbolic; real pairons are not guaranteed there".into(),
        ));
    }
    let m = c.m;
    let exact: Vec<f64> = sector_spectrum(p, *c)?.iter().map(|e| e.omega).collect();
    let exact_states = sector_spectrum(p, *c)?;
    let budget = opts.budget_for(m).max(m + 1);

    let mut found: Vec<Option<Vec<f64>>> = vec![None; m + 1];
    let mut complex_hint: Option<String> = None;

    let accept = |e: Vec<f64>, found: &mut Vec<Option<Vec<f64>>>| {
        let om = eigenvalue_unchecked(&k, &e);
        // nearest exact level
        let (j, d) = exact
            .iter()
            .enumerate()
            .map(|(j, x)| (j, (x - om).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("sector has at least one level");
        if d <= opts.match_tol && found[j].is_none() && !found.iter().flatten().any(|f| same_set(f, &e)) {
            found[j] = Some(e);
        }
    };

    if m == 0 {
        accept(Vec::new(), &mut found);
    } else {
        let mut attempt = 0usize;
        let mut rng_counter = 0u64;
        let mut queue: Vec<Start> = (0..=m).map(Start::Track).collect();
        let mut roots_done = false;
        let mut grid_done = false;
        while attempt < budget && found.iter().any(Option::is_none) {
            if queue.is_empty() {
                if !roots_done {
                    roots_done = true;
                    for (j, st) in exact_states.iter().enumerate() {
                        if found[j].is_some() {
                            continue;
                        }
                        match pairons_from_state(&st.state, c, p) {
                            Ok(r) => {
                                let scale = r.iter().fold(1.0f64, |s, z| s.max(z.norm()));
                                if r.iter().any(|z| z.im.abs() > 1e-6 * scale) {
                                    complex_hint.get_or_insert_with(|| {
                                        format!("level {} of sector {c} has non-real pairons", j + 1)
                                    });
                                } else {
                                    queue.push(Start::Roots(r.iter().map(|z| z.re).collect()));
                                }
                            }
                            Err(_) => continue,
                        }
                    }
                    continue;
                }
                if !grid_done {
                    grid_done = true;
                    queue.extend(grid_starts(k.eta, m).into_iter().map(Start::Phi));
                    continue;
                }
                let room = (budget - attempt).min(BATCH);
                for _ in 0..room {
                    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ rng_counter.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                    rng_counter += 1;
                    queue.push(Start::Phi((0..m).map(|_| rng.gen_range(0.0..PI)).collect()));
                }
            }
            let take = queue.len().min(BATCH).min(budget - attempt);
            let batch: Vec<Start> = queue.drain(..take).collect();
            attempt += take;
            let results = opts.exec.map_slice(&batch, |s| match s {
                Start::Track(kk) => track(&k, m, *kk).and_then(|ph| polish(&k, &ph, opts.tol, 60)),
                Start::Roots(e) => {
                    let ph: Vec<f64> = e.iter().map(|x| 1f64.atan2(*x)).collect();
                    polish(&k, &ph, opts.tol, 100)
                }
                Start::Phi(ph) => polish(&k, ph, opts.tol, 100),
            });
            for e in results.into_iter().flatten() {
                accept(e, &mut found);
            }
        }
    }

    let got = found.iter().filter(|f| f.is_some()).count();
    if got < m + 1 {
        // Ill-conditioned root polynomials can fake complex pairs, so the
        // hint only counts where real pairons are not guaranteed.
        if let (Some(msg), Regime::Hyperbolic) = (complex_hint, p.regime()) {
            return Err(Error::ComplexPairons(msg));
        }
        return Err(Error::IncompleteSolve {
            sector: c.to_string(),
            found: got,
            expected: m + 1,
        });
    }
    finish(*c, *p, found.into_iter().flatten().collect())
}

/// `k` pairons spread over one pole-to-pole arc and `M - k` over the other.
fn grid_starts(eta: f64, m: usize) -> Vec<Vec<f64>> {
    let [p1, p2] = pole_angles(eta);
    let (lo, hi) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
    let inner = hi - lo;
    let outer = PI - inner;
    (0..=m)
        .map(|k| {
            let mut v: Vec<f64> = (0..k).map(|i| lo + inner * (i as f64 + 0.5) / k as f64).collect();
            v.extend((0..m - k).map(|i| hi + outer * (i as f64 + 0.5) / (m - k) as f64));
            v
        })
        .collect()
}

/// Solves every sector of `p`; the union holds all `N + 1` levels.
pub fn solve_all(p: &ModelParams, opts: &SolverOptions) -> Result<Vec<SpectralSolution>> {
    let mut all = Vec::new();
    for c in crate::model::sector_configs(p.n()) {
        all.extend(solve_bethe(&c, p, opts)?);
    }
    Ok(all)
}
