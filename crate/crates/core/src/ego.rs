//! Eigenstates from pairons.
//!
//! Each pairon `E` contributes one factor `a+^2/(E+eta) + b+^2/(E-eta)`;
//! applying all `M` factors to the fiducial state `|nu_a, nu_b>` gives an
//! unnormalized eigenstate.

use crate::bethe::{SpectralSolution, POLE_GUARD};
use crate::error::{Error, Result};
use crate::model::{FockVector, ModelParams, SectorConfig};

/// Applies one creation factor; the result holds two more quanta.
pub fn apply_ego_factor(psi: &FockVector, e: f64, eta: f64) -> Result<FockVector> {
    if !e.is_finite() || (e + eta).abs() < POLE_GUARD || (e - eta).abs() < POLE_GUARD {
        return Err(Error::Singularity(format!(
            "pairon {e} is within {POLE_GUARD:e} of a pole at +-{}",
            eta.abs()
        )));
    }
    let inv_plus = 1.0 / (e + eta);
    let inv_minus = 1.0 / (e - eta);
    let mut out = vec![0.0; psi.len() + 1];
    for (k, &c) in psi.amps().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let (na, nb) = psi.occupations(k);
        let (na, nb) = (na as f64, nb as f64);
        // a+^2 keeps the ladder index, b+^2 advances it
        out[k] += c * ((na + 1.0) * (na + 2.0)).sqrt() * inv_plus;
        out[k + 1] += c * ((nb + 1.0) * (nb + 2.0)).sqrt() * inv_minus;
    }
    FockVector::new(psi.n() + 2, psi.parity(), out)
}

/// Normalized product of factors over `energies` (applied in ascending
/// order) acting on `|nu_a, nu_b>`, together with the natural log of the
/// norm the raw product would have had.
pub fn ego_product(energies: &[f64], eta: f64, nu_a: u8, nu_b: u8) -> Result<(FockVector, f64)> {
    let mut sorted = energies.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut psi = FockVector::from_occupations(nu_a as usize, nu_b as usize)?;
    let mut log_norm = 0.0;
    for e in sorted {
        psi = apply_ego_factor(&psi, e, eta)?;
        let nrm = psi.norm();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::NumericFailure(format!("factor E={e} produced a degenerate vector")));
        }
        log_norm += nrm.ln();
        psi = psi.scaled(1.0 / nrm);
    }
    Ok((psi, log_norm))
}

/// Normalized eigenstate of a solution set. The global sign is the one
/// produced by the factor product itself.
pub fn build_eigenstate(sol: &SpectralSolution) -> Result<FockVector> {
    let eta = sol.params.require_eta()?;
    let (psi, _) = ego_product(&sol.energies, eta, sol.config.nu_a, sol.config.nu_b)?;
    Ok(psi)
}

/// Adds pairon `e_next` to an `M`-pair state of the `W = 0`, `nu_a = nu_b`
/// family using the closed-form ladder weights, returning the normalized
/// `(M+1)`-pair state. `c` is the target sector and must hold `p.n()`
/// particles; `psi_m` may be unnormalized.
pub fn extend_state(psi_m: &FockVector, e_next: f64, c: &SectorConfig, p: &ModelParams) -> Result<FockVector> {
    if c.nu_a != c.nu_b || p.w() != 0.0 {
        return Err(Error::UnsupportedRegime(
            "closed-form extension needs nu_a = nu_b and W = 0".into(),
        ));
    }
    if p.v() == 0.0 {
        return Err(Error::UnsupportedRegime("V = 0 has no finite eta".into()));
    }
    if c.n() != p.n() || c.m == 0 {
        return Err(Error::invalid(format!("target sector {c} does not fit N={}", p.n())));
    }
    let m = c.m - 1;
    let nu = c.nu_a as usize;
    if psi_m.n() != 2 * m + 2 * nu || psi_m.parity() != c.nu_b {
        return Err(Error::invalid("input state is not the M-pair state of the target sector"));
    }
    if !e_next.is_finite() || (e_next - 1.0).abs() < POLE_GUARD || (e_next + 1.0).abs() < POLE_GUARD {
        return Err(Error::Singularity(format!("pairon {e_next} sits on a pole at +-1")));
    }
    let w = |j: usize, i: usize| (2 * m + nu + i - 2 * j) as f64;
    let x = |j: usize, i: usize| (nu + 2 * j + i) as f64;
    let d = psi_m.amps();
    let em = e_next - 1.0;
    let ep = e_next + 1.0;

    let mut gamma = 0.0;
    for (j, dj) in d.iter().enumerate() {
        gamma += dj * dj * (w(j, 1) * w(j, 2) / (em * em) + x(j, 1) * x(j, 2) / (ep * ep));
    }
    for n in 0..m {
        // w(n, -1) w(n, 0) x(n, 1) x(n, 2)
        let ladder = (w(n, 0) - 1.0) * w(n, 0) * x(n, 1) * x(n, 2);
        gamma += 2.0 * d[n] * d[n + 1] * ladder.sqrt() / (e_next * e_next - 1.0);
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::NumericFailure(format!("normalization {gamma} is not positive")));
    }
    let scale = gamma.sqrt().recip();
    let mut out = vec![0.0; m + 2];
    for (j, dj) in d.iter().enumerate() {
        out[j] += dj * (w(j, 1) * w(j, 2)).sqrt() / em * scale;
        out[j + 1] += dj * (x(j, 1) * x(j, 2)).sqrt() / ep * scale;
    }
    FockVector::new(p.n(), c.nu_b, out)
}
