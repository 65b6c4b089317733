//! Physical parameters, two-mode Fock vectors, the bosonic LMG Hamiltonian
//! and an exact-diagonalization reference.
//!
//! Energies are in units of the single-particle gap, which is fixed to 1.
//! The Hamiltonian conserves the parity of `n_b`, so every operator here
//! works on one parity block at a time. Within a block the basis is the
//! ladder `|N - p - 2k, p + 2k>` for `k = 0..=M`, where `p` is the parity.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when a caller promises a normalized vector.
pub const NORM_TOL: f64 = 1e-12;

/// Sign class of `V^2 - W^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `V^2 > W^2`, all pairons real.
    Trigonometric,
    /// `V^2 < W^2`.
    Hyperbolic,
    /// `V^2 = W^2`; the Bethe path is not available.
    Rational,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Trigonometric => "trigonometric",
            Regime::Hyperbolic => "hyperbolic",
            Regime::Rational => "rational",
        };
        f.write_str(s)
    }
}

/// A physical instance: particle count `N` and interactions `V`, `W`,
/// plus the derived Bethe constants.
///
/// `g` carries the sign of `V - W`. With that sign the Bethe equations hold
/// in every non-rational regime; its magnitude is `sqrt((V^2-W^2)/(s N^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    n: usize,
    v: f64,
    w: f64,
    g: f64,
    eta: Option<f64>,
    s: i8,
    regime: Regime,
}

/// Builds a [`ModelParams`], deriving `s`, `g` and `eta`.
pub fn make_params(n: usize, v: f64, w: f64) -> Result<ModelParams> {
    if n < 1 {
        return Err(Error::invalid("particle count N must be at least 1"));
    }
    if !v.is_finite() || !w.is_finite() {
        return Err(Error::invalid("interaction strengths must be finite"));
    }
    let diff = v * v - w * w;
    if diff == 0.0 {
        return Ok(ModelParams {
            n,
            v,
            w,
            g: 0.0,
            eta: None,
            s: 0,
            regime: Regime::Rational,
        });
    }
    let (s, regime) = if diff > 0.0 {
        (1i8, Regime::Trigonometric)
    } else {
        (-1i8, Regime::Hyperbolic)
    };
    let sf = s as f64;
    let eta = -((v + w) / (sf * (v - w))).sqrt();
    let g = -eta * (v - w) / n as f64;
    if !eta.is_finite() || !g.is_finite() || eta == 0.0 {
        return Err(Error::NumericFailure(format!(
            "derived constants not finite for V={v}, W={w}"
        )));
    }
    Ok(ModelParams {
        n,
        v,
        w,
        g,
        eta: Some(eta),
        s,
        regime,
    })
}

impl ModelParams {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    /// `None` in the rational regime.
    pub fn eta(&self) -> Option<f64> {
        self.eta
    }
    pub fn s(&self) -> i8 {
        self.s
    }
    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn gap(&self) -> f64 {
        1.0
    }
    pub fn is_rational(&self) -> bool {
        self.regime == Regime::Rational
    }

    pub(crate) fn require_eta(&self) -> Result<f64> {
        self.eta.ok_or_else(|| {
            Error::UnsupportedRegime(format!(
                "V^2 = W^2 (V={}, W={}) has no finite eta",
                self.v, self.w
            ))
        })
    }
}

/// Sector label `(M, nu_a, nu_b)` with `N = 2M + nu_a + nu_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorConfig {
    pub m: usize,
    pub nu_a: u8,
    pub nu_b: u8,
}

impl SectorConfig {
    pub fn new(m: usize, nu_a: u8, nu_b: u8) -> Result<Self> {
        if nu_a > 1 || nu_b > 1 {
            return Err(Error::invalid("fiducial occupations must be 0 or 1"));
        }
        Ok(SectorConfig { m, nu_a, nu_b })
    }

    /// The unique sector of `n` particles whose support has `n_b` parity `parity`.
    pub fn for_parity(n: usize, parity: u8) -> Result<Self> {
        if parity > 1 {
            return Err(Error::invalid("parity must be 0 or 1"));
        }
        if n < parity as usize {
            return Err(Error::invalid(format!("N={n} has no odd-n_b states")));
        }
        let nu_b = parity;
        let nu_a = ((n - nu_b as usize) % 2) as u8;
        let m = (n - nu_a as usize - nu_b as usize) / 2;
        Ok(SectorConfig { m, nu_a, nu_b })
    }

    /// The sector of `n` particles with the given fiducial occupations.
    pub fn for_fiducial(n: usize, nu_a: u8, nu_b: u8) -> Result<Self> {
        let c = SectorConfig::for_parity(n, nu_b)?;
        if c.nu_a != nu_a {
            return Err(Error::invalid(format!(
                "fiducial ({nu_a},{nu_b}) is incompatible with N={n}"
            )));
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        2 * self.m + self.nu_a as usize + self.nu_b as usize
    }

    pub fn parity(&self) -> u8 {
        self.nu_b
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    /// `(n_a, n_b)` of the `k`-th support state.
    pub fn occupations(&self, k: usize) -> (usize, usize) {
        let nb = self.nu_b as usize + 2 * k;
        (self.n() - nb, nb)
    }
}

impl fmt::Display for SectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.nu_a, self.nu_b)
    }
}

/// Parses `"nu_a,nu_b"` or `"M,nu_a,nu_b"` (parentheses optional).
/// The two-field form needs `N` to fill in `M`, so use [`parse_sector`].
impl FromStr for SectorConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = split_fields(s)?;
        match fields.as_slice() {
            [m, a, b] => SectorConfig::new(*m, to_bit(*a)?, to_bit(*b)?),
            _ => Err(Error::invalid(format!(
                "expected sector as M,nu_a,nu_b, got '{s}'"
            ))),
        }
    }
}

/// Parses a sector for `n` particles from `"nu_a,nu_b"` or `"M,nu_a,nu_b"`.
pub fn parse_sector(n: usize, s: &str) -> Result<SectorConfig> {
    let fields = split_fields(s)?;
    let c = match fields.as_slice() {
        [a, b] => SectorConfig::for_fiducial(n, to_bit(*a)?, to_bit(*b)?)?,
        [_, _, _] => s.parse::<SectorConfig>()?,
        _ => return Err(Error::invalid(format!("cannot parse sector '{s}'"))),
    };
    if c.n() != n {
        return Err(Error::invalid(format!("sector {c} does not hold N={n} particles")));
    }
    Ok(c)
}

fn split_fields(s: &str) -> Result<Vec<usize>> {
    s.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad sector field '{t}'")))
        })
        .collect()
}

fn to_bit(x: usize) -> Result<u8> {
    match x {
        0 | 1 => Ok(x as u8),
        _ => Err(Error::invalid("fiducial occupations must be 0 or 1")),
    }
}

/// Every sector of `n` particles: two for `n >= 1`, giving `n + 1` states in total.
pub fn sector_configs(n: usize) -> Vec<SectorConfig> {
    if n == 0 {
        return vec![SectorConfig { m: 0, nu_a: 0, nu_b: 0 }];
    }
    if n.is_multiple_of(2) {
        vec![
            SectorConfig { m: n / 2, nu_a: 0, nu_b: 0 },
            SectorConfig { m: n / 2 - 1, nu_a: 1, nu_b: 1 },
        ]
    } else {
        vec![
            SectorConfig { m: (n - 1) / 2, nu_a: 0, nu_b: 1 },
            SectorConfig { m: (n - 1) / 2, nu_a: 1, nu_b: 0 },
        ]
    }
}

/// Real amplitudes over one parity block of the two-mode Fock space.
///
/// `amps[k]` is the coefficient of `|N - parity - 2k, parity + 2k>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    n: usize,
    parity: u8,
    amps: Vec<f64>,
}

impl FockVector {
    pub fn new(n: usize, parity: u8, amps: Vec<f64>) -> Result<Self> {
        let len = Self::support_len(n, parity)?;
        if amps.len() != len {
            return Err(Error::invalid(format!(
                "N={n}, parity {parity} needs {len} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(FockVector { n, parity, amps })
    }

    pub fn zeros(n: usize, parity: u8) -> Result<Self> {
        let len = Self::support_len(n, parity)?;
        Ok(FockVector { n, parity, amps: vec![0.0; len] })
    }

    /// The `k`-th ladder state.
    pub fn basis(n: usize, parity: u8, k: usize) -> Result<Self> {
        let mut v = Self::zeros(n, parity)?;
        if k >= v.amps.len() {
            return Err(Error::invalid(format!("ladder index {k} out of range")));
        }
        v.amps[k] = 1.0;
        Ok(v)
    }

    /// `|n_a, n_b>` as a vector.
    pub fn from_occupations(n_a: usize, n_b: usize) -> Result<Self> {
        let parity = (n_b % 2) as u8;
        Self::basis(n_a + n_b, parity, n_b / 2)
    }

    pub fn support_len(n: usize, parity: u8) -> Result<usize> {
        if parity > 1 || n < parity as usize {
            return Err(Error::invalid(format!("no parity-{parity} block for N={n}")));
        }
        Ok((n - parity as usize) / 2 + 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn parity(&self) -> u8 {
        self.parity
    }
    pub fn amps(&self) -> &[f64] {
        &self.amps
    }
    pub fn into_amps(self) -> Vec<f64> {
        self.amps
    }
    pub fn len(&self) -> usize {
        self.amps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn config(&self) -> SectorConfig {
        SectorConfig::for_parity(self.n, self.parity).expect("validated at construction")
    }

    pub fn occupations(&self, k: usize) -> (usize, usize) {
        let nb = self.parity as usize + 2 * k;
        (self.n - nb, nb)
    }

    /// Amplitude on `|n_a, n_b>`, zero if that state is outside this block.
    pub fn amplitude(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a + n_b != self.n || n_b % 2 != self.parity as usize {
            return 0.0;
        }
        self.amps[n_b / 2]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.amps.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let nrm = self.norm();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::NumericFailure("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(self.scaled(1.0 / nrm))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        FockVector {
            n: self.n,
            parity: self.parity,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Inner product; zero when the two vectors live in different blocks.
    pub fn dot(&self, other: &FockVector) -> f64 {
        if self.n != other.n || self.parity != other.parity {
            return 0.0;
        }
        self.amps.iter().zip(&other.amps).map(|(a, b)| a * b).sum()
    }

    /// Flips the global sign so the largest-magnitude amplitude is positive.
    pub fn with_positive_peak(mut self) -> Self {
        let peak = self
            .amps
            .iter()
            .copied()
            .fold(0.0f64, |best, a| if a.abs() > best.abs() { a } else { best });
        if peak < 0.0 {
            self.amps.iter_mut().for_each(|a| *a = -*a);
        }
        self
    }
}

/// Diagonal element of `H` on `|n_a, n_b>`.
pub fn diagonal_element(p: &ModelParams, n_a: usize, n_b: usize) -> f64 {
    let (a, b) = (n_a as f64, n_b as f64);
    let n = p.n as f64;
    (b - a) / 2.0 + (p.w / n) * ((a + b) / 2.0 + a * b)
}

/// Coupling between `|n_a, n_b>` and `|n_a - 2, n_b + 2>`.
pub fn pair_coupling(p: &ModelParams, n_a: usize, n_b: usize) -> f64 {
    if n_a < 2 {
        return 0.0;
    }
    let (a, b) = (n_a as f64, n_b as f64);
    p.v / (2.0 * p.n as f64) * (a * (a - 1.0) * (b + 1.0) * (b + 2.0)).sqrt()
}

/// One parity block of `H` as a symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalBlock {
    pub config: SectorConfig,
    pub diag: Vec<f64>,
    /// `off[k]` couples ladder states `k` and `k + 1`.
    pub off: Vec<f64>,
}

impl TridiagonalBlock {
    pub fn new(p: &ModelParams, config: SectorConfig) -> Result<Self> {
        if config.n() != p.n {
            return Err(Error::invalid(format!(
                "sector {config} holds {} particles, params have N={}",
                config.n(),
                p.n
            )));
        }
        let dim = config.dim();
        let mut diag = Vec::with_capacity(dim);
        let mut off = Vec::with_capacity(dim.saturating_sub(1));
        for k in 0..dim {
            let (na, nb) = config.occupations(k);
            diag.push(diagonal_element(p, na, nb));
            if k + 1 < dim {
                off.push(pair_coupling(p, na, nb));
            }
        }
        Ok(TridiagonalBlock { config, diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|k| {
                let mut y = self.diag[k] * x[k];
                if k > 0 {
                    y += self.off[k - 1] * x[k - 1];
                }
                if k + 1 < d {
                    y += self.off[k] * x[k + 1];
                }
                y
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                self.diag[i]
            } else if j == i + 1 {
                self.off[i]
            } else if i == j + 1 {
                self.off[j]
            } else {
                0.0
            }
        })
    }

    /// Eigenpairs sorted by energy; vectors have a positive largest component.
    pub fn eigenpairs(&self) -> Vec<(f64, Vec<f64>)> {
        let eig = SymmetricEigen::new(self.to_dense());
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..self.dim())
            .map(|i| {
                let col = eig.eigenvectors.column(i);
                (eig.eigenvalues[i], col.iter().copied().collect())
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }
}

/// `H psi`.
pub fn apply_hamiltonian(psi: &FockVector, p: &ModelParams) -> Result<FockVector> {
    if psi.n != p.n {
        return Err(Error::invalid(format!(
            "vector holds N={} particles, params have N={}",
            psi.n, p.n
        )));
    }
    let block = TridiagonalBlock::new(p, psi.config())?;
    Ok(FockVector {
        n: psi.n,
        parity: psi.parity,
        amps: block.apply(&psi.amps),
    })
}

/// `<psi|H|psi>` for a normalized `psi`.
pub fn expectation(psi: &FockVector, p: &ModelParams) -> Result<f64> {
    if !psi.is_normalized() {
        return Err(Error::invalid(format!(
            "expectation needs a normalized vector (norm {})",
            psi.norm()
        )));
    }
    let h = apply_hamiltonian(psi, p)?;
    Ok(psi.dot(&h))
}

/// One exact eigenpair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigenpair {
    pub omega: f64,
    pub state: FockVector,
}

impl Eigenpair {
    pub fn config(&self) -> SectorConfig {
        self.state.config()
    }
}

/// Eigenpairs of one sector, ascending in energy.
pub fn sector_spectrum(p: &ModelParams, config: SectorConfig) -> Result<Vec<Eigenpair>> {
    let block = TridiagonalBlock::new(p, config)?;
    Ok(block
        .eigenpairs()
        .into_iter()
        .map(|(omega, v)| Eigenpair {
            omega,
            state: FockVector { n: p.n, parity: config.parity(), amps: v }.with_positive_peak(),
        })
        .collect())
}

/// All `N + 1` eigenpairs, ascending in energy.
pub fn exact_spectrum(p: &ModelParams) -> Vec<Eigenpair> {
    let mut all: Vec<Eigenpair> = sector_configs(p.n)
        .into_iter()
        .flat_map(|c| sector_spectrum(p, c).expect("sector built from N"))
        .collect();
    all.sort_by(|a, b| a.omega.total_cmp(&b.omega).then(a.state.parity.cmp(&b.state.parity)));
    all
}
