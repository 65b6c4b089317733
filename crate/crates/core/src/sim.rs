//! State-vector simulation of circuits, fidelity and energy evaluation on
//! the one-hot subspace, and a shot-based energy estimator.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::Serialize;

use crate::circuit::{Circuit, Encoding, GateKind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{diagonal_element, pair_coupling, ModelParams, SectorConfig};

/// Largest register simulated with a full amplitude array.
pub const DENSE_MAX_QUBITS: usize = 20;
/// Largest register addressable by the sparse path.
pub const SPARSE_MAX_QUBITS: usize = 128;
/// Weight outside the one-hot subspace above which a state is rejected.
pub const LEAKAGE_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
enum Amps {
    Dense(Vec<Complex64>),
    Sparse(BTreeMap<u128, Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Amps,
}

impl StateVector {
    /// `|0...0>` on the sparse path.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: u128) -> Result<Self> {
        if num_qubits == 0 || num_qubits > SPARSE_MAX_QUBITS {
            return Err(Error::invalid(format!("register of {num_qubits} qubits is not supported")));
        }
        if num_qubits < 128 && index >> num_qubits != 0 {
            return Err(Error::invalid("basis index does not fit the register"));
        }
        let mut m = BTreeMap::new();
        m.insert(index, Complex64::new(1.0, 0.0));
        Ok(StateVector { num_qubits, amps: Amps::Sparse(m) })
    }

    /// A dense state from a full amplitude array of length `2^n`.
    pub fn from_dense(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > DENSE_MAX_QUBITS {
            return Err(Error::invalid(format!(
                "dense simulation supports 1..={DENSE_MAX_QUBITS} qubits, got {num_qubits}"
            )));
        }
        if amps.len() != 1usize << num_qubits {
            return Err(Error::invalid("amplitude array length is not 2^n"));
        }
        Ok(StateVector { num_qubits, amps: Amps::Dense(amps) })
    }

    /// A sparse state from `(basis index, amplitude)` pairs.
    pub fn from_sparse(num_qubits: usize, entries: impl IntoIterator<Item = (u128, Complex64)>) -> Result<Self> {
        let mut s = Self::zero(num_qubits)?;
        let Amps::Sparse(m) = &mut s.amps else { unreachable!() };
        m.clear();
        for (k, a) in entries {
            if num_qubits < 128 && k >> num_qubits != 0 {
                return Err(Error::invalid("basis index does not fit the register"));
            }
            *m.entry(k).or_insert(ZERO) += a;
        }
        Ok(s)
    }

    /// Real one-hot amplitudes `t[k]` on `2^k`.
    pub fn from_onehot(t: &[f64]) -> Result<Self> {
        Self::from_sparse(
            t.len(),
            t.iter().enumerate().map(|(k, &a)| (1u128 << k, Complex64::new(a, 0.0))),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.amps, Amps::Dense(_))
    }

    pub fn to_dense(&self) -> Result<Self> {
        match &self.amps {
            Amps::Dense(_) => Ok(self.clone()),
            Amps::Sparse(m) => {
                let mut v = vec![ZERO; 1usize << self.num_qubits.min(DENSE_MAX_QUBITS)];
                if self.num_qubits > DENSE_MAX_QUBITS {
                    return Err(Error::invalid(format!(
                        "dense simulation supports at most {DENSE_MAX_QUBITS} qubits"
                    )));
                }
                for (&k, &a) in m {
                    v[k as usize] = a;
                }
                Ok(StateVector { num_qubits: self.num_qubits, amps: Amps::Dense(v) })
            }
        }
    }

    pub fn to_sparse(&self) -> Self {
        match &self.amps {
            Amps::Sparse(_) => self.clone(),
            Amps::Dense(v) => StateVector {
                num_qubits: self.num_qubits,
                amps: Amps::Sparse(
                    v.iter()
                        .enumerate()
                        .filter(|(_, a)| **a != ZERO)
                        .map(|(k, a)| (k as u128, *a))
                        .collect(),
                ),
            },
        }
    }

    pub fn amplitude(&self, index: u128) -> Complex64 {
        match &self.amps {
            Amps::Dense(v) => v.get(index as usize).copied().unwrap_or(ZERO),
            Amps::Sparse(m) => m.get(&index).copied().unwrap_or(ZERO),
        }
    }

    /// Nonzero `(index, amplitude)` pairs in ascending index order.
    pub fn entries(&self) -> Vec<(u128, Complex64)> {
        match &self.amps {
            Amps::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != ZERO)
                .map(|(k, a)| (k as u128, *a))
                .collect(),
            Amps::Sparse(m) => m.iter().filter(|(_, a)| **a != ZERO).map(|(k, a)| (*k, *a)).collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.amps {
            Amps::Dense(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            Amps::Sparse(m) => m.values().map(|a| a.norm_sqr()).sum(),
        }
    }

    /// Amplitudes on `2^k`, `k = 0..num_qubits`.
    pub fn onehot_amplitudes(&self) -> Vec<Complex64> {
        (0..self.num_qubits).map(|k| self.amplitude(1u128 << k)).collect()
    }

    /// Probability weight outside the Hamming-weight-1 states.
    pub fn leakage(&self) -> f64 {
        self.entries()
            .iter()
            .filter(|(k, _)| k.count_ones() != 1)
            .fold(0.0, |acc, (_, a)| acc + a.norm_sqr())
    }
}

#[derive(Clone, Copy)]
enum Op {
    X { t: u32 },
    Ry { t: u32, c: f64, s: f64, ctrl: Option<u32> },
    Cx { ctrl: u32, t: u32 },
}

fn compile(circ: &Circuit, n: usize) -> Vec<Op> {
    let bit = |q: usize| (n - q) as u32;
    circ.gates
        .iter()
        .map(|g| {
            let t = bit(g.target);
            match g.kind {
                GateKind::X => Op::X { t },
                GateKind::Ry | GateKind::Cry => {
                    let (s, c) = (g.angle.unwrap_or(0.0) / 2.0).sin_cos();
                    Op::Ry { t, c, s, ctrl: g.control.map(bit) }
                }
                GateKind::Cx => Op::Cx { ctrl: bit(g.control.unwrap_or(0)), t },
            }
        })
        .collect()
}

fn apply_sparse(m: &BTreeMap<u128, Complex64>, op: Op) -> BTreeMap<u128, Complex64> {
    let mut out = BTreeMap::new();
    let mut add = |k: u128, a: Complex64| {
        if a != ZERO {
            *out.entry(k).or_insert(ZERO) += a;
        }
    };
    for (&k, &a) in m {
        match op {
            Op::X { t } => add(k ^ (1u128 << t), a),
            Op::Cx { ctrl, t } => {
                if k >> ctrl & 1 == 1 {
                    add(k ^ (1u128 << t), a)
                } else {
                    add(k, a)
                }
            }
            Op::Ry { t, c, s, ctrl } => {
                if ctrl.is_some_and(|cb| k >> cb & 1 == 0) {
                    add(k, a);
                    continue;
                }
                let mask = 1u128 << t;
                if k & mask == 0 {
                    add(k, a * c);
                    add(k | mask, a * s);
                } else {
                    add(k & !mask, -a * s);
                    add(k, a * c);
                }
            }
        }
    }
    out.retain(|_, a| *a != ZERO);
    out
}

fn apply_dense(v: &mut [Complex64], op: Op, exec: Exec) {
    let (t, ctrl) = match op {
        Op::X { t } => (t, None),
        Op::Cx { ctrl, t } => (t, Some(ctrl)),
        Op::Ry { t, ctrl, .. } => (t, ctrl),
    };
    let half = 1usize << t;
    // chunks hold whole (i, i + half) pairs
    let chunk = (half * 2).max(1 << 12).min(v.len());
    exec.for_each_chunk_mut(v, chunk, |c, start| {
        for base in (0..c.len()).step_by(2 * half) {
            for off in 0..half {
                let i = base + off;
                let j = i + half;
                if let Some(cb) = ctrl {
                    if (start + i) >> cb & 1 == 0 {
                        continue;
                    }
                }
                match op {
                    Op::X { .. } | Op::Cx { .. } => c.swap(i, j),
                    Op::Ry { c: co, s: si, .. } => {
                        let (a0, a1) = (c[i], c[j]);
                        c[i] = a0 * co - a1 * si;
                        c[j] = a0 * si + a1 * co;
                    }
                }
            }
        }
    });
}

/// Runs `circ` on `input`, or on `|0...0>` when no input is given. The
/// circuit's own `X` gate prepares the fiducial one-hot state.
pub fn run(circ: &Circuit, input: Option<&StateVector>, exec: Exec) -> Result<StateVector> {
    circ.validate()?;
    let state = match input {
        Some(s) => {
            if s.num_qubits != circ.num_qubits {
                return Err(Error::invalid(format!(
                    "input has {} qubits, circuit has {}",
                    s.num_qubits, circ.num_qubits
                )));
            }
            s.clone()
        }
        None => StateVector::zero(circ.num_qubits)?,
    };
    let ops = compile(circ, circ.num_qubits);
    let n = circ.num_qubits;
    Ok(match state.amps {
        Amps::Sparse(mut m) => {
            for &op in &ops {
                m = apply_sparse(&m, op);
            }
            StateVector { num_qubits: n, amps: Amps::Sparse(m) }
        }
        Amps::Dense(mut v) => {
            for &op in &ops {
                apply_dense(&mut v, op, exec);
            }
            StateVector { num_qubits: n, amps: Amps::Dense(v) }
        }
    })
}

/// `|<T|psi>|^2` with `T` placed on the one-hot states.
pub fn fidelity(psi: &StateVector, t: &[f64]) -> Result<f64> {
    if t.len() != psi.num_qubits {
        return Err(Error::invalid(format!(
            "target has {} amplitudes, register has {} qubits",
            t.len(),
            psi.num_qubits
        )));
    }
    let ov: Complex64 = psi.onehot_amplitudes().iter().zip(t).map(|(a, &b)| a * b).sum();
    Ok(ov.norm_sqr())
}

fn check_register(psi: &StateVector, c: &SectorConfig) -> Result<()> {
    if psi.num_qubits != c.m + 1 {
        return Err(Error::invalid(format!(
            "sector {c} needs {} qubits, register has {}",
            c.m + 1,
            psi.num_qubits
        )));
    }
    let leak = psi.leakage();
    if leak > LEAKAGE_TOL {
        return Err(Error::Leakage { weight: leak });
    }
    Ok(())
}

/// Diagonal `d_k` and couplings `t_k` of the encoded tridiagonal Hamiltonian.
fn encoded_terms(c: &SectorConfig, p: &ModelParams) -> Result<(Vec<f64>, Vec<f64>)> {
    if c.n() != p.n() {
        return Err(Error::invalid(format!("sector {c} does not hold N={} particles", p.n())));
    }
    let enc = Encoding::new(*c);
    let d = (0..=c.m)
        .map(|k| {
            let (na, nb) = enc.occupations(k);
            diagonal_element(p, na, nb)
        })
        .collect();
    let t = (0..c.m)
        .map(|k| {
            let (na, nb) = enc.occupations(k);
            pair_coupling(p, na, nb)
        })
        .collect();
    Ok((d, t))
}

/// `<H>` of a one-hot state read as a sector vector.
pub fn encoded_expectation(psi: &StateVector, c: &SectorConfig, p: &ModelParams) -> Result<f64> {
    check_register(psi, c)?;
    let (d, t) = encoded_terms(c, p)?;
    let a = psi.onehot_amplitudes();
    let mut e: f64 = a.iter().zip(&d).map(|(x, dk)| dk * x.norm_sqr()).sum();
    for k in 0..t.len() {
        e += 2.0 * t[k] * (a[k].conj() * a[k + 1]).re;
    }
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    /// All `Z` terms.
    Diagonal,
    /// Bonds `(k, k+1)` with even `k`.
    EvenBonds,
    /// Bonds `(k, k+1)` with odd `k`.
    OddBonds,
}

/// One Pauli string with a real coefficient; qubits are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub ops: Vec<(usize, char)>,
}

/// A family of commuting terms measured with one basis setting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementGroup {
    pub kind: GroupKind,
    /// Identity coefficient carried by this group.
    pub constant: f64,
    pub terms: Vec<PauliTerm>,
    /// `d_k` for the diagonal group, empty otherwise.
    pub diagonal: Vec<f64>,
    /// `(k, t_k)` for bond groups, empty otherwise.
    pub bonds: Vec<(usize, f64)>,
}

/// Splits the encoded Hamiltonian into a `Z` family and two bond families.
pub fn pauli_groups(c: &SectorConfig, p: &ModelParams) -> Result<Vec<MeasurementGroup>> {
    let (d, t) = encoded_terms(c, p)?;
    let enc = Encoding::new(*c);
    let mut groups = vec![MeasurementGroup {
        kind: GroupKind::Diagonal,
        constant: d.iter().sum::<f64>() / 2.0,
        terms: d
            .iter()
            .enumerate()
            .map(|(k, dk)| PauliTerm { coeff: -dk / 2.0, ops: vec![(enc.qubit(k), 'Z')] })
            .collect(),
        diagonal: d.clone(),
        bonds: Vec::new(),
    }];
    for (kind, first) in [(GroupKind::EvenBonds, 0usize), (GroupKind::OddBonds, 1)] {
        let bonds: Vec<(usize, f64)> = (first..t.len()).step_by(2).map(|k| (k, t[k])).collect();
        if bonds.is_empty() {
            continue;
        }
        let mut terms = Vec::new();
        for &(k, tk) in &bonds {
            let (qa, qb) = (enc.qubit(k), enc.qubit(k + 1));
            terms.push(PauliTerm { coeff: tk / 2.0, ops: vec![(qa, 'X'), (qb, 'X')] });
            terms.push(PauliTerm { coeff: tk / 2.0, ops: vec![(qa, 'Y'), (qb, 'Y')] });
        }
        groups.push(MeasurementGroup { kind, constant: 0.0, terms, diagonal: Vec::new(), bonds });
    }
    Ok(groups)
}

/// Outcome values and probabilities of measuring `group` on a one-hot state.
fn outcome_distribution(group: &MeasurementGroup, a: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    match group.kind {
        GroupKind::Diagonal => (group.diagonal.clone(), a.iter().map(|x| x.norm_sqr()).collect()),
        _ => {
            let mut vals = Vec::new();
            let mut probs = Vec::new();
            let mut paired = 0.0;
            for &(k, tk) in &group.bonds {
                let plus = (a[k] + a[k + 1]).norm_sqr() / 2.0;
                let minus = (a[k] - a[k + 1]).norm_sqr() / 2.0;
                vals.extend([tk, -tk]);
                probs.extend([plus, minus]);
                paired += plus + minus;
            }
            let total: f64 = a.iter().map(|x| x.norm_sqr()).sum();
            vals.push(0.0);
            probs.push((total - paired).max(0.0));
            (vals, probs)
        }
    }
}

/// Exact expectation of one group on a one-hot state.
pub fn group_expectation(group: &MeasurementGroup, psi: &StateVector) -> Result<f64> {
    let leak = psi.leakage();
    if leak > LEAKAGE_TOL {
        return Err(Error::Leakage { weight: leak });
    }
    let (vals, probs) = outcome_distribution(group, &psi.onehot_amplitudes());
    Ok(vals.iter().zip(&probs).map(|(v, p)| v * p).sum())
}

/// Outcome counts of `shots` independent draws, sampled as a chain of
/// conditional binomials.
fn multinomial(shots: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let mut left = shots;
    let mut mass: f64 = probs.iter().sum();
    let mut counts = vec![0u64; probs.len()];
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, q)
            .map_err(|e| Error::NumericFailure(format!("bad outcome probability: {e}")))?
            .sample(rng);
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    Ok(counts)
}

/// Shot-based estimate of the encoded energy and its standard error.
/// Every group gets `shots` samples from its own seeded stream.
pub fn sampled_expectation(
    psi: &StateVector,
    groups: &[MeasurementGroup],
    shots: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let leak = psi.leakage();
    if leak > LEAKAGE_TOL {
        return Err(Error::Leakage { weight: leak });
    }
    let a = psi.onehot_amplitudes();
    let mut estimate = 0.0;
    let mut var_sum = 0.0;
    for (gi, g) in groups.iter().enumerate() {
        let (vals, probs) = outcome_distribution(g, &a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (gi as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let counts = multinomial(shots, &probs, &mut rng)?;
        let n = shots as f64;
        let mean: f64 = counts.iter().zip(&vals).map(|(c, v)| *c as f64 * v).sum::<f64>() / n;
        let var = if shots > 1 {
            counts.iter().zip(&vals).map(|(c, v)| *c as f64 * (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        // diagonal outcomes are d_k themselves, so the identity part is included
        estimate += mean;
        var_sum += var;
    }
    Ok((estimate, (var_sum / shots as f64).sqrt()))
}
