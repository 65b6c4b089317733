//! Circuit representation, the two EGO state-preparation circuits, angle
//! computation, the one-hot encoding and text exporters.
//!
//! Qubits are numbered `1..=M+1`. The basis integer of a register is read
//! big-endian, so qubit 1 is the most significant bit. Ladder index `k` of a
//! sector maps to the one-hot integer `2^k`, i.e. to qubit `M + 1 - k`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FockVector, SectorConfig};

/// Largest deviation of `sum T_k^2` from 1 accepted by the angle builders.
pub const TARGET_NORM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthMode {
    Linear,
    Log,
}

impl FromStr for DepthMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(DepthMode::Linear),
            "log" | "logarithmic" => Ok(DepthMode::Log),
            _ => Err(Error::invalid(format!("unknown depth mode '{s}'"))),
        }
    }
}

impl std::fmt::Display for DepthMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DepthMode::Linear => "linear",
            DepthMode::Log => "log",
        })
    }
}

impl DepthMode {
    /// Control qubit used by step `n` (1-based).
    pub fn control_of(self, n: usize) -> usize {
        match self {
            DepthMode::Linear => n,
            DepthMode::Log => n - (1usize << n.ilog2()) + 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub thetas: Vec<f64>,
    pub mode: DepthMode,
}

impl AngleSet {
    pub fn new(thetas: Vec<f64>, mode: DepthMode) -> Result<Self> {
        if let Some(t) = thetas.iter().find(|t| !t.is_finite()) {
            return Err(Error::invalid(format!("angle {t} is not finite")));
        }
        Ok(AngleSet { thetas, mode })
    }

    pub fn m(&self) -> usize {
        self.thetas.len()
    }
}

/// Maps an angle to `[0, 4 pi)`, the period of a Y rotation.
pub fn wrap_4pi(theta: f64) -> f64 {
    theta.rem_euclid(4.0 * PI)
}

/// Distance between two angles modulo `4 pi`.
pub fn distance_4pi(a: f64, b: f64) -> f64 {
    let d = wrap_4pi(a - b);
    d.min(4.0 * PI - d)
}

/// Representative of an angle up to `theta -> -theta` and shifts by `2 pi`.
///
/// Log-depth angles are fixed only up to such moves when they are combined
/// with compensating sign flips elsewhere in the tree, so comparisons with
/// externally produced angles use this folded value together with a check
/// that both angle sets prepare the same state.
pub fn gauge_fold(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    r.min(2.0 * PI - r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    Ry,
    Cry,
    Cx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
    pub target: usize,
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Gate { kind: GateKind::X, angle: None, control: None, target }
    }
    pub fn ry(theta: f64, target: usize) -> Self {
        Gate { kind: GateKind::Ry, angle: Some(theta), control: None, target }
    }
    pub fn cry(theta: f64, control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cry, angle: Some(theta), control: Some(control), target }
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cx, angle: None, control: Some(control), target }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.kind, GateKind::Cry | GateKind::Cx)
    }

    fn qubits(&self) -> impl Iterator<Item = usize> {
        self.control.into_iter().chain(std::iter::once(self.target))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    /// Gate indices that may run at the same time.
    pub layers: Vec<Vec<usize>>,
}

impl Circuit {
    /// Checks qubit ranges, gate arities and the layer schedule.
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 {
            return Err(Error::invalid("circuit has no qubits"));
        }
        let in_range = |q: usize| (1..=self.num_qubits).contains(&q);
        for (i, g) in self.gates.iter().enumerate() {
            let needs_angle = matches!(g.kind, GateKind::Ry | GateKind::Cry);
            let needs_control = g.is_two_qubit();
            if needs_angle != g.angle.is_some() {
                return Err(Error::invalid(format!("gate {i}: angle presence does not fit {:?}", g.kind)));
            }
            if let Some(a) = g.angle {
                if !a.is_finite() {
                    return Err(Error::invalid(format!("gate {i}: angle is not finite")));
                }
            }
            if needs_control != g.control.is_some() {
                return Err(Error::invalid(format!("gate {i}: control presence does not fit {:?}", g.kind)));
            }
            if !g.qubits().all(in_range) {
                return Err(Error::invalid(format!("gate {i}: qubit index out of range")));
            }
            if g.control == Some(g.target) {
                return Err(Error::invalid(format!("gate {i}: control equals target")));
            }
        }
        let mut seen = vec![false; self.gates.len()];
        for (li, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.num_qubits + 1];
            for &gi in layer {
                if gi >= self.gates.len() || seen[gi] {
                    return Err(Error::invalid(format!("layer {li}: bad or repeated gate index {gi}")));
                }
                seen[gi] = true;
                for q in self.gates[gi].qubits() {
                    if used[q] {
                        return Err(Error::invalid(format!("layer {li}: qubit {q} used twice")));
                    }
                    used[q] = true;
                }
            }
        }
        if !self.layers.is_empty() && seen.iter().any(|s| !s) {
            return Err(Error::invalid("layers do not cover every gate"));
        }
        // layers must respect gate order on shared qubits
        let mut layer_of = vec![0usize; self.gates.len()];
        for (li, layer) in self.layers.iter().enumerate() {
            for &gi in layer {
                layer_of[gi] = li;
            }
        }
        if !self.layers.is_empty() {
            let mut last: Vec<Option<usize>> = vec![None; self.num_qubits + 1];
            for (gi, g) in self.gates.iter().enumerate() {
                for q in g.qubits() {
                    if let Some(prev) = last[q] {
                        if layer_of[prev] >= layer_of[gi] {
                            return Err(Error::invalid(format!(
                                "gate {gi} is scheduled no later than gate {prev} on qubit {q}"
                            )));
                        }
                    }
                    last[q] = Some(gi);
                }
            }
        }
        Ok(())
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Number of layers that contain at least one two-qubit gate.
    pub fn two_qubit_depth(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.iter().any(|&i| self.gates[i].is_two_qubit()))
            .count()
    }
}

/// Maps ladder index `k` of a sector to one-hot basis states and back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub config: SectorConfig,
}

impl Encoding {
    pub fn new(config: SectorConfig) -> Self {
        Encoding { config }
    }
    pub fn num_qubits(&self) -> usize {
        self.config.m + 1
    }
    /// Basis integer `2^k`.
    pub fn basis_index(&self, k: usize) -> u128 {
        1u128 << k
    }
    /// Qubit carrying the excitation for ladder index `k`.
    pub fn qubit(&self, k: usize) -> usize {
        self.config.m + 1 - k
    }
    /// Ladder index of a one-hot basis integer.
    pub fn ladder_index(&self, basis: u128) -> Option<usize> {
        (basis.count_ones() == 1 && (basis.trailing_zeros() as usize) <= self.config.m)
            .then(|| basis.trailing_zeros() as usize)
    }
    pub fn occupations(&self, k: usize) -> (usize, usize) {
        self.config.occupations(k)
    }
}

/// Target amplitudes `T[k]` on one-hot integers `2^k`.
pub fn encode(psi: &FockVector, c: &SectorConfig) -> Result<Vec<f64>> {
    if psi.n() != c.n() || psi.parity() != c.parity() {
        return Err(Error::invalid(format!(
            "state with N={} and parity {} is not in sector {c}",
            psi.n(),
            psi.parity()
        )));
    }
    Ok(psi.amps().to_vec())
}

pub fn decode(t: &[f64], c: &SectorConfig) -> Result<FockVector> {
    FockVector::new(c.n(), c.parity(), t.to_vec())
}

fn check_target(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::invalid("target must have at least one amplitude"));
    }
    if t.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("target has non-finite amplitudes"));
    }
    let s: f64 = t.iter().map(|x| x * x).sum();
    if (s - 1.0).abs() > TARGET_NORM_TOL {
        return Err(Error::invalid(format!("target is not normalized (sum of squares {s})")));
    }
    Ok(())
}

/// Closed-form angles for the linear-depth circuit.
pub fn linear_angles(t: &[f64]) -> Result<AngleSet> {
    check_target(t)?;
    let m = t.len() - 1;
    // c_k of the closed form is t[k - 1]
    let mut prefix = vec![0.0; m + 2];
    for k in 1..=m + 1 {
        prefix[k] = prefix[k - 1] + t[k - 1] * t[k - 1];
    }
    let mut thetas = Vec::with_capacity(m);
    for j in 1..=m {
        let idx = m + 2 - j;
        let den = prefix[idx].sqrt();
        if den <= f64::MIN_POSITIVE {
            thetas.push(0.0);
            continue;
        }
        let q = (t[idx - 1] / den).clamp(-1.0, 1.0);
        if j < m {
            thetas.push(2.0 * q.acos());
        } else {
            let sgn = if t[0] >= 0.0 { 1.0 } else { -1.0 };
            thetas.push(2.0 * sgn * (q.acos() - PI) + 2.0 * PI);
        }
    }
    AngleSet::new(thetas, DepthMode::Linear)
}

/// One-hot amplitudes produced by the circuit for `thetas`, indexed by `k`.
/// This is the closed product form of the circuit output and agrees with
/// full simulation.
pub fn output_amplitudes(thetas: &[f64], mode: DepthMode) -> Vec<f64> {
    let m = thetas.len();
    // by qubit, 1-based
    let mut amp = vec![0.0; m + 2];
    amp[1] = 1.0;
    for i in 1..=m {
        let p = mode.control_of(i);
        let (s, c) = (thetas[i - 1] / 2.0).sin_cos();
        let a = amp[p];
        amp[p] = a * c;
        amp[i + 1] = a * s;
    }
    (0..=m).map(|k| amp[m + 1 - k]).collect()
}

fn fidelity_real(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    d * d
}

/// Angles for the log-depth circuit by splitting probability mass down the
/// circuit's binary tree, followed by Gauss-Newton polishing if needed.
pub fn log_angles(t: &[f64]) -> Result<AngleSet> {
    check_target(t)?;
    let m = t.len() - 1;
    let mode = DepthMode::Log;
    let amp = |q: usize| t[m + 1 - q];

    // children[q] lists (step, child qubit) in step order
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + 2];
    for i in 1..=m {
        children[mode.control_of(i)].push((i, i + 1));
    }
    fn collect(q: usize, after: usize, children: &[Vec<(usize, usize)>], out: &mut Vec<usize>) {
        out.push(q);
        for &(j, c) in &children[q] {
            if j > after {
                collect(c, j, children, out);
            }
        }
    }

    let mut thetas = Vec::with_capacity(m);
    for i in 1..=m {
        let p = mode.control_of(i);
        let mut parent = Vec::new();
        collect(p, i, &children, &mut parent);
        let mut child = Vec::new();
        collect(i + 1, i, &children, &mut child);
        let norm = |set: &[usize]| set.iter().map(|&q| amp(q) * amp(q)).sum::<f64>().sqrt();
        let (np, nc) = (norm(&parent), norm(&child));
        if np == 0.0 && nc == 0.0 {
            thetas.push(0.0);
            continue;
        }
        let sign = |set: &[usize]| {
            if set.len() == 1 && amp(set[0]) < 0.0 {
                -1.0
            } else {
                1.0
            }
        };
        thetas.push(wrap_4pi(2.0 * (sign(&child) * nc).atan2(sign(&parent) * np)));
    }

    if m > 0 && fidelity_real(&output_amplitudes(&thetas, mode), t) < 1.0 - 1e-10 {
        thetas = refine(thetas, t, mode)?;
    }
    AngleSet::new(thetas, mode)
}

/// Damped Gauss-Newton on `output_amplitudes(theta) - t`.
fn refine(mut th: Vec<f64>, t: &[f64], mode: DepthMode) -> Result<Vec<f64>> {
    use nalgebra::{DMatrix, DVector};
    let m = th.len();
    let resid = |th: &[f64]| -> Vec<f64> {
        output_amplitudes(th, mode).iter().zip(t).map(|(a, b)| a - b).collect()
    };
    let cost = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let mut r = resid(&th);
    let mut mu = 1e-3;
    for _ in 0..500 {
        if fidelity_real(&output_amplitudes(&th, mode), t) >= 1.0 - 1e-12 {
            break;
        }
        let h = 1e-7;
        let jac = DMatrix::from_fn(m + 1, m, |row, col| {
            let mut a = th.clone();
            let mut b = th.clone();
            a[col] += h;
            b[col] -= h;
            (output_amplitudes(&a, mode)[row] - output_amplitudes(&b, mode)[row]) / (2.0 * h)
        });
        let rv = DVector::from_column_slice(&r);
        let jt = jac.transpose();
        let mut improved = false;
        for _ in 0..30 {
            let lhs = &jt * &jac + DMatrix::identity(m, m) * mu;
            let Some(step) = lhs.lu().solve(&(-&jt * &rv)) else {
                mu *= 10.0;
                continue;
            };
            let cand: Vec<f64> = th.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            let rc = resid(&cand);
            if cost(&rc) < cost(&r) {
                th = cand;
                r = rc;
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if fidelity_real(&output_amplitudes(&th, mode), t) < 1.0 - 1e-10 {
        return Err(Error::NumericFailure(
            "log-depth angle refinement did not reach the target state".into(),
        ));
    }
    Ok(th.into_iter().map(wrap_4pi).collect())
}

/// Angles for either circuit family.
pub fn angles(t: &[f64], mode: DepthMode) -> Result<AngleSet> {
    match mode {
        DepthMode::Linear => linear_angles(t),
        DepthMode::Log => log_angles(t),
    }
}

/// The EGO circuit: `X` on qubit 1, then for each step `i = 1..=M` a
/// controlled `RY(theta_i)` from qubit `f(i)` onto qubit `i + 1` followed by
/// a `CX` from qubit `i + 1` back onto `f(i)`.
pub fn build_circuit(angles: &AngleSet) -> Circuit {
    let m = angles.m();
    let mode = angles.mode;
    let mut gates = Vec::with_capacity(2 * m + 1);
    gates.push(Gate::x(1));
    for (i, &theta) in angles.thetas.iter().enumerate() {
        let step = i + 1;
        let ctrl = mode.control_of(step);
        gates.push(Gate::cry(theta, ctrl, step + 1));
        gates.push(Gate::cx(step + 1, ctrl));
    }
    let mut layers = vec![vec![0]];
    match mode {
        DepthMode::Linear => layers.extend((1..gates.len()).map(|g| vec![g])),
        DepthMode::Log => {
            let mut start = 1usize;
            while start <= m {
                let end = (2 * start - 1).min(m);
                layers.push((start..=end).map(|s| 2 * s - 1).collect());
                layers.push((start..=end).map(|s| 2 * s).collect());
                start *= 2;
            }
        }
    }
    Circuit { num_qubits: m + 1, gates, layers }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Qasm,
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "qasm" | "qasm3" | "openqasm" => Ok(ExportFormat::Qasm),
            _ => Err(Error::invalid(format!("unknown circuit format '{s}'"))),
        }
    }
}

/// Formats `x` with 17 significant digits, dropping trailing zeros.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{exp}")
    }
}

pub fn export_circuit(circ: &Circuit, format: ExportFormat) -> Result<String> {
    circ.validate()?;
    match format {
        ExportFormat::Json => serde_json::to_string_pretty(circ)
            .map_err(|e| Error::NumericFailure(format!("serialization failed: {e}"))),
        ExportFormat::Qasm => Ok(to_qasm(circ)),
    }
}

/// Exports by format name (`json` or `qasm`).
pub fn export_circuit_named(circ: &Circuit, format: &str) -> Result<String> {
    export_circuit(circ, format.parse()?)
}

fn to_qasm(circ: &Circuit) -> String {
    let mut s = String::new();
    s.push_str("OPENQASM 3;\ninclude \"stdgates.inc\";\n");
    let _ = writeln!(s, "qubit[{}] q;", circ.num_qubits);
    let q = |i: usize| format!("q[{}]", i - 1);
    for g in &circ.gates {
        let _ = match g.kind {
            GateKind::X => writeln!(s, "x {};", q(g.target)),
            GateKind::Ry => writeln!(s, "ry({}) {};", fmt_sig17(g.angle.unwrap_or(0.0)), q(g.target)),
            GateKind::Cry => writeln!(
                s,
                "ctrl @ ry({}) {}, {};",
                fmt_sig17(g.angle.unwrap_or(0.0)),
                q(g.control.unwrap_or(0)),
                q(g.target)
            ),
            GateKind::Cx => writeln!(s, "cx {}, {};", q(g.control.unwrap_or(0)), q(g.target)),
        };
    }
    s
}

/// Reads a circuit from its JSON form and validates it.
pub fn import_circuit(json: &str) -> Result<Circuit> {
    let c: Circuit = serde_json::from_str(json).map_err(|e| Error::invalid(format!("bad circuit JSON: {e}")))?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    const N7_TARGET: [f64; 4] = [-0.982953, 0.18121, -3.08911e-2, 3.40577e-3];

    fn unit(v: &[f64]) -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect()
    }

    #[test]
    fn control_sequences() {
        let lin: Vec<usize> = (1..=6).map(|n| DepthMode::Linear.control_of(n)).collect();
        assert_eq!(lin, vec![1, 2, 3, 4, 5, 6]);
        let log: Vec<usize> = (1..=10).map(|n| DepthMode::Log.control_of(n)).collect();
        assert_eq!(log, vec![1, 1, 2, 1, 2, 3, 4, 1, 2, 3]);
    }

    #[test]
    fn linear_angles_n7() {
        let a = linear_angles(&unit(&N7_TARGET)).unwrap();
        for (x, y) in a.thetas.iter().zip([3.13478, 3.20338, 9.78939]) {
            assert!(distance_4pi(*x, y) < 1e-4, "{x} vs {y}");
        }
    }

    #[test]
    fn linear_m1_is_twice_alpha() {
        for alpha in [0.1, 1.0, 2.0, 3.0] {
            let a = linear_angles(&[f64::sin(alpha), f64::cos(alpha)]).unwrap();
            assert!((a.thetas[0] - 2.0 * alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn log_equals_linear_for_one_pair() {
        for alpha in [0.3, 1.9, 2.8, -0.7, -2.5] {
            let t = [f64::sin(alpha), f64::cos(alpha)];
            let a = linear_angles(&t).unwrap().thetas[0];
            let b = log_angles(&t).unwrap().thetas[0];
            assert!(distance_4pi(a, b) < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn zero_tail_levels() {
        let a = linear_angles(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(a.thetas[1], 0.0);
        let out = output_amplitudes(&a.thetas, DepthMode::Linear);
        assert!(fidelity_real(&out, &[0.0, 0.0, 1.0]) > 1.0 - 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(linear_angles(&[1.0, 1.0]).is_err());
        assert!(log_angles(&[0.5]).is_err());
        assert!(linear_angles(&[]).is_err());
    }

    #[test]
    fn log_angles_reproduce_target() {
        let t = unit(&N7_TARGET);
        let a = log_angles(&t).unwrap();
        let out = output_amplitudes(&a.thetas, DepthMode::Log);
        assert!(fidelity_real(&out, &t) > 1.0 - 1e-14);
        let published = [-2.77709, 3.10401, 3.07876];
        for (x, y) in a.thetas.iter().zip(published) {
            assert!((gauge_fold(*x) - gauge_fold(y)).abs() < 1e-4);
        }
    }

    #[test]
    fn refinement_recovers_perturbed_angles() {
        let t = unit(&[0.3, -0.5, 0.2, 0.6, -0.1, 0.4]);
        let exact = log_angles(&t).unwrap().thetas;
        let start: Vec<f64> = exact.iter().map(|x| x + 0.05).collect();
        let th = refine(start, &t, DepthMode::Log).unwrap();
        assert!(fidelity_real(&output_amplitudes(&th, DepthMode::Log), &t) > 1.0 - 1e-10);
    }

    #[test]
    fn circuit_shapes() {
        let c = build_circuit(&AngleSet::new(vec![0.1, 0.2, 0.3], DepthMode::Log).unwrap());
        assert_eq!(c.num_qubits, 4);
        assert_eq!(c.two_qubit_count(), 6);
        assert_eq!(c.two_qubit_depth(), 4);
        c.validate().unwrap();
        let c = build_circuit(&AngleSet::new(vec![0.5; 10], DepthMode::Log).unwrap());
        assert_eq!((c.num_qubits, c.two_qubit_count()), (11, 20));
        assert_eq!(c.two_qubit_depth(), 8);
        c.validate().unwrap();
        let c = build_circuit(&AngleSet::new(vec![0.5; 5], DepthMode::Linear).unwrap());
        assert_eq!(c.two_qubit_depth(), 10);
        c.validate().unwrap();
        let c = build_circuit(&AngleSet::new(vec![], DepthMode::Linear).unwrap());
        assert_eq!(c.gates, vec![Gate::x(1)]);
    }

    #[test]
    fn json_round_trip_and_qasm() {
        let c = build_circuit(&AngleSet::new(vec![0.1, -2.7, 9.78938951], DepthMode::Log).unwrap());
        let js = export_circuit(&c, ExportFormat::Json).unwrap();
        assert_eq!(import_circuit(&js).unwrap(), c);
        let q = export_circuit(&c, ExportFormat::Qasm).unwrap();
        assert!(q.starts_with("OPENQASM 3;"));
        assert_eq!(q.lines().filter(|l| l.starts_with("x ")).count(), 1);
        assert_eq!(q.lines().filter(|l| l.starts_with("ctrl @ ry(")).count(), 3);
        assert_eq!(q.lines().filter(|l| l.starts_with("cx ")).count(), 3);
        assert!(export_circuit_named(&c, "svg").is_err());
    }

    #[test]
    fn import_rejects_bad_circuits() {
        let bad = r#"{"num_qubits":2,"gates":[{"kind":"cx","control":1,"target":1}],"layers":[[0]]}"#;
        assert!(import_circuit(bad).is_err());
        let bad = r#"{"num_qubits":2,"gates":[{"kind":"x","target":3}],"layers":[]}"#;
        assert!(import_circuit(bad).is_err());
        let bad = r#"{"num_qubits":2,"gates":[{"kind":"x","target":1},{"kind":"cx","control":1,"target":2}],"layers":[[0,1]]}"#;
        assert!(import_circuit(bad).is_err());
    }

    #[test]
    fn sig17_formatting() {
        assert_eq!(fmt_sig17(0.1), "0.10000000000000001");
        assert_eq!(fmt_sig17(3.0), "3");
        assert!(fmt_sig17(-2.5e-9).ends_with("e-9"));
        for x in [PI, -9.78938951, 1e-12, 123456.789] {
            assert_eq!(fmt_sig17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn encoding_round_trip() {
        let c = SectorConfig::new(3, 1, 0).unwrap();
        let psi = FockVector::new(7, 0, unit(&N7_TARGET)).unwrap();
        let t = encode(&psi, &c).unwrap();
        assert_eq!(decode(&t, &c).unwrap(), psi);
        let e = Encoding::new(c);
        assert_eq!(e.basis_index(2), 4);
        assert_eq!(e.qubit(0), 4);
        assert_eq!(e.ladder_index(8), Some(3));
        assert_eq!(e.ladder_index(3), None);
        assert!(encode(&psi, &SectorConfig::new(3, 0, 1).unwrap()).is_err());
    }
}
