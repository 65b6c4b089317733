//! Derivative-free simplex minimization.

use crate::error::Result;

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex.
    pub step: f64,
    pub max_evals: usize,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    /// Stop once the best value improves by less than this over a window.
    pub improvement_tol: f64,
    /// Window length in iterations; `None` means `2n + 2`.
    pub window: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { step: 0.5, max_evals: 20_000, diameter_tol: 1e-8, improvement_tol: 1e-12, window: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// True when a stopping test fired before the evaluation budget ran out.
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

/// Minimizes `f` from `x0` with the Nelder-Mead method using the standard
/// coefficients (1, 2, 1/2, 1/2).
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    };
    if n == 0 {
        let value = eval(x0, &mut evals)?;
        return Ok(SimplexResult { x: vec![], value, evaluations: evals, iterations: 0, converged: true, trace: vec![value] });
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)?));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.step;
        let v = eval(&x, &mut evals)?;
        simplex.push((x, v));
    }

    let window = opts.window.unwrap_or(2 * n + 2);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let converged = loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        trace.push(best);

        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            break true;
        }
        if trace.len() > window && trace[trace.len() - 1 - window] - best < opts.improvement_tol {
            break true;
        }
        if evals >= opts.max_evals {
            break false;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(1.0);
        let fr = eval(&xr, &mut evals)?;
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals)?;
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals)?;
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best.iter().zip(&v.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
            let fx = eval(&x, &mut evals)?;
            *v = (x, fx);
        }
    };

    let (x, value) = simplex.swap_remove(0);
    Ok(SimplexResult { x, value, evaluations: evals, iterations, converged, trace })
}
