//! Derivative-free simplex search (maximization form).

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes `f` starting from `x0` with initial simplex edge `step`.
/// Non-finite values are treated as `-∞`. Stops when the spread of values in
/// the simplex drops below `ftol` or after `max_iter` iterations.
pub fn maximize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: f64, ftol: f64, max_iter: usize) -> NelderMeadResult {
    let n = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += if x[i].abs() > 1e-8 { step * x[i].abs().max(1.0) } else { step };
        let v = eval(&x);
        simplex.push((x, v));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        if worst.is_finite() && (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut c = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / n as f64;
            }
        }
        let toward = |t: f64| -> Vec<f64> { c.iter().zip(&simplex[n].0).map(|(ci, wi)| ci + t * (ci - wi)).collect() };
        let xr = toward(alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = toward(gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let x = toward(rho * alpha);
            let v = eval(&x);
            (x, v)
        } else {
            let x = toward(-rho);
            let v = eval(&x);
            (x, v)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x0 = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x0) {
                *xi = bi + sigma * (*xi - bi);
            }
            *v = eval(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    NelderMeadResult { x, value: -v, iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_peak() {
        let r = maximize(|x| -(x[0] - 1.0).powi(2) - 3.0 * (x[1] + 0.5).powi(2), &[0.0, 0.0], 0.5, 1e-14, 2000);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] + 0.5).abs() < 1e-5);
    }

    #[test]
    fn handles_kinks_and_nan() {
        let r = maximize(
            |x| if x[0] > 5.0 { f64::NAN } else { -(x[0] - 2.0).abs() - (x[1]).abs() },
            &[4.0, 1.0],
            1.0,
            1e-12,
            2000,
        );
        assert!(r.value > -1e-4, "{:?}", r);
    }
}
