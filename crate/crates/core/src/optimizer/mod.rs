//! Maximization of the entropy functionals over `τ`, over torus vectors `ξ`,
//! and over piecewise-linear degenerations; λ-scans for branching.

pub mod nelder_mead;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exp_integrals::{AffinePiece, PLConvexFunction};
use crate::na_entropy::{mu_lambda_na, EntropyParams, ToricTestConfig, VectorEntropy};
use crate::polytope::Polytope;

pub const TAU_GRID: usize = 256;
pub const GRAD_TOL: f64 = 1e-9;
pub const MAX_NEWTON: usize = 500;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`.
fn golden<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Global maximum of `τ ↦ μ^λ_NA(τ)` on `[0, τ_max]`: bracket on a
/// 257-point grid, then golden section to `|Δτ| <= 1e-10`. Ties resolve to
/// the smallest `τ`.
pub fn maximize_over_tau(tc: &ToricTestConfig, lambda: f64, tau_max: f64) -> Result<(f64, f64)> {
    if !(tau_max > 0.0) || !tau_max.is_finite() {
        return Err(Error::InvalidInput(format!("tau_max must be positive, got {tau_max}")));
    }
    tc.check_tau(tau_max)?;
    let eval = |tau: f64| mu_lambda_na(tc, EntropyParams { lambda, tau });
    let grid: Vec<f64> = (0..=TAU_GRID).map(|k| tau_max * k as f64 / TAU_GRID as f64).collect();
    let vals: Vec<f64> = grid.par_iter().map(|&t| eval(t)).collect::<Result<_>>()?;
    let v0 = vals[0];
    let scale = 1e-13 * (1.0 + v0.abs());
    if vals.iter().all(|v| (v - v0).abs() <= scale) {
        return Ok((0.0, v0));
    }
    let mut k = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[k] + scale {
            k = i;
        }
    }
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(TAU_GRID)];
    let f = |t: f64| eval(t).unwrap_or(f64::NEG_INFINITY);
    let (t, v) = golden(&f, lo, hi, 1e-10);
    if v > vals[k] + scale {
        Ok((t, v))
    } else {
        Ok((grid[k], vals[k]))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct XiOptimum {
    pub xi: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub hessian: Vec<Vec<f64>>,
    pub hessian_max_eig: f64,
    pub hessian_min_eig: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct XiSearch {
    pub maxima: Vec<XiOptimum>,
    /// `(start index, message)` for starts that did not converge.
    pub failures: Vec<(usize, String)>,
}

fn eig(h: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(h.clone())
}

/// Saddle-free Newton ascent from `start`. A converged point whose Hessian has
/// a positive eigenvalue is pushed off along that eigenvector.
pub fn newton_ascent(ve: &VectorEntropy, start: &[f64], lambda: f64) -> Result<XiOptimum> {
    let n = ve.dim();
    let mut xi = start.to_vec();
    let mut kicks = 0;
    for it in 0..MAX_NEWTON {
        let (v, g, h) = ve.derivatives(&xi, lambda)?;
        let e = eig(&h);
        let gnorm = g.norm();
        let max_eig = e.eigenvalues.max();
        if gnorm <= GRAD_TOL {
            if max_eig > 1e-8 && kicks < 8 {
                kicks += 1;
                let k = e.eigenvalues.imax();
                let dir = e.eigenvectors.column(k);
                let size = 1e-2 * (1.0 + DVector::from_column_slice(&xi).norm());
                xi = xi.iter().zip(dir.iter()).map(|(x, d)| x + size * d).collect();
                continue;
            }
            return Ok(XiOptimum {
                xi,
                value: v,
                gradient_norm: gnorm,
                hessian: (0..n).map(|i| (0..n).map(|j| h[(i, j)]).collect()).collect(),
                hessian_max_eig: max_eig,
                hessian_min_eig: e.eigenvalues.min(),
                iterations: it,
            });
        }
        // step = Σ (g·e_k)/|λ_k| e_k, which ascends for any curvature sign
        let mut step = DVector::zeros(n);
        for k in 0..n {
            let ek = e.eigenvectors.column(k);
            let lam = e.eigenvalues[k].abs().max(1e-8);
            step += ek * (ek.dot(&g) / lam);
        }
        let cap = 2.0 * (1.0 + DVector::from_column_slice(&xi).norm());
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = xi.iter().zip(step.iter()).map(|(x, s)| x + alpha * s).collect();
            match ve.value(&trial, lambda) {
                Ok(tv) if tv >= v - 1e-14 * (1.0 + v.abs()) => {
                    xi = trial;
                    moved = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !moved {
            return Err(Error::NonConvergence(format!("line search failed at iteration {it}, |∇| = {gnorm:e}")));
        }
    }
    Err(Error::NonConvergence(format!("no convergence after {MAX_NEWTON} Newton iterations")))
}

/// Local maxima of `ξ ↦ μ̌^λ(ξ)`, deduplicated. Starts are `ξ = 0`, the
/// points `±r/4 e_i` on the coordinate axes, and `multistart - 1` uniform
/// points in the box `[-r, r]^n` with `r` scaled to `P`.
pub fn maximize_over_xi(p: &Polytope, lambda: f64, multistart: usize, seed: u64) -> Result<XiSearch> {
    if multistart == 0 {
        return Err(Error::InvalidInput("multistart must be at least 1".into()));
    }
    let ve = VectorEntropy::new(p)?;
    let (lo, hi) = p.bounding_box();
    let width = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0f64, f64::max);
    let radius = 12.0 / width;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.dim();
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut x = vec![0.0; n];
            x[i] = sign * 0.25 * radius;
            starts.push(x);
        }
    }
    starts.extend((1..multistart).map(|_| (0..n).map(|_| rng.gen_range(-radius..radius)).collect::<Vec<f64>>()));
    let results: Vec<Result<XiOptimum>> = starts.par_iter().map(|s| newton_ascent(&ve, s, lambda)).collect();
    let mut maxima: Vec<XiOptimum> = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(opt) => {
                let dup = maxima.iter().any(|m| {
                    let d: f64 = m.xi.iter().zip(&opt.xi).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    d <= 1e-6 * (1.0 + opt.xi.iter().map(|x| x * x).sum::<f64>().sqrt())
                });
                if !dup {
                    maxima.push(opt);
                }
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    maxima.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| a.xi.partial_cmp(&b.xi).unwrap_or(std::cmp::Ordering::Equal)));
    Ok(XiSearch { maxima, failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    pub xi: Vec<f64>,
    pub value: f64,
    pub hessian_min_eig: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub lambda_grid: Vec<f64>,
    /// Best local maximum found at each `λ`.
    pub maximizers: Vec<BranchPoint>,
    /// Number of distinct local maxima at each `λ`.
    pub branch_count: Vec<usize>,
    /// Largest eigenvalue of the Hessian at `ξ = 0`.
    pub trivial_max_eig: Vec<f64>,
    /// `λ` where `ξ = 0` stops being a local maximum.
    pub transitions: Vec<f64>,
    /// False when `ξ = 0` is not a critical point (then `trivial_max_eig` is
    /// only informative).
    pub zero_is_critical: bool,
}

/// Scans `λ` on `steps + 1` points of `[lo, hi]`.
///
/// The Hessian at `ξ = 0` is `H_μ + λ Cov` with `Cov` positive definite, so
/// its top eigenvalue is increasing in `λ` and crosses zero at most once; the
/// crossing is refined by bisection to `1e-10`.
pub fn bifurcation_scan(p: &Polytope, lo: f64, hi: f64, steps: usize, multistart: usize, seed: u64) -> Result<ScanResult> {
    if !(lo < hi) || steps == 0 {
        return Err(Error::InvalidInput("need lo < hi and steps >= 1".into()));
    }
    let ve = VectorEntropy::new(p)?;
    let (h_mu, cov) = ve.hessian_at_zero_parts()?;
    let top = |lambda: f64| eig(&(&h_mu + &cov * lambda)).eigenvalues.max();
    let zero = vec![0.0; p.dim()];
    let zero_is_critical = ve.gradient(&zero, 0.0)?.norm() <= GRAD_TOL;
    let lambda_grid: Vec<f64> = (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect();
    let trivial_max_eig: Vec<f64> = lambda_grid.iter().map(|&l| top(l)).collect();
    let mut transitions = Vec::new();
    for k in 0..steps {
        let (a, b) = (trivial_max_eig[k], trivial_max_eig[k + 1]);
        if a < 0.0 && b >= 0.0 || a >= 0.0 && b < 0.0 {
            let (mut l, mut r) = (lambda_grid[k], lambda_grid[k + 1]);
            let neg_left = a < 0.0;
            while r - l > 1e-10 {
                let m = 0.5 * (l + r);
                if (top(m) < 0.0) == neg_left {
                    l = m;
                } else {
                    r = m;
                }
            }
            transitions.push(0.5 * (l + r));
        }
    }
    let per_lambda: Vec<Result<XiSearch>> = lambda_grid
        .par_iter()
        .enumerate()
        .map(|(k, &l)| maximize_over_xi(p, l, multistart, seed.wrapping_add(k as u64)))
        .collect();
    let mut maximizers = Vec::with_capacity(lambda_grid.len());
    let mut branch_count = Vec::with_capacity(lambda_grid.len());
    for (r, &l) in per_lambda.into_iter().zip(&lambda_grid) {
        let s = r?;
        branch_count.push(s.maxima.len());
        let best = s.maxima.first().ok_or_else(|| Error::NonConvergence(format!("no maximum found at λ = {l}")))?;
        maximizers.push(BranchPoint { xi: best.xi.clone(), value: best.value, hessian_min_eig: best.hessian_min_eig });
    }
    Ok(ScanResult { lambda_grid, maximizers, branch_count, trivial_max_eig, transitions, zero_is_critical })
}

/// Exact crossing `λ*` with `max eig(H_μ + λ* Cov) = 0`, when it exists.
pub fn transition_point(p: &Polytope) -> Result<Option<f64>> {
    let ve = VectorEntropy::new(p)?;
    let (h_mu, cov) = ve.hessian_at_zero_parts()?;
    if p.dim() == 1 {
        return Ok(Some(-h_mu[(0, 0)] / cov[(0, 0)]));
    }
    // generalized eigenproblem H_μ v = -λ Cov v through the Cholesky factor
    let l = cov.cholesky().ok_or_else(|| Error::NonConvergence("covariance not positive definite".into()))?;
    let linv = l.l().try_inverse().ok_or_else(|| Error::NonConvergence("singular Cholesky factor".into()))?;
    let m = &linv * &h_mu * linv.transpose();
    let ev = eig(&m).eigenvalues;
    Ok(Some(-ev.max()))
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationSearchResult {
    pub q: PLConvexFunction,
    pub tau: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn decode(x: &[f64], dim: usize, pieces: usize) -> (PLConvexFunction, f64) {
    let ps = (0..pieces)
        .map(|k| {
            let o = k * (dim + 1);
            AffinePiece { gradient: x[o..o + dim].to_vec(), constant: x[o + dim] }
        })
        .collect();
    let q = PLConvexFunction::new(ps).unwrap_or_else(|_| PLConvexFunction::zero(dim));
    (q, x[pieces * (dim + 1)].abs())
}

fn degeneration_value(p: &Polytope, x: &[f64], pieces: usize, lambda: f64) -> f64 {
    let (q, tau) = decode(x, p.dim(), pieces);
    let tc = match ToricTestConfig::normalized(p.clone(), q) {
        Ok(tc) => tc,
        Err(_) => return f64::NEG_INFINITY,
    };
    if tc.check_tau(tau).is_err() {
        return f64::NEG_INFINITY;
    }
    mu_lambda_na(&tc, EntropyParams { lambda, tau }).unwrap_or(f64::NEG_INFINITY)
}

/// Best-effort search over `q = max of n_pieces affine pieces` and `τ >= 0`
/// with Nelder-Mead restarts. Starts include the trivial configuration and
/// the product configuration of the best `ξ*`.
pub fn optimal_degeneration_search(
    p: &Polytope,
    lambda: f64,
    n_pieces: usize,
    restarts: usize,
    seed: u64,
) -> Result<DegenerationSearchResult> {
    if n_pieces == 0 {
        return Err(Error::InvalidInput("n_pieces must be at least 1".into()));
    }
    let dim = p.dim();
    let nvar = n_pieces * (dim + 1) + 1;
    let xi_best = maximize_over_xi(p, lambda, 4, seed)?.maxima.into_iter().next();
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; nvar]];
    if let Some(opt) = &xi_best {
        let mut x = vec![0.0; nvar];
        for k in 0..n_pieces {
            x[k * (dim + 1)..k * (dim + 1) + dim].copy_from_slice(&opt.xi);
        }
        x[nvar - 1] = 1.0;
        starts.push(x);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..restarts {
        let mut x: Vec<f64> = (0..nvar - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
        x.push(rng.gen_range(0.0..3.0));
        starts.push(x);
    }
    let runs: Vec<nelder_mead::NelderMeadResult> = starts
        .par_iter()
        .map(|s| nelder_mead::maximize(|x| degeneration_value(p, x, n_pieces, lambda), s, 0.5, 1e-13, 4000))
        .collect();
    let mut best: Option<&nelder_mead::NelderMeadResult> = None;
    for r in &runs {
        if best.map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    let best = best.ok_or_else(|| Error::NonConvergence("no start evaluated".into()))?;
    let (q, tau) = decode(&best.x, dim, n_pieces);
    let m = q.max_on(p);
    Ok(DegenerationSearchResult {
        q: q.shifted(-m),
        tau,
        value: best.value,
        iterations: runs.iter().map(|r| r.iterations).sum(),
        converged: best.converged,
    })
}
