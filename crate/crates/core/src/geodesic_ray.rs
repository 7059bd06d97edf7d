//! Toric geodesic rays on the projective line.
//!
//! In the moment coordinate a geodesic ray is linear in the symplectic
//! potential: `u_t = u₀ + tτ q̃` with `q̃` a C²-mollification of the PL
//! function `q`. Its momentum `-φ̇_t` is `τ q̃` in the moment coordinate.
//! The W-entropy is evaluated in weak form,
//!
//! ```text
//! ∫(s + π v f'²) e^f dx = 2π (e^{f(0)} + e^{f(a)}) - π ∫ v f'' e^f dx,
//! ```
//!
//! which only needs `v = 1/u''` and is exact for the Guillemin boundary
//! behaviour `v(0) = v(a) = 0`, `v'(0) = -v'(a) = 2`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exp_integrals::PLConvexFunction;
use crate::na_entropy::{mu_lambda_na, EntropyParams, ToricTestConfig};
use crate::polytope::Polytope;
use crate::toric_metric::cheb::gauss_legendre;
use crate::toric_metric::SymplecticPotential1D;

pub const DEFAULT_EPS: f64 = 1e-3;
const GL_NODES: usize = 32;
/// Breakpoints in the kernel variable `r ∈ [-1, 1]`, graded toward `±1`
/// where `v` switches between the two scales.
const R_BREAKS: [f64; 13] = [-1.0, -0.999, -0.99, -0.95, -0.8, -0.5, 0.0, 0.5, 0.8, 0.95, 0.99, 0.999, 1.0];

/// `ρ(r) = (35/32)(1 - r²)³` on `[-1, 1]` and its first two derivatives.
fn kernel(r: f64) -> [f64; 3] {
    if r.abs() >= 1.0 {
        return [0.0; 3];
    }
    let s = 1.0 - r * r;
    let c = 35.0 / 32.0;
    [c * s * s * s, -6.0 * c * r * s * s, c * (-6.0 * s * s + 24.0 * r * r * s)]
}

/// `∫_{-1}^r ρ`.
fn kernel_cdf(r: f64) -> f64 {
    if r <= -1.0 {
        return 0.0;
    }
    if r >= 1.0 {
        return 1.0;
    }
    let r2 = r * r;
    0.5 + 35.0 / 32.0 * r * (1.0 - r2 + 0.6 * r2 * r2 - r2 * r2 * r2 / 7.0)
}

/// `∫_{-1}^r (r - s) ρ(s) ds`, the mollified ramp in kernel units.
fn kernel_ramp(r: f64) -> f64 {
    if r <= -1.0 {
        return 0.0;
    }
    if r >= 1.0 {
        return r;
    }
    let r2 = r * r;
    let r4 = r2 * r2;
    0.5 * r + 35.0 / 32.0 * (0.5 * r2 - 0.25 * r4 + 0.1 * r4 * r2 - r4 * r4 / 56.0) + 0.5 - 93.0 / 256.0
}

/// A convex PL function of one variable, `g₀x + c₀ + Σ Δ_k max(0, x - x_k)`,
/// with each kink smoothed by `ρ` at width `ε`.
#[derive(Clone, Debug, Serialize)]
pub struct MollifiedPL {
    pub slope: f64,
    pub constant: f64,
    /// `(x_k, Δ_k)` with `Δ_k > 0`, increasing `x_k`.
    pub kinks: Vec<(f64, f64)>,
    pub eps: f64,
}

impl MollifiedPL {
    /// Upper envelope of `q` on `[0, a]`; kinks outside `(0, a)` are dropped.
    pub fn new(q: &PLConvexFunction, a: f64, eps: f64) -> Result<Self> {
        if q.dim() != 1 {
            return Err(Error::UnsupportedDimension(q.dim()));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidInput(format!("smoothing width must be positive, got {eps}")));
        }
        let piece = |i: usize| (q.pieces[i].gradient[0], q.pieces[i].constant);
        let val = |i: usize, x: f64| piece(i).0 * x + piece(i).1;
        let n = q.pieces.len();
        let top = (0..n).map(|i| val(i, 0.0)).fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-13 * (1.0 + top.abs());
        // active piece at 0+: largest value, then largest slope
        let mut cur = (0..n)
            .filter(|&i| val(i, 0.0) >= top - tol)
            .max_by(|&i, &j| piece(i).0.total_cmp(&piece(j).0))
            .unwrap_or(0);
        let mut x = 0.0;
        let mut kinks = Vec::new();
        loop {
            let (gi, ci) = piece(cur);
            let mut next: Option<(f64, usize)> = None;
            for j in 0..n {
                let (gj, cj) = piece(j);
                if gj <= gi {
                    continue;
                }
                let xj = ((ci - cj) / (gj - gi)).max(x);
                let better = match next {
                    None => true,
                    Some((xb, b)) => xj < xb || (xj == xb && gj > piece(b).0),
                };
                if better {
                    next = Some((xj, j));
                }
            }
            match next {
                Some((xj, j)) if xj < a => {
                    kinks.push((xj, piece(j).0 - gi));
                    x = xj;
                    cur = j;
                }
                _ => break,
            }
        }
        let (slope, constant) = {
            let first = (0..n)
                .filter(|&i| val(i, 0.0) >= top - tol)
                .max_by(|&i, &j| piece(i).0.total_cmp(&piece(j).0))
                .unwrap_or(0);
            piece(first)
        };
        // a kink at 0 only changes the slope
        let mut out = MollifiedPL { slope, constant, kinks: Vec::new(), eps };
        for (xk, d) in kinks {
            if xk <= 0.0 {
                out.slope += d;
            } else {
                out.kinks.push((xk, d));
            }
        }
        Ok(out)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.slope * x + self.constant;
        for &(xk, d) in &self.kinks {
            v += d * self.eps * kernel_ramp((x - xk) / self.eps);
        }
        v
    }

    /// `k`-th derivative for `k = 1..=4`.
    pub fn deriv(&self, x: f64, k: usize) -> f64 {
        let mut v = if k == 1 { self.slope } else { 0.0 };
        for &(xk, d) in &self.kinks {
            let r = (x - xk) / self.eps;
            v += d * match k {
                1 => kernel_cdf(r),
                2 => kernel(r)[0] / self.eps,
                3 => kernel(r)[1] / (self.eps * self.eps),
                _ => kernel(r)[2] / (self.eps * self.eps * self.eps),
            };
        }
        v
    }

    /// Integration breakpoints on `[0, a]`: the kink supports, graded toward
    /// their edges.
    pub fn breakpoints(&self, a: f64) -> Vec<f64> {
        let mut b = vec![0.0, a];
        for &(xk, _) in &self.kinks {
            for r in R_BREAKS {
                let x = xk + r * self.eps;
                if x > 0.0 && x < a {
                    b.push(x);
                }
            }
        }
        b.sort_by(|x, y| x.total_cmp(y));
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-15 * a);
        b
    }
}

/// Composite Gauss-Legendre rule on `[0, a]` split at `breaks`.
fn composite_rule(breaks: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(n);
    let mut xs = Vec::with_capacity(n * breaks.len());
    let mut ws = Vec::with_capacity(n * breaks.len());
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = 0.5 * (hi - lo);
        for (x, wt) in gx.iter().zip(&gw) {
            xs.push(lo + h * (1.0 + x));
            ws.push(h * wt);
        }
    }
    (xs, ws)
}

#[derive(Clone, Debug)]
pub struct ToricRay {
    pub u0: SymplecticPotential1D,
    pub q: PLConvexFunction,
    pub tau: f64,
    pub smoothing_eps: f64,
    mollified: MollifiedPL,
    config: ToricTestConfig,
}

impl ToricRay {
    /// `smoothing_eps` is absolute; [`DEFAULT_EPS`]`·a` is the usual choice.
    pub fn new(u0: SymplecticPotential1D, q: PLConvexFunction, tau: f64, smoothing_eps: f64) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::NegativeTau(tau));
        }
        let a = u0.a();
        let config = ToricTestConfig::new(Polytope::interval_f64(a)?, q.clone())?;
        config.check_tau(tau)?;
        let mollified = MollifiedPL::new(&q, a, smoothing_eps)?;
        Ok(ToricRay { u0, q, tau, smoothing_eps, mollified, config })
    }

    pub fn with_default_eps(u0: SymplecticPotential1D, q: PLConvexFunction, tau: f64) -> Result<Self> {
        let eps = DEFAULT_EPS * u0.a();
        Self::new(u0, q, tau, eps)
    }

    pub fn a(&self) -> f64 {
        self.u0.a()
    }

    pub fn mollified(&self) -> &MollifiedPL {
        &self.mollified
    }

    pub fn config(&self) -> &ToricTestConfig {
        &self.config
    }

    /// The same ray with smoothing width `eps`.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.u0.clone(), self.q.clone(), self.tau, eps)
    }

    /// Non-archimedean value the W-entropy approaches along the ray.
    pub fn na_limit(&self, lambda: f64) -> Result<f64> {
        mu_lambda_na(&self.config, EntropyParams { lambda, tau: self.tau })
    }
}

/// Metric and momentum at time `t` on a ray.
#[derive(Clone, Copy, Debug)]
pub struct RayState<'a> {
    pub ray: &'a ToricRay,
    pub t: f64,
}

pub fn ray_state(ray: &ToricRay, t: f64) -> Result<RayState<'_>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("ray time must be nonnegative, got {t}")));
    }
    let st = RayState { ray, t };
    let a = ray.a();
    let (xs, _) = composite_rule(&ray.mollified.breakpoints(a), 8);
    for x in xs {
        let g = st.geometry_extra(x);
        if !(ray.u0.geometry_plus(x, g).w > 0.0) {
            return Err(Error::ConvexityLoss { t, x });
        }
    }
    Ok(st)
}

impl RayState<'_> {
    fn speed(&self) -> f64 {
        self.t * self.ray.tau
    }

    fn geometry_extra(&self, x: f64) -> [f64; 3] {
        let m = &self.ray.mollified;
        let s = self.speed();
        [s * m.deriv(x, 2), s * m.deriv(x, 3), s * m.deriv(x, 4)]
    }

    /// `f_t(x) = τ q̃(x)`.
    pub fn momentum(&self, x: f64) -> f64 {
        self.ray.tau * self.ray.mollified.eval(x)
    }

    pub fn momentum_deriv(&self, x: f64, k: usize) -> f64 {
        self.ray.tau * self.ray.mollified.deriv(x, k)
    }

    pub fn u(&self, x: f64) -> f64 {
        self.ray.u0.u(x) + self.speed() * self.ray.mollified.eval(x)
    }

    pub fn du(&self, x: f64) -> f64 {
        self.ray.u0.du(x) + self.speed() * self.ray.mollified.deriv(x, 1)
    }

    pub fn d2u(&self, x: f64) -> f64 {
        let g = self.ray.u0.geometry_plus(x, self.geometry_extra(x));
        g.w / g.p
    }

    /// `v = 1/u_t''` with two derivatives.
    pub fn v_derivs(&self, x: f64) -> (f64, f64, f64) {
        self.ray.u0.v_derivs_plus(x, self.geometry_extra(x))
    }

    pub fn scalar_curvature(&self, x: f64) -> f64 {
        -PI * self.v_derivs(x).2
    }

    /// `Ŵ^λ(ω_t, f_t)` in weak form on a composite Gauss-Legendre rule.
    pub fn w_entropy(&self, lambda: f64) -> f64 {
        self.w_entropy_with(lambda, GL_NODES)
    }

    pub fn w_entropy_with(&self, lambda: f64, nodes: usize) -> f64 {
        let a = self.ray.a();
        let (xs, ws) = composite_rule(&self.ray.mollified.breakpoints(a), nodes);
        let f: Vec<f64> = xs.iter().map(|&x| self.momentum(x)).collect();
        let (f0, fa) = (self.momentum(0.0), self.momentum(a));
        let m = f.iter().copied().fold(f0.max(fa), f64::max);
        let (mut z, mut zf, mut k) = (0.0, 0.0, 0.0);
        for ((&x, &w), &fi) in xs.iter().zip(&ws).zip(&f) {
            let e = w * (fi - m).exp();
            z += e;
            zf += fi * e;
            let f2 = self.momentum_deriv(x, 2);
            if f2 != 0.0 {
                k += self.v_derivs(x).0 * f2 * e;
            }
        }
        let boundary = 2.0 * PI * ((f0 - m).exp() + (fa - m).exp());
        -(boundary - PI * k - lambda * (z + zf)) / z - lambda * (z.ln() + m)
    }

    /// Solves `u_t'(x) = y` for `x`, returning `(x, a - x)` without
    /// cancellation near either endpoint.
    pub fn moment_of(&self, y: f64) -> (f64, f64) {
        let a = self.ray.a();
        let split = |z: f64| {
            // x = a·logistic(z), a - x = a·logistic(-z)
            let (x, ax) = if z >= 0.0 {
                let e = (-z).exp();
                (a / (1.0 + e), a * e / (1.0 + e))
            } else {
                let e = z.exp();
                (a * e / (1.0 + e), a / (1.0 + e))
            };
            (x, ax)
        };
        // u_t'(x) = z/2 + (bounded part); bracket z from the bound
        let bounded = |x: f64| self.ray.u0.phi(x, 1) + self.speed() * self.ray.mollified.deriv(x, 1);
        let g = |z: f64| {
            let (x, _) = split(z);
            0.5 * z + bounded(x) - y
        };
        let mut lo = 2.0 * (y - bounded(0.0).max(bounded(a))) - 1.0;
        let mut hi = 2.0 * (y - bounded(0.0).min(bounded(a))) + 1.0;
        while g(lo) > 0.0 {
            lo -= hi - lo;
        }
        while g(hi) < 0.0 {
            hi += hi - lo;
        }
        let mut z = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (x, ax) = split(z);
            let gz = g(z);
            if gz > 0.0 {
                hi = z;
            } else {
                lo = z;
            }
            // dg/dz = u_t''(x) · x(a - x)/a
            let dg = self.d2u(x) * x * ax / a;
            let mut zn = z - gz / dg;
            if !(zn > lo && zn < hi) || !zn.is_finite() {
                zn = 0.5 * (lo + hi);
            }
            if (zn - z).abs() <= 1e-15 * (1.0 + z.abs()) || hi - lo <= 1e-15 * (1.0 + z.abs()) {
                z = zn;
                break;
            }
            z = zn;
        }
        split(z)
    }

    /// Legendre dual `φ_t(y) = x y - u_t(x)` at `y = u_t'(x)`.
    pub fn kahler_potential(&self, y: f64) -> f64 {
        let (x, ax) = self.moment_of(y);
        let u0 = &self.ray.u0;
        let xlx = |s: f64| if s <= 0.0 { 0.0 } else { s * s.ln() };
        let u = 0.5 * (xlx(x) + xlx(ax)) + u0.phi(x, 0) + self.speed() * self.ray.mollified.eval(x);
        x * y - u
    }
}

/// `∂_t φ_t(y)` by a five-point stencil in `t` (one-sided near `t = 0`).
fn phi_dot(ray: &ToricRay, t: f64, y: f64, h: f64) -> f64 {
    let at = |s: f64| RayState { ray, t: s }.kahler_potential(y);
    if t >= 2.0 * h {
        (-at(t + 2.0 * h) + 8.0 * at(t + h) - 8.0 * at(t - h) + at(t - 2.0 * h)) / (12.0 * h)
    } else {
        (-25.0 * at(t) + 48.0 * at(t + h) - 36.0 * at(t + 2.0 * h) + 16.0 * at(t + 3.0 * h) - 3.0 * at(t + 4.0 * h))
            / (12.0 * h)
    }
}

/// `c₀(t) = ∫ e^{-φ̇_t} dy/u_t''` and `c₁(t) = ∫ (-φ̇_t) e^{-φ̇_t} dy/u_t''`
/// over the real line of the Kähler coordinate `y`.
///
/// The `y`-nodes are the images `u_t'(x_j)` of a composite rule in `x`; at each
/// node the moment coordinate is recovered by inverting `u_t'`, and `φ̇_t` is a
/// finite difference of the Legendre dual at fixed `y`.
pub fn conserved_integrals(ray: &ToricRay, t: f64, nodes: usize) -> Result<(f64, f64)> {
    let st = ray_state(ray, t)?;
    let a = ray.a();
    let (xs, ws) = composite_rule(&ray.mollified.breakpoints(a), nodes);
    let h = 1e-5 / (1.0 + ray.tau);
    let mut c0 = 0.0;
    let mut c1 = 0.0;
    for (&x, &w) in xs.iter().zip(&ws) {
        let y = st.du(x);
        let wy = w * st.d2u(x);
        let (xr, _) = st.moment_of(y);
        let theta = -phi_dot(ray, t, y, h);
        let dens = wy / st.d2u(xr);
        let e = theta.exp();
        c0 += e * dens;
        c1 += theta * e * dens;
    }
    Ok((c0, c1))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservationDrift {
    pub c0: f64,
    pub c1: f64,
}

/// Maximal relative deviation of `c₀`, `c₁` from their `t = 0` values over
/// `t_grid` (`c₁` is measured against `c₀`, its natural scale).
pub fn conservation_drift(ray: &ToricRay, t_grid: &[f64], nodes: usize) -> Result<ConservationDrift> {
    let vals: Vec<(f64, f64)> = t_grid.par_iter().map(|&t| conserved_integrals(ray, t, nodes)).collect::<Result<_>>()?;
    let (b0, b1) = conserved_integrals(ray, 0.0, nodes)?;
    let mut d = ConservationDrift { c0: 0.0, c1: 0.0 };
    for (v0, v1) in vals {
        d.c0 = d.c0.max((v0 - b0).abs() / b0.abs());
        d.c1 = d.c1.max((v1 - b1).abs() / b1.abs().max(b0.abs()));
    }
    Ok(d)
}

#[derive(Clone, Debug, Serialize)]
pub struct RayTrace {
    pub t_grid: Vec<f64>,
    pub w: Vec<f64>,
    pub c0: Vec<f64>,
    pub c1: Vec<f64>,
    /// `max(0, max_k (W_{k+1} - W_k))`.
    pub max_upward: f64,
    /// Per step: `W_{k+1} <= W_k + 1e-6 (1 + |W_0|)`.
    pub monotone: Vec<bool>,
    pub na_limit: f64,
}

pub fn w_along_ray(ray: &ToricRay, lambda: f64, t_grid: &[f64]) -> Result<RayTrace> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("t grid must be nonempty and increasing".into()));
    }
    let rows: Vec<(f64, f64, f64)> = t_grid
        .par_iter()
        .map(|&t| {
            let st = ray_state(ray, t)?;
            let (c0, c1) = conserved_integrals(ray, t, GL_NODES)?;
            Ok((st.w_entropy(lambda), c0, c1))
        })
        .collect::<Result<_>>()?;
    let w: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let tol = 1e-6 * (1.0 + w[0].abs());
    let monotone: Vec<bool> = w.windows(2).map(|p| p[1] <= p[0] + tol).collect();
    let max_upward = w.windows(2).map(|p| p[1] - p[0]).fold(0.0f64, f64::max);
    Ok(RayTrace {
        t_grid: t_grid.to_vec(),
        c0: rows.iter().map(|r| r.1).collect(),
        c1: rows.iter().map(|r| r.2).collect(),
        w,
        max_upward,
        monotone,
        na_limit: ray.na_limit(lambda)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;
    use crate::exp_integrals::AffinePiece;
    use crate::na_entropy::vector_mu_entropy;
    use crate::toric_metric::ToricMetric;

    fn two_piece(a: f64) -> PLConvexFunction {
        PLConvexFunction::new(vec![
            AffinePiece { gradient: vec![-1.0], constant: 0.0 },
            AffinePiece { gradient: vec![1.5], constant: -1.5 * a },
        ])
        .unwrap()
    }

    #[test]
    fn mollifier_pieces_are_consistent() {
        // ramp' = cdf, cdf' = kernel
        for r in [-0.9, -0.3, 0.0, 0.4, 0.95] {
            let h = 1e-6;
            assert!(((kernel_ramp(r + h) - kernel_ramp(r - h)) / (2.0 * h) - kernel_cdf(r)).abs() < 1e-9);
            assert!(((kernel_cdf(r + h) - kernel_cdf(r - h)) / (2.0 * h) - kernel(r)[0]).abs() < 1e-8);
        }
        assert!((kernel_ramp(1.0) - 1.0).abs() < 1e-15 && kernel_ramp(-1.0).abs() < 1e-15);
        let m = MollifiedPL::new(&two_piece(1.0), 1.0, 0.05).unwrap();
        assert_eq!(m.kinks.len(), 1);
        let q = two_piece(1.0);
        for x in [0.0, 0.2, 0.7, 1.0] {
            assert!((m.eval(x) - q.eval(&[x])).abs() < 1e-14);
        }
        assert!(m.eval(m.kinks[0].0) > q.eval(&[m.kinks[0].0]));
    }

    #[test]
    fn weak_form_matches_strong_form() {
        let u0 = SymplecticPotential1D::random(1.0, 6, 0.4, 2).unwrap();
        let ray = ToricRay::new(u0, two_piece(1.0), 1.3, 0.1).unwrap();
        for t in [0.0, 0.5, 3.0] {
            let st = ray_state(&ray, t).unwrap();
            let (xs, ws) = composite_rule(&ray.mollified.breakpoints(1.0), 48);
            let f: Vec<f64> = xs.iter().map(|&x| st.momentum(x)).collect();
            let z: f64 = ws.iter().zip(&f).map(|(w, f)| w * f.exp()).sum();
            let lambda = -2.0;
            let num: f64 = xs
                .iter()
                .zip(&ws)
                .zip(&f)
                .map(|((&x, &w), &fi)| {
                    let df = st.momentum_deriv(x, 1);
                    w * (st.scalar_curvature(x) + PI * st.v_derivs(x).0 * df * df - lambda * (1.0 + fi)) * fi.exp()
                })
                .sum();
            let strong = -num / z - lambda * z.ln();
            assert!((strong - st.w_entropy(lambda)).abs() < 1e-9, "t={t}: {strong} vs {}", st.w_entropy(lambda));
        }
    }

    #[test]
    fn linear_q_is_a_product() {
        let a = 2.0;
        let q = PLConvexFunction::affine(vec![0.7], -1.4);
        let ray = ToricRay::with_default_eps(SymplecticPotential1D::fubini_study(a).unwrap(), q, 1.5).unwrap();
        let p = Polytope::interval(q_int(2)).unwrap();
        let want = vector_mu_entropy(&p, &[0.7 * 1.5], -3.0).unwrap();
        for t in [0.0, 7.0, 40.0] {
            let w = ray_state(&ray, t).unwrap().w_entropy(-3.0);
            assert!((w - want).abs() < 1e-10, "{w} vs {want}");
        }
        // the same number from the spectral metric at t = 0
        let m = ToricMetric::with_default_grid(&ray.u0).unwrap();
        let f = m.momentum(|x| 1.5 * (0.7 * x - 1.4));
        assert!((m.w_entropy(&f, -3.0).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn legendre_inversion_round_trips() {
        let u0 = SymplecticPotential1D::random(1.0, 6, 0.4, 4).unwrap();
        let ray = ToricRay::with_default_eps(u0, two_piece(1.0), 2.0).unwrap();
        let st = ray_state(&ray, 5.0).unwrap();
        for x in [1e-9, 0.1, 0.5999, 0.6, 0.6004, 0.9, 1.0 - 1e-9] {
            let (xr, axr) = st.moment_of(st.du(x));
            assert!((xr - x).abs() <= 1e-12 * (1.0 + x) && (axr - (1.0 - x)).abs() <= 1e-12, "{x}: {xr}");
        }
    }

    #[test]
    fn ray_decreases_toward_na_value() {
        let u0 = SymplecticPotential1D::random(1.0, 6, 0.3, 6).unwrap();
        let ray = ToricRay::with_default_eps(u0, two_piece(1.0), 1.0).unwrap();
        let grid: Vec<f64> = (0..=40).map(|k| k as f64).collect();
        let tr = w_along_ray(&ray, -1.0, &grid).unwrap();
        assert!(tr.monotone.iter().all(|&b| b), "{:?}", tr.w);
        assert!((tr.w[40] - tr.na_limit).abs() < 1e-3, "{} vs {}", tr.w[40], tr.na_limit);
        let d = conservation_drift(&ray, &[0.0, 5.0, 20.0], GL_NODES).unwrap();
        assert!(d.c0 < 1e-6 && d.c1 < 1e-6, "{d:?}");
    }
}
