//! Non-archimedean μ-entropy of toric test configurations.
//!
//! A toric test configuration is a pair `(P, q)` with `q <= 0` convex
//! piecewise linear on `P`. Its entropies at speed `τ` are
//!
//! ```text
//! μ_NA  = -2π ∫_∂P e^{τq} dσ / ∫_P e^{τq} dμ
//! σ_NA  = ∫_P (n + τq) e^{τq} dμ / ∫_P e^{τq} dμ - log ∫_P e^{τq} dμ
//! ```
//!
//! with `dσ` the lattice-normalized boundary measure.

mod dh;
mod vector;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exp_integrals::{Decomposition, IntegralBundle, PLConvexFunction, Region};
use crate::polytope::Polytope;
pub use dh::{dh_measure, norm_squared, DHMeasure};
pub use vector::{vector_mu_entropy, TiltedMoments, VectorEntropy};

#[derive(Clone, Debug)]
pub struct ToricTestConfig {
    polytope: Polytope,
    q: PLConvexFunction,
    decomposition: Decomposition,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyParams {
    pub lambda: f64,
    pub tau: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NAEntropy {
    pub mu: f64,
    pub sigma: f64,
    pub mu_lambda: f64,
}

impl ToricTestConfig {
    /// Requires `q <= 0` on `P` (up to rounding).
    pub fn new(polytope: Polytope, q: PLConvexFunction) -> Result<Self> {
        if q.dim() != polytope.dim() {
            return Err(Error::DimensionMismatch { expected: polytope.dim(), got: q.dim() });
        }
        let max = q.max_on(&polytope);
        let scale = 1.0 + q.min_on_vertices(&polytope).abs();
        if max > 1e-12 * scale {
            return Err(Error::PositiveOnPolytope(max));
        }
        let decomposition = Decomposition::new(&polytope, &q)?;
        Ok(ToricTestConfig { polytope, q, decomposition })
    }

    /// Shifts `q` by a constant so that its maximum on `P` is zero.
    pub fn normalized(polytope: Polytope, q: PLConvexFunction) -> Result<Self> {
        if q.dim() != polytope.dim() {
            return Err(Error::DimensionMismatch { expected: polytope.dim(), got: q.dim() });
        }
        let m = q.max_on(&polytope);
        ToricTestConfig::new(polytope, q.shifted(-m))
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn q(&self) -> &PLConvexFunction {
        &self.q
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    /// Rejects `τ` for which `τ·min q` leaves the safe exponent range.
    pub fn check_tau(&self, tau: f64) -> Result<()> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::NegativeTau(tau));
        }
        let lo = tau * self.q.min_on_vertices(&self.polytope);
        crate::exp_integrals::kernel::check_exponent(lo)
    }

    pub fn bundle(&self, tau: f64) -> Result<IntegralBundle> {
        self.check_tau(tau)?;
        self.decomposition.bundle(tau, false)
    }
}

fn entropy_from_bundle(n: usize, b: &IntegralBundle, lambda: f64) -> NAEntropy {
    let mu = -2.0 * PI * b.b0 / b.i0;
    let sigma = n as f64 + b.i1 / b.i0 - b.i0.ln();
    NAEntropy { mu, sigma, mu_lambda: mu + lambda * sigma }
}

pub fn check_mu_na(tc: &ToricTestConfig, tau: f64) -> Result<f64> {
    Ok(na_entropy(tc, EntropyParams { lambda: 0.0, tau })?.mu)
}

pub fn check_sigma(tc: &ToricTestConfig, tau: f64) -> Result<f64> {
    Ok(na_entropy(tc, EntropyParams { lambda: 0.0, tau })?.sigma)
}

pub fn mu_lambda_na(tc: &ToricTestConfig, params: EntropyParams) -> Result<f64> {
    Ok(na_entropy(tc, params)?.mu_lambda)
}

pub fn na_entropy(tc: &ToricTestConfig, params: EntropyParams) -> Result<NAEntropy> {
    let b = tc.bundle(params.tau)?;
    Ok(entropy_from_bundle(tc.dim(), &b, params.lambda))
}

/// The toric functional with exponent `<ξ,μ> + τq` evaluated on the cells of
/// `q`. Any real `τ` is allowed; for `τ >= 0` this is the μ-entropy of the
/// tilted configuration, and its `τ`-derivative at zero gives the μ-Futaki
/// invariant.
pub fn tilted_mu_lambda(decomp: &Decomposition, xi: &[f64], tau: f64, lambda: f64) -> Result<f64> {
    let shift = tilt_shift(decomp, xi, tau);
    let q = &decomp.q;
    let e = |i: usize, x: &[f64]| dot(xi, x) + tau * q.pieces[i].eval(x) - shift;
    let i0 = decomp.integrate(Region::Interior, &e, &[])?;
    let i1 = decomp.integrate(Region::Interior, &e, &[&e])?;
    let b0 = decomp.integrate(Region::Boundary, &e, &[])?;
    let b = IntegralBundle { i0, i1, b0, moment: None };
    Ok(entropy_from_bundle(decomp.dim, &b, lambda).mu_lambda)
}

fn tilt_shift(decomp: &Decomposition, xi: &[f64], tau: f64) -> f64 {
    let q = &decomp.q;
    decomp
        .interior
        .iter()
        .flat_map(|c| c.simplices.iter().flat_map(move |s| s.vertices.iter().map(move |v| (c.piece, v))))
        .map(|(i, v)| dot(xi, v) + tau * q.pieces[i].eval(v))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// μ-Futaki invariant of the direction `q` at the vector `ξ`: minus the
/// `τ`-derivative at `τ = 0` of [`tilted_mu_lambda`], in closed form.
pub fn mu_futaki(p: &Polytope, xi: &[f64], direction: &PLConvexFunction, lambda: f64) -> Result<f64> {
    if xi.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: xi.len() });
    }
    let decomp = Decomposition::new(p, direction)?;
    let shift = tilt_shift(&decomp, xi, 0.0);
    let q = &decomp.q;
    let e = |_: usize, x: &[f64]| dot(xi, x) - shift;
    let qf = |i: usize, x: &[f64]| q.pieces[i].eval(x);
    let i0 = decomp.integrate(Region::Interior, &e, &[])?;
    let i0d = decomp.integrate(Region::Interior, &e, &[&qf])?;
    let i1 = decomp.integrate(Region::Interior, &e, &[&e])?;
    let i1d = i0d + decomp.integrate(Region::Interior, &e, &[&e, &qf])?;
    let b0 = decomp.integrate(Region::Boundary, &e, &[])?;
    let b0d = decomp.integrate(Region::Boundary, &e, &[&qf])?;
    let dmu = -2.0 * PI * (b0d * i0 - b0 * i0d) / (i0 * i0);
    let dsigma = (i1d * i0 - i1 * i0d) / (i0 * i0) - i0d / i0;
    Ok(-(dmu + lambda * dsigma))
}

/// `(L^n) = n!·vol(P)`.
pub fn top_intersection(p: &Polytope) -> f64 {
    (1..=p.dim()).map(|k| k as f64).product::<f64>() * p.volume_f64()
}

/// `C_NA(τ) = -(4π M τ + ‖·‖² τ²) / (2 (L^n))`.
pub fn c_na_quadratic(l_n: f64, norm2: f64, m_na: f64, tau: f64) -> f64 {
    -(4.0 * PI * m_na * tau + norm2 * tau * tau) / (2.0 * l_n)
}

/// Maximum of [`c_na_quadratic`] over `τ >= 0`: `τ* = -2πM/‖·‖²`,
/// value `2π² M² / ((L^n) ‖·‖²)` when `M < 0`, else `(0, 0)`.
pub fn max_c_na_quadratic(l_n: f64, norm2: f64, m_na: f64) -> Result<(f64, f64)> {
    if m_na >= 0.0 {
        return Ok((0.0, 0.0));
    }
    if norm2 <= 0.0 {
        return Err(Error::NormZero);
    }
    let tau = -2.0 * PI * m_na / norm2;
    Ok((tau, 2.0 * PI * PI * m_na * m_na / (l_n * norm2)))
}

pub fn c_na(tc: &ToricTestConfig, tau: f64, m_na: f64) -> f64 {
    c_na_quadratic(top_intersection(tc.polytope()), norm_squared(tc), m_na, tau)
}

pub fn max_c_na(tc: &ToricTestConfig, m_na: f64) -> Result<(f64, f64)> {
    max_c_na_quadratic(top_intersection(tc.polytope()), norm_squared(tc), m_na)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;
    use crate::exp_integrals::AffinePiece;

    fn unit() -> Polytope {
        Polytope::interval(q_int(1)).unwrap()
    }

    #[test]
    fn tau_zero_is_boundary_over_volume() {
        let tc = ToricTestConfig::new(unit(), PLConvexFunction::affine(vec![1.0], -1.0)).unwrap();
        assert!((check_mu_na(&tc, 0.0).unwrap() + 4.0 * PI).abs() < 1e-14);
        assert!((check_sigma(&tc, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for a in [2i64, 5] {
            let tc = ToricTestConfig::new(Polytope::interval(q_int(a)).unwrap(), PLConvexFunction::zero(1)).unwrap();
            let want = -4.0 * PI / a as f64;
            assert!((check_mu_na(&tc, 1.3).unwrap() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn sigma_symbolic_oracle() {
        let tc = ToricTestConfig::new(unit(), PLConvexFunction::affine(vec![1.0], -1.0)).unwrap();
        let e = (-1.0f64).exp();
        let (i0, i1) = (1.0 - e, -1.0 + 2.0 * e);
        let want = (i0 + i1) / i0 - i0.ln();
        assert!((check_sigma(&tc, 1.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn rejects_positive_q() {
        let err = ToricTestConfig::new(unit(), PLConvexFunction::affine(vec![1.0], 0.0)).unwrap_err();
        assert!(matches!(err, Error::PositiveOnPolytope(_)));
    }

    #[test]
    fn futaki_hand_value_vanishes() {
        let q = PLConvexFunction::affine(vec![1.0], -1.0);
        let f = mu_futaki(&unit(), &[0.0], &q, 0.0).unwrap();
        assert!(f.abs() < 1e-14, "{f}");
    }

    #[test]
    fn futaki_matches_central_difference() {
        let p = Polytope::from_vertices(vec![
            vec![q_int(0), q_int(0)],
            vec![q_int(2), q_int(0)],
            vec![q_int(0), q_int(1)],
        ])
        .unwrap();
        let q = PLConvexFunction::new(vec![
            AffinePiece { gradient: vec![0.5, 0.0], constant: -1.0 },
            AffinePiece { gradient: vec![-0.3, 0.7], constant: -1.2 },
        ])
        .unwrap();
        let xi = [0.4, -0.8];
        let d = Decomposition::new(&p, &q).unwrap();
        let h = 1e-5;
        let fd = -(tilted_mu_lambda(&d, &xi, h, -2.0).unwrap() - tilted_mu_lambda(&d, &xi, -h, -2.0).unwrap()) / (2.0 * h);
        let an = mu_futaki(&p, &xi, &q, -2.0).unwrap();
        assert!((fd - an).abs() < 1e-8 * (1.0 + an.abs()), "{fd} vs {an}");
    }

    #[test]
    fn c_na_maximum_is_the_vertex_of_the_parabola() {
        let (t, v) = max_c_na_quadratic(1.0, 1.0 / 12.0, -1.0).unwrap();
        assert!((t - 24.0 * PI).abs() < 1e-12);
        assert!((v - 24.0 * PI * PI).abs() < 1e-9);
        assert!((c_na_quadratic(1.0, 1.0 / 12.0, -1.0, t) - v).abs() < 1e-9);
        assert_eq!(max_c_na_quadratic(1.0, 0.5, 0.0).unwrap(), (0.0, 0.0));
        assert_eq!(max_c_na_quadratic(1.0, 0.0, -1.0).unwrap_err(), Error::NormZero);
    }
}
