//! μ-entropy of a torus vector `ξ`: the toric functional with exponent `<ξ,μ>`,
//! together with its gradient and Hessian in `ξ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exp_integrals::{Decomposition, Region};
use crate::polytope::{to_f64_vec, Polytope};

use super::dot;

/// Moments of `e^{<ξ,μ>}` about a fixed center, rescaled by a common factor.
#[derive(Clone, Debug)]
pub struct TiltedMoments {
    pub i: f64,
    pub m: DVector<f64>,
    pub s: DMatrix<f64>,
    /// Third moments, `t[j][k, l]`.
    pub t: Vec<DMatrix<f64>>,
    pub b: f64,
    pub mb: DVector<f64>,
    pub sb: DMatrix<f64>,
    /// `∫ <ξ,μ-c> e^{<ξ,μ-c> - shift}` over the interior.
    pub i1: f64,
    pub shift: f64,
}

/// Cached evaluator of `ξ ↦ μ̌^λ(ξ)` for a fixed polytope.
#[derive(Clone, Debug)]
pub struct VectorEntropy {
    polytope: Polytope,
    decomp: Decomposition,
    center: Vec<f64>,
}

impl VectorEntropy {
    pub fn new(p: &Polytope) -> Result<Self> {
        Ok(VectorEntropy {
            polytope: p.clone(),
            decomp: Decomposition::trivial(p)?,
            center: to_f64_vec(&p.barycenter()),
        })
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    fn check(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: xi.len() });
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite ξ".into()));
        }
        Ok(())
    }

    fn shift(&self, xi: &[f64]) -> f64 {
        self.polytope
            .vertices_f64()
            .iter()
            .map(|v| xi.iter().zip(v).zip(&self.center).map(|((x, vi), c)| x * (vi - c)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Moments up to `order` (1: value only, 2: gradient, 3: Hessian).
    pub fn moments(&self, xi: &[f64], order: usize) -> Result<TiltedMoments> {
        self.check(xi)?;
        let n = self.dim();
        let shift = self.shift(xi);
        let c = &self.center;
        let e = |_: usize, x: &[f64]| dot(xi, x) - dot(xi, c) - shift;
        let coords: Vec<Box<dyn Fn(usize, &[f64]) -> f64 + '_>> =
            (0..n).map(|k| Box::new(move |_: usize, x: &[f64]| x[k] - c[k]) as Box<dyn Fn(usize, &[f64]) -> f64>).collect();
        let d = &self.decomp;
        let i = d.integrate(Region::Interior, &e, &[])?;
        let b = d.integrate(Region::Boundary, &e, &[])?;
        let xi_c = |_: usize, x: &[f64]| dot(xi, x) - dot(xi, c);
        let i1 = d.integrate(Region::Interior, &e, &[&xi_c])?;
        let mut m = DVector::zeros(n);
        let mut mb = DVector::zeros(n);
        let mut s = DMatrix::zeros(n, n);
        let mut sb = DMatrix::zeros(n, n);
        let mut t = vec![DMatrix::zeros(n, n); n];
        if order >= 2 {
            for j in 0..n {
                m[j] = d.integrate(Region::Interior, &e, &[&*coords[j]])?;
                mb[j] = d.integrate(Region::Boundary, &e, &[&*coords[j]])?;
                for k in 0..=j {
                    s[(j, k)] = d.integrate(Region::Interior, &e, &[&*coords[j], &*coords[k]])?;
                    s[(k, j)] = s[(j, k)];
                    if order >= 3 {
                        sb[(j, k)] = d.integrate(Region::Boundary, &e, &[&*coords[j], &*coords[k]])?;
                        sb[(k, j)] = sb[(j, k)];
                    }
                }
            }
        }
        if order >= 3 {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if j <= k && k <= l {
                            let v = d.integrate(Region::Interior, &e, &[&*coords[j], &*coords[k], &*coords[l]])?;
                            for (a, bb, cc) in [(j, k, l), (j, l, k), (k, j, l), (k, l, j), (l, j, k), (l, k, j)] {
                                t[a][(bb, cc)] = v;
                            }
                        }
                    }
                }
            }
        }
        Ok(TiltedMoments { i, m, s, t, b, mb, sb, i1, shift })
    }

    /// `-2π B/I + λ(n + E[<ξ,μ>] - log ∫ e^{<ξ,μ>})`.
    pub fn value(&self, xi: &[f64], lambda: f64) -> Result<f64> {
        let mo = self.moments(xi, 1)?;
        Ok(value_from(&mo, self.dim(), xi, &self.center, lambda))
    }

    pub fn gradient(&self, xi: &[f64], lambda: f64) -> Result<DVector<f64>> {
        let mo = self.moments(xi, 2)?;
        Ok(gradient_from(&mo, xi, lambda))
    }

    /// Value, gradient, and Hessian from one pass of moment integrals.
    pub fn derivatives(&self, xi: &[f64], lambda: f64) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
        let mo = self.moments(xi, 3)?;
        let v = value_from(&mo, self.dim(), xi, &self.center, lambda);
        let g = gradient_from(&mo, xi, lambda);
        let h = hessian_from(&mo, xi, lambda);
        Ok((v, g, h))
    }

    /// Hessian at `ξ = 0` split as `(H_μ, Cov)` so that `Hess = H_μ + λ Cov`.
    pub fn hessian_at_zero_parts(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.dim();
        let zero = vec![0.0; n];
        let mo = self.moments(&zero, 3)?;
        let h0 = hessian_from(&mo, &zero, 0.0);
        let cov = covariance(&mo);
        Ok((h0, cov))
    }
}

fn value_from(mo: &TiltedMoments, n: usize, xi: &[f64], center: &[f64], lambda: f64) -> f64 {
    let mu = -2.0 * PI * mo.b / mo.i;
    // σ with exponent <ξ,μ>: n + E[<ξ,μ>] - log ∫ e^{<ξ,μ>}
    let e_xi = mo.i1 / mo.i + dot(xi, center);
    let log_z = mo.i.ln() + mo.shift + dot(xi, center);
    mu + lambda * (n as f64 + e_xi - log_z)
}

fn covariance(mo: &TiltedMoments) -> DMatrix<f64> {
    let mean = &mo.m / mo.i;
    &mo.s / mo.i - &mean * mean.transpose()
}

fn gradient_from(mo: &TiltedMoments, xi: &[f64], lambda: f64) -> DVector<f64> {
    let x = DVector::from_column_slice(xi);
    let d_ratio = &mo.mb / mo.i - &mo.m * (mo.b / (mo.i * mo.i));
    -2.0 * PI * d_ratio + lambda * (covariance(mo) * x)
}

fn hessian_from(mo: &TiltedMoments, xi: &[f64], lambda: f64) -> DMatrix<f64> {
    let n = xi.len();
    let (i, b) = (mo.i, mo.b);
    let h_ratio = &mo.sb / i - (&mo.mb * mo.m.transpose() + &mo.m * mo.mb.transpose()) / (i * i) - &mo.s * (b / (i * i))
        + &mo.m * mo.m.transpose() * (2.0 * b / (i * i * i));
    let cov = covariance(mo);
    let mean = &mo.m / i;
    let mut k3 = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for (l, x) in xi.iter().enumerate() {
                let e3 = mo.t[l][(j, k)] / i;
                let c = e3 - mean[l] * mo.s[(j, k)] / i - mean[j] * mo.s[(l, k)] / i - mean[k] * mo.s[(l, j)] / i
                    + 2.0 * mean[l] * mean[j] * mean[k];
                acc += x * c;
            }
            k3[(j, k)] = acc;
        }
    }
    -2.0 * PI * h_ratio + lambda * (cov + k3)
}

/// `μ̌^λ(X, L; ξ)` for the toric manifold of `P`.
pub fn vector_mu_entropy(p: &Polytope, xi: &[f64], lambda: f64) -> Result<f64> {
    VectorEntropy::new(p)?.value(xi, lambda)
}
