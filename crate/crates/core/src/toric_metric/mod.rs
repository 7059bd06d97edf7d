//! Circle-symmetric metrics on the projective line: W-entropy, the
//! critical-momentum solver, μ-entropy of a metric, H-entropy, and the
//! extremal limit.
//!
//! Conventions in the moment coordinate `x ∈ [0, a]` with `v = 1/u''`:
//! `s = -π v''`, `|∂f|² = π v f'²`, volume form `dx`. The linear momentum
//! `f = ξ x` reproduces the toric vector entropy with exponent `ξ x`.

pub mod cheb;
mod potential;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use potential::{LocalGeometry, PotentialJson, SymplecticPotential1D, MAX_DEGREE};

pub const DEFAULT_NODES: usize = 96;

/// Quadrature realizing `∫ (·) dx` on `[0, a]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Measure1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Measure1D {
    pub fn lobatto(a: f64, n: usize) -> Self {
        Measure1D { nodes: cheb::lobatto_nodes(a, n), weights: cheb::clenshaw_curtis(a, n) }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, vals: &[f64]) -> f64 {
        self.weights.iter().zip(vals).map(|(w, v)| w * v).sum()
    }
}

/// A momentum sampled at the quadrature nodes (endpoints included).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Momentum1D {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

/// A metric sampled on a Chebyshev-Lobatto grid.
#[derive(Clone, Debug)]
pub struct ToricMetric {
    pub u: SymplecticPotential1D,
    pub measure: Measure1D,
    d: DMatrix<f64>,
    d2: DMatrix<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    s: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalMomentum {
    pub f: Momentum1D,
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

/// Weighted mean of `g` under `e^f dx` and `log ∫ e^f dx`.
fn tilted(measure: &Measure1D, f: &[f64]) -> (Vec<f64>, f64) {
    let m = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = measure.weights.iter().zip(f).map(|(w, fi)| w * (fi - m).exp()).collect();
    let z: f64 = w.iter().sum();
    (w.iter().map(|x| x / z).collect(), z.ln() + m)
}

fn mean(p: &[f64], g: &[f64]) -> f64 {
    p.iter().zip(g).map(|(a, b)| a * b).sum()
}

impl ToricMetric {
    pub fn new(u: &SymplecticPotential1D, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidInput("need at least 4 quadrature intervals".into()));
        }
        let a = u.a();
        let measure = Measure1D::lobatto(a, n);
        let d = cheb::diff_matrix(a, n);
        let d2 = &d * &d;
        let (v, dv) = measure.nodes.iter().map(|&x| u.v_derivs(x)).map(|(v, dv, _)| (v, dv)).unzip();
        let s = measure.nodes.iter().map(|&x| u.scalar_curvature(x)).collect();
        Ok(ToricMetric { u: u.clone(), measure, d, d2, v, dv, s })
    }

    pub fn with_default_grid(u: &SymplecticPotential1D) -> Result<Self> {
        Self::new(u, DEFAULT_NODES)
    }

    pub fn a(&self) -> f64 {
        self.u.a()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.measure.nodes
    }

    pub fn scalar_curvature(&self) -> &[f64] {
        &self.s
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn momentum<F: Fn(f64) -> f64>(&self, f: F) -> Momentum1D {
        Momentum1D { nodes: self.measure.nodes.clone(), values: self.measure.nodes.iter().map(|&x| f(x)).collect() }
    }

    fn check(&self, f: &Momentum1D) -> Result<()> {
        if f.values.len() != self.measure.nodes.len() {
            return Err(Error::InvalidInput(format!(
                "momentum has {} values, grid has {} nodes",
                f.values.len(),
                self.measure.nodes.len()
            )));
        }
        if let Some(i) = f.values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteMomentum(i));
        }
        Ok(())
    }

    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        (&self.d * DVector::from_column_slice(f)).iter().copied().collect()
    }

    /// `Ŵ^λ(ω, f) = -∫(s + |∂f|² - λ(1+f)) e^f / ∫ e^f - λ log ∫ e^f`.
    pub fn w_entropy(&self, f: &Momentum1D, lambda: f64) -> Result<f64> {
        self.check(f)?;
        let fv = &f.values;
        let df = self.derivative(fv);
        let (p, log_z) = tilted(&self.measure, fv);
        let integrand: Vec<f64> = (0..fv.len())
            .map(|i| self.s[i] + PI * self.v[i] * df[i] * df[i] - lambda * (1.0 + fv[i]))
            .collect();
        Ok(-mean(&p, &integrand) - lambda * log_z)
    }

    /// Euler-Lagrange expression `s - 2π(v f')' - π v f'² - λ f`; critical
    /// momenta make it constant.
    pub fn euler_lagrange(&self, f: &[f64], lambda: f64) -> Vec<f64> {
        let df = self.derivative(f);
        // product rule keeps f' at the ends, where v vanishes
        let d2f: Vec<f64> = (&self.d2 * DVector::from_column_slice(f)).iter().copied().collect();
        let dvdf: Vec<f64> = (0..f.len()).map(|i| self.dv[i] * df[i] + self.v[i] * d2f[i]).collect();
        (0..f.len())
            .map(|i| self.s[i] - 2.0 * PI * dvdf[i] - PI * self.v[i] * df[i] * df[i] - lambda * f[i])
            .collect()
    }

    /// Sup-norm deviation of the Euler-Lagrange expression from its `e^f` mean.
    pub fn residual(&self, f: &[f64], lambda: f64) -> f64 {
        let e = self.euler_lagrange(f, lambda);
        let (p, _) = tilted(&self.measure, f);
        let bar = mean(&p, &e);
        e.iter().fold(0.0f64, |m, x| m.max((x - bar).abs()))
    }

    fn gauge(&self, f: &mut [f64]) {
        let (p, _) = tilted(&self.measure, f);
        let c = mean(&p, f);
        f.iter_mut().for_each(|x| *x -= c);
    }

    /// Damped Newton iteration on the Euler-Lagrange equation, gauge
    /// `∫ f e^f / ∫ e^f = 0`.
    pub fn critical_momentum(
        &self,
        lambda: f64,
        tol: f64,
        max_iter: usize,
        init: Option<&Momentum1D>,
    ) -> Result<CriticalMomentum> {
        if lambda > 0.0 {
            return Err(Error::PositiveLambda(lambda));
        }
        let n = self.measure.nodes.len();
        let mut f = match init {
            Some(m) => {
                self.check(m)?;
                m.values.clone()
            }
            None => vec![0.0; n],
        };
        self.gauge(&mut f);
        let mut res = self.residual(&f, lambda);
        let mut history = vec![res];
        let lap = DMatrix::from_fn(n, n, |i, j| self.dv[i] * self.d[(i, j)] + self.v[i] * self.d2[(i, j)]);
        let mut iterations = 0;
        while res > tol {
            if iterations >= max_iter {
                return Err(Error::NonConvergence(format!(
                    "critical momentum: residual {res:e} after {iterations} iterations (history {history:?})"
                )));
            }
            iterations += 1;
            let e = self.euler_lagrange(&f, lambda);
            let df = self.derivative(&f);
            let (p, _) = tilted(&self.measure, &f);
            let mut m = DMatrix::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = -2.0 * PI * lap[(i, j)] - 2.0 * PI * self.v[i] * df[i] * self.d[(i, j)];
                }
                m[(i, i)] -= lambda;
                m[(i, n)] = -1.0;
                m[(n, i)] = p[i];
            }
            let mut rhs = DVector::zeros(n + 1);
            for i in 0..n {
                rhs[i] = -e[i];
            }
            let sol = m
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::NonConvergence("singular linearized operator".into()))?;
            let step: Vec<f64> = sol.iter().take(n).copied().collect();
            let mut alpha = 1.0;
            loop {
                let mut trial: Vec<f64> = f.iter().zip(&step).map(|(a, b)| a + alpha * b).collect();
                self.gauge(&mut trial);
                let r = self.residual(&trial, lambda);
                if r < res || alpha < 1.0 / 64.0 {
                    f = trial;
                    res = r;
                    break;
                }
                alpha *= 0.5;
            }
            history.push(res);
        }
        let mom = Momentum1D { nodes: self.measure.nodes.clone(), values: f };
        let value = self.w_entropy(&mom, lambda)?;
        Ok(CriticalMomentum { f: mom, value, residual: res, iterations, residual_history: history })
    }

    /// `sup_f Ŵ^λ(ω, f)` for `λ <= 0`.
    pub fn mu_entropy(&self, lambda: f64) -> Result<f64> {
        Ok(self.critical_momentum(lambda, 1e-10, 100, None)?.value)
    }

    /// Ricci potential for `a = 2`: `h = log w + (2 - 2x) φ' + 2φ`, which solves
    /// `π (v h')' = s - 2π`.
    pub fn ricci_potential(&self) -> Result<Momentum1D> {
        let a = self.a();
        if (a - 2.0).abs() > 1e-12 {
            return Err(Error::WrongNormalization(a));
        }
        let u = &self.u;
        Ok(self.momentum(|x| u.geometry(x).w.ln() + (2.0 - 2.0 * x) * u.phi(x, 1) + 2.0 * u.phi(x, 0)))
    }

    /// `H(ω) = 2π (∫ h e^h / ∫ e^h - log ∫ e^h)`.
    pub fn h_entropy(&self) -> Result<f64> {
        let h = self.ricci_potential()?;
        let (p, log_z) = tilted(&self.measure, &h.values);
        Ok(2.0 * PI * (mean(&p, &h.values) - log_z))
    }

    fn hat(&self, g: &[f64]) -> Vec<f64> {
        let m = self.measure.integrate(g) / self.measure.total();
        g.iter().map(|x| x - m).collect()
    }

    /// `½ ∫ ŝ² dx / ∫ dx`.
    pub fn calabi(&self) -> f64 {
        let sh = self.hat(&self.s);
        let sq: Vec<f64> = sh.iter().map(|x| x * x).collect();
        0.5 * self.measure.integrate(&sq) / self.measure.total()
    }

    /// `-½ ∫(ŝ - f̂)² / ∫ dx + ½ ∫ ŝ² / ∫ dx`.
    pub fn w_ext(&self, f: &Momentum1D) -> Result<f64> {
        self.check(f)?;
        let sh = self.hat(&self.s);
        let fh = self.hat(&f.values);
        let d: Vec<f64> = sh.iter().zip(&fh).map(|(a, b)| (a - b) * (a - b)).collect();
        Ok(-0.5 * self.measure.integrate(&d) / self.measure.total() + self.calabi())
    }

    /// `W_κ(ω, f) = -κ⁻¹ (Ŵ^{1/κ}(ω, κf) - Ŵ^{1/κ}(ω, 0))`, which tends to
    /// [`Self::w_ext`] as `κ → 0`.
    ///
    /// The `λ`-terms are combined into a relative entropy before dividing by
    /// `κ²` so that small `κ` does not cancel digits.
    pub fn w_kappa(&self, f: &Momentum1D, kappa: f64) -> Result<f64> {
        self.check(f)?;
        if kappa == 0.0 || !kappa.is_finite() {
            return Err(Error::InvalidInput("kappa must be finite and nonzero".into()));
        }
        let total = self.measure.total();
        let f0 = self.measure.integrate(&f.values) / total;
        let g: Vec<f64> = f.values.iter().map(|x| kappa * (x - f0)).collect();
        let (p, _) = tilted(&self.measure, &g);
        let dg = self.derivative(&g);
        let grad: Vec<f64> = self.v.iter().zip(&dg).map(|(v, d)| PI * v * d * d).collect();
        let s_bar = self.measure.integrate(&self.s) / total;
        // ⟨s⟩_g - s̄ as a covariance-like sum to keep precision
        let ds = mean(&p, &self.s.iter().map(|s| s - s_bar).collect::<Vec<_>>());
        let em1: Vec<f64> = g.iter().map(|x| x.exp_m1()).collect();
        let log_ratio = (self.measure.integrate(&em1) / total).ln_1p();
        let kl = mean(&p, &g) - log_ratio;
        // Ŵ(κf) - Ŵ(0) = -(ds + ⟨|∂g|²⟩_g) + κ⁻¹ kl
        let diff = -(ds + mean(&p, &grad)) + kl / kappa;
        Ok(-diff / kappa)
    }
}

/// `Ŵ^λ(ω, f)` on the default grid, with `f` given as a function of `x`.
pub fn w_entropy<F: Fn(f64) -> f64>(u: &SymplecticPotential1D, f: F, lambda: f64) -> Result<f64> {
    let m = ToricMetric::with_default_grid(u)?;
    let mom = m.momentum(f);
    m.w_entropy(&mom, lambda)
}

pub fn mu_entropy_metric(u: &SymplecticPotential1D, lambda: f64) -> Result<f64> {
    ToricMetric::with_default_grid(u)?.mu_entropy(lambda)
}

pub fn h_entropy(u: &SymplecticPotential1D) -> Result<f64> {
    ToricMetric::with_default_grid(u)?.h_entropy()
}

pub fn calabi(u: &SymplecticPotential1D) -> Result<f64> {
    Ok(ToricMetric::with_default_grid(u)?.calabi())
}

/// Closed form of `Ŵ^λ(ω_FS, 0)` on `[0, a]`: `-4π/a + λ(1 - log a)`.
pub fn fubini_study_w(a: f64, lambda: f64) -> f64 {
    -4.0 * PI / a + lambda * (1.0 - a.ln())
}

/// A seeded random smooth momentum on the grid: a low-degree Chebyshev series.
pub fn random_momentum(metric: &ToricMetric, degree: usize, amplitude: f64, seed: u64) -> Momentum1D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..=degree).map(|k| amplitude * rng.gen_range(-1.0..1.0) / (1 + k) as f64).collect();
    let a = metric.a();
    metric.momentum(|x| cheb::eval(&c, 2.0 * x / a - 1.0))
}
