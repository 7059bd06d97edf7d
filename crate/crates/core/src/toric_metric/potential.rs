//! Circle-invariant Kähler metrics on the projective line in symplectic
//! coordinates: `u = u₀ + φ` on `[0, a]` with `u₀` the Guillemin potential.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::cheb;

pub const MAX_DEGREE: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialJson", into = "PotentialJson")]
pub struct SymplecticPotential1D {
    a: f64,
    /// Chebyshev coefficients of `φ` in `s = 2x/a - 1`.
    coeffs: Vec<f64>,
    /// Coefficients of `d^k φ / ds^k` for `k = 1..=4`.
    derivs: [Vec<f64>; 4],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialJson {
    pub a: f64,
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

impl TryFrom<PotentialJson> for SymplecticPotential1D {
    type Error = Error;
    fn try_from(j: PotentialJson) -> Result<Self> {
        SymplecticPotential1D::new(j.a, j.coefficients)
    }
}

impl From<SymplecticPotential1D> for PotentialJson {
    fn from(u: SymplecticPotential1D) -> Self {
        PotentialJson { a: u.a, coefficients: u.coeffs }
    }
}

/// Values and derivatives of `w = a + p φ''` with `p = 2x(a - x)`; `1/u'' = p/w`.
#[derive(Clone, Copy, Debug)]
pub struct LocalGeometry {
    pub p: f64,
    pub w: f64,
    pub dw: f64,
    pub d2w: f64,
}

impl SymplecticPotential1D {
    pub fn new(a: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidInput(format!("polytope length must be positive, got {a}")));
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::InvalidInput(format!("at most {} Chebyshev coefficients", MAX_DEGREE + 1)));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite Chebyshev coefficient".into()));
        }
        let d1 = cheb::derivative(&coeffs);
        let d2 = cheb::derivative(&d1);
        let d3 = cheb::derivative(&d2);
        let d4 = cheb::derivative(&d3);
        let u = SymplecticPotential1D { a, coeffs, derivs: [d1, d2, d3, d4] };
        u.check_convexity()?;
        Ok(u)
    }

    /// The Fubini-Study (Guillemin) potential on `[0, a]`.
    pub fn fubini_study(a: f64) -> Result<Self> {
        Self::new(a, Vec::new())
    }

    /// A seeded random smooth perturbation of degree `degree` with coefficients
    /// decaying like `k^-4`; the amplitude is halved until the result is convex.
    pub fn random(a: f64, degree: usize, amplitude: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..=degree.min(MAX_DEGREE))
            .map(|k| if k < 2 { 0.0 } else { rng.gen_range(-1.0..1.0) / (k as f64).powi(4) })
            .collect();
        let mut amp = amplitude * a;
        for _ in 0..40 {
            let c: Vec<f64> = raw.iter().map(|r| r * amp).collect();
            match Self::new(a, c) {
                Ok(u) => return Ok(u),
                Err(Error::NonConvexPotential { .. }) => amp *= 0.5,
                Err(e) => return Err(e),
            }
        }
        Self::fubini_study(a)
    }

    fn check_convexity(&self) -> Result<()> {
        let m = 4096;
        for j in 0..=m {
            let x = self.a * j as f64 / m as f64;
            let w = self.geometry(x).w;
            if !(w > 1e-9 * self.a) {
                return Err(Error::NonConvexPotential { x, value: w });
            }
        }
        for x in cheb::lobatto_nodes(self.a, 512) {
            let w = self.geometry(x).w;
            if !(w > 1e-9 * self.a) {
                return Err(Error::NonConvexPotential { x, value: w });
            }
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    fn s_of(&self, x: f64) -> f64 {
        2.0 * x / self.a - 1.0
    }

    /// `φ^{(k)}(x)` for `k = 0..=4`.
    pub fn phi(&self, x: f64, k: usize) -> f64 {
        let s = self.s_of(x);
        let scale = (2.0 / self.a).powi(k as i32);
        let c = if k == 0 { &self.coeffs } else { &self.derivs[k - 1] };
        scale * cheb::eval(c, s)
    }

    pub fn geometry(&self, x: f64) -> LocalGeometry {
        self.geometry_plus(x, [0.0; 3])
    }

    /// [`Self::geometry`] for the potential `u + k` where `extra` holds
    /// `(k'', k''', k'''')` at `x`.
    pub fn geometry_plus(&self, x: f64, extra: [f64; 3]) -> LocalGeometry {
        let a = self.a;
        let p = 2.0 * x * (a - x);
        let dp = 2.0 * a - 4.0 * x;
        let (f2, f3, f4) = (self.phi(x, 2) + extra[0], self.phi(x, 3) + extra[1], self.phi(x, 4) + extra[2]);
        LocalGeometry {
            p,
            w: a + p * f2,
            dw: dp * f2 + p * f3,
            d2w: -4.0 * f2 + 2.0 * dp * f3 + p * f4,
        }
    }

    /// `u(x)`.
    pub fn u(&self, x: f64) -> f64 {
        let xlx = |y: f64| if y <= 0.0 { 0.0 } else { y * y.ln() };
        0.5 * (xlx(x) + xlx(self.a - x)) + self.phi(x, 0)
    }

    /// `u'(x)`, infinite at the endpoints.
    pub fn du(&self, x: f64) -> f64 {
        0.5 * (x.ln() - (self.a - x).ln()) + self.phi(x, 1)
    }

    /// `u''(x)`.
    pub fn d2u(&self, x: f64) -> f64 {
        let g = self.geometry(x);
        g.w / g.p
    }

    /// `v = 1/u''`, together with `v'` and `v''`.
    pub fn v_derivs(&self, x: f64) -> (f64, f64, f64) {
        self.v_derivs_plus(x, [0.0; 3])
    }

    pub fn v_derivs_plus(&self, x: f64, extra: [f64; 3]) -> (f64, f64, f64) {
        let g = self.geometry_plus(x, extra);
        let dp = 2.0 * self.a - 4.0 * x;
        let v = g.p / g.w;
        let dv = (dp * g.w - g.p * g.dw) / (g.w * g.w);
        let d2v = -4.0 / g.w - 2.0 * dp * g.dw / (g.w * g.w) - g.p * g.d2w / (g.w * g.w)
            + 2.0 * g.p * g.dw * g.dw / (g.w * g.w * g.w);
        (v, dv, d2v)
    }

    /// Scalar curvature `s = -π (1/u'')''`.
    pub fn scalar_curvature(&self, x: f64) -> f64 {
        -std::f64::consts::PI * self.v_derivs(x).2
    }

    /// The same potential with perturbation `φ + t·χ` (for linearization checks).
    pub fn perturbed(&self, chi: &[f64], t: f64) -> Result<Self> {
        let n = self.coeffs.len().max(chi.len());
        let c = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + t * chi.get(k).copied().unwrap_or(0.0))
            .collect();
        Self::new(self.a, c)
    }
}
