//! Exact-formula integrals of `e^{τq}` and its first moments over a polytope
//! and its boundary.

pub mod kernel;
pub mod oracle;
pub mod pl;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::Polytope;
pub use kernel::{divdiff_exp, exp_integral_simplex, simplex_integral};
pub use pl::{AffinePiece, Cell, FSimplex, PLConvexFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralBundle {
    /// `∫_P e^{τq} dμ`
    pub i0: f64,
    /// `∫_P τq e^{τq} dμ`
    pub i1: f64,
    /// `∫_∂P e^{τq} dσ`
    pub b0: f64,
    /// `∫_P μ e^{τq} dμ`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
}

/// Linearity cells of `q` on `P`, cached for repeated integration.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub dim: usize,
    pub q: PLConvexFunction,
    pub interior: Vec<Cell>,
    pub boundary: Vec<Cell>,
}

impl Decomposition {
    pub fn new(p: &Polytope, q: &PLConvexFunction) -> Result<Self> {
        Ok(Decomposition { dim: p.dim(), q: q.clone(), interior: q.cells(p)?, boundary: q.boundary_cells(p)? })
    }

    /// Decomposition of `P` under the zero function (a single cell).
    pub fn trivial(p: &Polytope) -> Result<Self> {
        Self::new(p, &PLConvexFunction::zero(p.dim()))
    }

    pub fn cells(&self, region: Region) -> &[Cell] {
        match region {
            Region::Interior => &self.interior,
            Region::Boundary => &self.boundary,
        }
    }

    /// `∫ Π_k A_k e^{E}` over the region, where on each cell the exponent `E`
    /// and the factors `A_k` are affine. Closures receive `(piece, point)`.
    pub fn integrate(
        &self,
        region: Region,
        exponent: &dyn Fn(usize, &[f64]) -> f64,
        factors: &[&dyn Fn(usize, &[f64]) -> f64],
    ) -> Result<f64> {
        let mut total = 0.0;
        for cell in self.cells(region) {
            for s in &cell.simplices {
                let exps: Vec<f64> = s.vertices.iter().map(|v| exponent(cell.piece, v)).collect();
                let vals: Vec<Vec<f64>> = factors
                    .iter()
                    .map(|f| s.vertices.iter().map(|v| f(cell.piece, v)).collect())
                    .collect();
                let refs: Vec<&[f64]> = vals.iter().map(|v| v.as_slice()).collect();
                total += simplex_integral(s.measure, &exps, &refs)?;
            }
        }
        Ok(total)
    }

    /// Bundle for exponent `τ·q`; `τ` may be any real here (used for derivatives).
    pub fn bundle_signed(&self, tau: f64, with_moment: bool) -> Result<IntegralBundle> {
        let q = &self.q;
        let e = |i: usize, x: &[f64]| tau * q.pieces[i].eval(x);
        let i0 = self.integrate(Region::Interior, &e, &[])?;
        let i1 = self.integrate(Region::Interior, &e, &[&e])?;
        let b0 = self.integrate(Region::Boundary, &e, &[])?;
        let moment = if with_moment {
            let mut m = Vec::with_capacity(self.dim);
            for k in 0..self.dim {
                let coord = move |_: usize, x: &[f64]| x[k];
                m.push(self.integrate(Region::Interior, &e, &[&coord])?);
            }
            Some(m)
        } else {
            None
        };
        Ok(IntegralBundle { i0, i1, b0, moment })
    }

    pub fn bundle(&self, tau: f64, with_moment: bool) -> Result<IntegralBundle> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::NegativeTau(tau));
        }
        self.bundle_signed(tau, with_moment)
    }
}

/// `(I0, I1, B0)` for `e^{τq}` over `P`, optionally with the first moment.
pub fn bundle(p: &Polytope, q: &PLConvexFunction, tau: f64, with_moment: bool) -> Result<IntegralBundle> {
    Decomposition::new(p, q)?.bundle(tau, with_moment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    #[test]
    fn symbolic_interval_case() {
        // P = [0,1], q = t - 1, τ = 1: I0 = 1 - e^-1, I1 = -1 + 2e^-1, B0 = 1 + e^-1.
        let p = Polytope::interval(q_int(1)).unwrap();
        let q = PLConvexFunction::affine(vec![1.0], -1.0);
        let b = bundle(&p, &q, 1.0, true).unwrap();
        let e1 = (-1.0f64).exp();
        assert!((b.i0 - (1.0 - e1)).abs() < 1e-15);
        assert!((b.i1 - (-1.0 + 2.0 * e1)).abs() < 1e-15);
        assert!((b.b0 - (1.0 + e1)).abs() < 1e-15);
        // ∫ t e^{t-1} = e^-1 [ (t-1) e^t ]_0^1 = e^-1
        assert!((b.moment.unwrap()[0] - e1).abs() < 1e-15);
    }

    #[test]
    fn tau_zero_gives_volumes() {
        let p = Polytope::from_vertices(vec![
            vec![q_int(0), q_int(0)],
            vec![q_int(3), q_int(0)],
            vec![q_int(0), q_int(2)],
        ])
        .unwrap();
        let q = PLConvexFunction::new(vec![
            AffinePiece { gradient: vec![0.3, -1.0], constant: -4.0 },
            AffinePiece { gradient: vec![-0.5, 0.2], constant: -3.0 },
        ])
        .unwrap();
        let b = bundle(&p, &q, 0.0, false).unwrap();
        assert!((b.i0 - 3.0).abs() < 1e-14);
        assert_eq!(b.i1, 0.0);
        // edges: 3 + 2 + gcd(3,2)=1
        assert!((b.b0 - 6.0).abs() < 1e-14);
    }

    #[test]
    fn negative_tau_is_rejected() {
        let p = Polytope::interval(q_int(1)).unwrap();
        let q = PLConvexFunction::zero(1);
        assert!(matches!(bundle(&p, &q, -1.0, false), Err(Error::NegativeTau(_))));
    }
}
