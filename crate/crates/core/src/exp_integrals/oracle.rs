//! Brute-force oracles for the bundle integrals: seeded Monte Carlo and
//! midpoint grid quadrature. Both evaluate `q` pointwise as a max of pieces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exp_integrals::PLConvexFunction;
use crate::polytope::Polytope;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub i0: f64,
    pub i1: f64,
    pub b0: f64,
    pub se_i0: f64,
    pub se_i1: f64,
    pub se_b0: f64,
}

const CHUNK: usize = 1 << 14;

#[derive(Default, Clone, Copy)]
struct Acc {
    n: f64,
    s0: f64,
    ss0: f64,
    s1: f64,
    ss1: f64,
}

impl Acc {
    fn merge(mut self, o: Acc) -> Acc {
        self.n += o.n;
        self.s0 += o.s0;
        self.ss0 += o.ss0;
        self.s1 += o.s1;
        self.ss1 += o.ss1;
        self
    }

    fn push(&mut self, g0: f64, g1: f64) {
        self.n += 1.0;
        self.s0 += g0;
        self.ss0 += g0 * g0;
        self.s1 += g1;
        self.ss1 += g1 * g1;
    }

    /// Mean and standard error of the mean for both channels.
    fn stats(&self) -> (f64, f64, f64, f64) {
        let n = self.n.max(1.0);
        let m0 = self.s0 / n;
        let m1 = self.s1 / n;
        let v0 = (self.ss0 / n - m0 * m0).max(0.0);
        let v1 = (self.ss1 / n - m1 * m1).max(0.0);
        let d = (n - 1.0).max(1.0);
        (m0, (v0 / d).sqrt(), m1, (v1 / d).sqrt())
    }
}

fn chunk_rng(seed: u64, stream: u64, chunk: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.set_word_pos((chunk as u128) << 20);
    r
}

/// Monte Carlo estimate of `(I0, I1, B0)` with standard errors.
///
/// Interior: rejection sampling in the bounding box. Boundary: uniform samples
/// on each boundary simplex. Deterministic for a fixed seed and any thread count.
pub fn mc_oracle(p: &Polytope, q: &PLConvexFunction, tau: f64, samples: usize, seed: u64) -> OracleEstimate {
    let samples = samples.max(1);
    let (lo, hi) = p.bounding_box();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let n_chunks = samples.div_ceil(CHUNK);
    let interior = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, 0, c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut acc = Acc::default();
            let mut x = vec![0.0; lo.len()];
            for _ in 0..count {
                for k in 0..x.len() {
                    x[k] = rng.gen_range(lo[k]..=hi[k]);
                }
                if p.contains_f64(&x, 0.0) {
                    let e = tau * q.eval(&x);
                    let w = e.exp();
                    acc.push(box_vol * w, box_vol * e * w);
                } else {
                    acc.push(0.0, 0.0);
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Acc::default(), Acc::merge);
    let (i0, se_i0, i1, se_i1) = interior.stats();

    let bs = p.boundary_simplices();
    let per = (samples / bs.len().max(1)).max(1);
    let mut b0 = 0.0;
    let mut var_b0 = 0.0;
    for (fi, s) in bs.iter().enumerate() {
        let vs = s.vertices_f64();
        let m = s.measure_f64();
        if vs.len() == 1 {
            b0 += m * (tau * q.eval(&vs[0])).exp();
            continue;
        }
        let mut rng = chunk_rng(seed, 1 + fi as u64, 0);
        let mut acc = Acc::default();
        let mut x = vec![0.0; vs[0].len()];
        for _ in 0..per {
            let w = uniform_simplex_weights(&mut rng, vs.len());
            for k in 0..x.len() {
                x[k] = vs.iter().zip(&w).map(|(v, wi)| v[k] * wi).sum();
            }
            acc.push(m * (tau * q.eval(&x)).exp(), 0.0);
        }
        let (mean, se, _, _) = acc.stats();
        b0 += mean;
        var_b0 += se * se;
    }
    OracleEstimate { i0, i1, b0, se_i0, se_i1, se_b0: var_b0.sqrt() }
}

fn uniform_simplex_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter_mut().for_each(|x| *x /= s);
    e
}

/// Midpoint-rule estimate of `(I0, I1, B0)`.
///
/// Each interval of a 1-D polytope gets `n * n` cells; each triangle of a 2-D
/// triangulation is pulled back from `[0,1]^2` by the Duffy map on an `n × n`
/// grid; boundary edges of a 2-D polytope get `64 * n` cells.
pub fn grid_oracle(p: &Polytope, q: &PLConvexFunction, tau: f64, n: usize) -> (f64, f64, f64) {
    let g = |x: &[f64]| {
        let e = tau * q.eval(x);
        let w = e.exp();
        (w, e * w)
    };
    let segment = |a: &[f64], b: &[f64], measure: f64, cells: usize| -> (f64, f64) {
        let h = 1.0 / cells as f64;
        let chunk = 1usize << 16;
        let parts: Vec<(f64, f64)> = (0..cells.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut x = a.to_vec();
                let mut acc = (0.0, 0.0);
                for k in c * chunk..((c + 1) * chunk).min(cells) {
                    let s = (k as f64 + 0.5) * h;
                    for (xi, (ai, bi)) in x.iter_mut().zip(a.iter().zip(b)) {
                        *xi = ai + s * (bi - ai);
                    }
                    let (w, ew) = g(&x);
                    acc.0 += w;
                    acc.1 += ew;
                }
                acc
            })
            .collect();
        let (s0, s1) = parts.into_iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
        (measure * h * s0, measure * h * s1)
    };
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    for s in p.triangulation() {
        let vs = s.vertices_f64();
        let m = s.measure_f64();
        let (a, b) = if vs.len() == 2 {
            segment(&vs[0], &vs[1], m, n * n)
        } else {
            let h = 1.0 / n as f64;
            let rows: Vec<(f64, f64)> = (0..n)
                .into_par_iter()
                .map(|iu| {
                    let u = (iu as f64 + 0.5) * h;
                    let mut r0 = 0.0;
                    let mut r1 = 0.0;
                    for iw in 0..n {
                        let w = (iw as f64 + 0.5) * h;
                        let x = [
                            vs[0][0] + u * ((1.0 - w) * (vs[1][0] - vs[0][0]) + w * (vs[2][0] - vs[0][0])),
                            vs[0][1] + u * ((1.0 - w) * (vs[1][1] - vs[0][1]) + w * (vs[2][1] - vs[0][1])),
                        ];
                        let (e0, e1) = g(&x);
                        r0 += u * e0;
                        r1 += u * e1;
                    }
                    (r0, r1)
                })
                .collect();
            let (s0, s1) = rows.into_iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
            // Jacobian of the Duffy map is 2|S| u
            (2.0 * m * h * h * s0, 2.0 * m * h * h * s1)
        };
        i0 += a;
        i1 += b;
    }
    let mut b0 = 0.0;
    for s in p.boundary_simplices() {
        let vs = s.vertices_f64();
        let m = s.measure_f64();
        b0 += if vs.len() == 1 { m * g(&vs[0]).0 } else { segment(&vs[0], &vs[1], m, 64 * n).0 };
    }
    (i0, i1, b0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;
    use crate::exp_integrals::bundle;

    fn unit_square() -> Polytope {
        Polytope::from_vertices(vec![
            vec![q_int(0), q_int(0)],
            vec![q_int(1), q_int(0)],
            vec![q_int(1), q_int(1)],
            vec![q_int(0), q_int(1)],
        ])
        .unwrap()
    }

    #[test]
    fn trivial_interval_volume() {
        let p = Polytope::interval(q_int(1)).unwrap();
        let est = mc_oracle(&p, &PLConvexFunction::zero(1), 0.0, 1_000_000, 3);
        assert!((est.i0 - 1.0).abs() <= 3.0 * est.se_i0 + 1e-12);
    }

    #[test]
    fn square_perimeter() {
        let est = mc_oracle(&unit_square(), &PLConvexFunction::zero(2), 0.0, 100_000, 11);
        assert!((est.b0 - 4.0).abs() <= 3.0 * est.se_b0 + 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let q = PLConvexFunction::affine(vec![1.0, -0.5], -1.0);
        let a = mc_oracle(&unit_square(), &q, 1.5, 50_000, 42);
        let b = mc_oracle(&unit_square(), &q, 1.5, 50_000, 42);
        assert_eq!(a.i0.to_bits(), b.i0.to_bits());
        assert_eq!(a.b0.to_bits(), b.b0.to_bits());
    }

    #[test]
    fn grid_matches_bundle_on_square_kink() {
        let q = PLConvexFunction::new(vec![
            crate::exp_integrals::AffinePiece { gradient: vec![0.0, 0.0], constant: -1.0 },
            crate::exp_integrals::AffinePiece { gradient: vec![1.0, 1.0], constant: -2.0 },
        ])
        .unwrap();
        let b = bundle(&unit_square(), &q, 2.0, false).unwrap();
        let (i0, i1, b0) = grid_oracle(&unit_square(), &q, 2.0, 1000);
        assert!((b.i0 - i0).abs() < 1e-6 * b.i0.abs());
        assert!((b.i1 - i1).abs() < 1e-6 * b.i1.abs());
        assert!((b.b0 - b0).abs() < 1e-6 * b.b0.abs());
    }
}
