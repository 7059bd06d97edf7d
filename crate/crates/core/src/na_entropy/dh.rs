//! Duistermaat-Heckman measure: the pushforward of Lebesgue measure on `P`
//! under `-q`.

use serde::{Deserialize, Serialize};

use super::ToricTestConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DHMeasure {
    /// Sorted interval endpoints of the absolutely continuous part.
    pub breakpoints: Vec<f64>,
    /// `[c0, c1]` per interval: density `c0 + c1·t` on `[breakpoints[k], breakpoints[k+1]]`.
    pub densities: Vec<Vec<f64>>,
    pub point_masses: Vec<(f64, f64)>,
}

struct Segment {
    lo: f64,
    hi: f64,
    c0: f64,
    c1: f64,
}

fn flat(lo: f64, hi: f64, scale: f64) -> bool {
    hi - lo <= 1e-12 * (1.0 + scale)
}

impl DHMeasure {
    pub fn total_mass(&self) -> f64 {
        self.moment_about(0, 0.0)
    }

    /// `∫ (t - b)^k dDH`.
    pub fn moment_about(&self, k: i32, b: f64) -> f64 {
        let mut s = 0.0;
        for (w, d) in self.breakpoints.windows(2).zip(&self.densities) {
            // density in s = t - b is (c0 + c1 b) + c1 s
            let d0 = d[0] + d[1] * b;
            let (lo, hi) = (w[0] - b, w[1] - b);
            let p = |x: f64| d0 * x.powi(k + 1) / (k + 1) as f64 + d[1] * x.powi(k + 2) / (k + 2) as f64;
            s += p(hi) - p(lo);
        }
        for &(loc, m) in &self.point_masses {
            s += m * (loc - b).powi(k);
        }
        s
    }

    pub fn mean(&self) -> f64 {
        self.moment_about(1, 0.0) / self.total_mass()
    }

    /// Distribution function `DH((-∞, t])`.
    pub fn cdf(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for (w, d) in self.breakpoints.windows(2).zip(&self.densities) {
            if t <= w[0] {
                break;
            }
            let hi = t.min(w[1]);
            let p = |x: f64| d[0] * x + 0.5 * d[1] * x * x;
            s += p(hi) - p(w[0]);
        }
        s + self.point_masses.iter().filter(|(loc, _)| *loc <= t).map(|(_, m)| m).sum::<f64>()
    }
}

pub fn dh_measure(tc: &ToricTestConfig) -> DHMeasure {
    let q = tc.q();
    let mut segs: Vec<Segment> = Vec::new();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for cell in &tc.decomposition().interior {
        let piece = &q.pieces[cell.piece];
        for s in &cell.simplices {
            let mut t: Vec<f64> = s.vertices.iter().map(|v| -piece.eval(v)).collect();
            t.sort_by(|a, b| a.total_cmp(b));
            let scale = t.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let (t0, tn) = (t[0], t[t.len() - 1]);
            if flat(t0, tn, scale) {
                points.push((0.5 * (t0 + tn), s.measure));
                continue;
            }
            if t.len() == 2 {
                segs.push(Segment { lo: t0, hi: tn, c0: s.measure / (tn - t0), c1: 0.0 });
                continue;
            }
            // triangle: tent with peak 2A/(t2 - t0) at the middle value
            let t1 = t[1];
            let h = 2.0 * s.measure / (tn - t0);
            if !flat(t0, t1, scale) {
                let k = h / (t1 - t0);
                segs.push(Segment { lo: t0, hi: t1, c0: -k * t0, c1: k });
            }
            if !flat(t1, tn, scale) {
                let k = h / (tn - t1);
                segs.push(Segment { lo: t1, hi: tn, c0: k * tn, c1: -k });
            }
        }
    }
    let mut bps: Vec<f64> = segs.iter().flat_map(|s| [s.lo, s.hi]).collect();
    bps.sort_by(|a, b| a.total_cmp(b));
    bps.dedup();
    let mut breakpoints = Vec::new();
    let mut densities = Vec::new();
    for w in bps.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut c = [0.0, 0.0];
        for s in &segs {
            if s.lo <= a && s.hi >= b {
                c[0] += s.c0;
                c[1] += s.c1;
            }
        }
        if breakpoints.last() != Some(&a) {
            if !breakpoints.is_empty() {
                // gap with zero density
                densities.push(vec![0.0, 0.0]);
            }
            breakpoints.push(a);
        }
        breakpoints.push(b);
        densities.push(c.to_vec());
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut point_masses: Vec<(f64, f64)> = Vec::new();
    for (loc, m) in points {
        match point_masses.last_mut() {
            Some(last) if (last.0 - loc).abs() <= 1e-12 * (1.0 + loc.abs()) => last.1 += m,
            _ => point_masses.push((loc, m)),
        }
    }
    DHMeasure { breakpoints, densities, point_masses }
}

/// `‖(X, L)‖² = n! ∫ (t - b)² dDH` with `b` the DH barycenter.
pub fn norm_squared(tc: &ToricTestConfig) -> f64 {
    let dh = dh_measure(tc);
    let nfact: f64 = (1..=tc.dim()).map(|k| k as f64).product();
    nfact * dh.moment_about(2, dh.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;
    use crate::exp_integrals::{AffinePiece, PLConvexFunction};
    use crate::polytope::Polytope;

    #[test]
    fn linear_on_unit_interval() {
        let tc = ToricTestConfig::new(Polytope::interval(q_int(1)).unwrap(), PLConvexFunction::affine(vec![1.0], -1.0)).unwrap();
        let dh = dh_measure(&tc);
        assert_eq!(dh.breakpoints, vec![0.0, 1.0]);
        assert!((dh.densities[0][0] - 1.0).abs() < 1e-15 && dh.densities[0][1] == 0.0);
        assert!((norm_squared(&tc) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn constant_gives_point_mass() {
        let tc = ToricTestConfig::new(Polytope::interval(q_int(1)).unwrap(), PLConvexFunction::affine(vec![0.0], -0.5)).unwrap();
        let dh = dh_measure(&tc);
        assert!(dh.breakpoints.is_empty());
        assert_eq!(dh.point_masses, vec![(0.5, 1.0)]);
        assert_eq!(norm_squared(&tc), 0.0);
    }

    #[test]
    fn square_matches_histogram() {
        let p = Polytope::from_vertices(vec![
            vec![q_int(0), q_int(0)],
            vec![q_int(1), q_int(0)],
            vec![q_int(1), q_int(1)],
            vec![q_int(0), q_int(1)],
        ])
        .unwrap();
        let q = PLConvexFunction::new(vec![
            AffinePiece { gradient: vec![1.0, 0.0], constant: -1.0 },
            AffinePiece { gradient: vec![0.3, 0.9], constant: -1.5 },
        ])
        .unwrap();
        let tc = ToricTestConfig::normalized(p, q).unwrap();
        let dh = dh_measure(&tc);
        assert!((dh.total_mass() - 1.0).abs() < 1e-13);
        let n = 1000;
        let mut vals = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = [(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64];
                vals.push(-tc.q().eval(&x));
            }
        }
        vals.sort_by(|a, b| a.total_cmp(b));
        let mut worst = 0.0f64;
        for k in (0..vals.len()).step_by(997) {
            let emp = (k + 1) as f64 / vals.len() as f64;
            worst = worst.max((dh.cdf(vals[k]) - emp).abs());
        }
        assert!(worst < 1e-3, "{worst}");
        // second moment against the same sample
        let b = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - b).powi(2)).sum::<f64>() / vals.len() as f64;
        assert!((norm_squared(&tc) - 2.0 * var).abs() < 1e-5);
    }
}
