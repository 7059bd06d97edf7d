//! Piecewise-linear convex functions `q = max_i (<g_i, μ> + c_i)` and their
//! linearity cells inside a polytope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::Polytope;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub gradient: Vec<f64>,
    pub constant: f64,
}

impl AffinePiece {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.gradient.iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>() + self.constant
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PLConvexFunction {
    pub pieces: Vec<AffinePiece>,
}

/// A float simplex with its measure (Lebesgue or lattice boundary measure).
#[derive(Clone, Debug)]
pub struct FSimplex {
    pub vertices: Vec<Vec<f64>>,
    pub measure: f64,
}

/// Region where one piece attains the maximum, cut into simplices.
#[derive(Clone, Debug)]
pub struct Cell {
    pub piece: usize,
    pub simplices: Vec<FSimplex>,
}

impl PLConvexFunction {
    /// Validates dimensions and finiteness; exact duplicate pieces are dropped.
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::NoPieces);
        };
        let dim = first.gradient.len();
        let mut out: Vec<AffinePiece> = Vec::new();
        for p in pieces {
            if p.gradient.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.gradient.len() });
            }
            if !p.constant.is_finite() || p.gradient.iter().any(|g| !g.is_finite()) {
                return Err(Error::InvalidInput("non-finite piece coefficient".into()));
            }
            if !out.contains(&p) {
                out.push(p);
            }
        }
        Ok(PLConvexFunction { pieces: out })
    }

    pub fn affine(gradient: Vec<f64>, constant: f64) -> Self {
        PLConvexFunction { pieces: vec![AffinePiece { gradient, constant }] }
    }

    pub fn zero(dim: usize) -> Self {
        Self::affine(vec![0.0; dim], 0.0)
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].gradient.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the maximizing piece; ties go to the lowest index.
    pub fn argmax(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut val = f64::NEG_INFINITY;
        for (i, p) in self.pieces.iter().enumerate() {
            let v = p.eval(x);
            if v > val {
                val = v;
                best = i;
            }
        }
        best
    }

    /// `d * q`, the base change of the test configuration.
    pub fn scaled(&self, d: f64) -> Self {
        PLConvexFunction {
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece { gradient: p.gradient.iter().map(|g| g * d).collect(), constant: p.constant * d })
                .collect(),
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        PLConvexFunction {
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece { gradient: p.gradient.clone(), constant: p.constant + c })
                .collect(),
        }
    }

    /// Maximum over the polytope, attained at a vertex by convexity.
    pub fn max_on(&self, p: &Polytope) -> f64 {
        p.vertices_f64().iter().map(|v| self.eval(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_on_vertices(&self, p: &Polytope) -> f64 {
        p.vertices_f64().iter().map(|v| self.eval(v)).fold(f64::INFINITY, f64::min)
    }

    /// Constraints `ℓ_i - ℓ_j >= 0` describing the cell of piece `i`, as `(a, b)` with `a·x + b >= 0`.
    fn cell_constraints(&self, i: usize) -> Vec<(Vec<f64>, f64)> {
        self.cell_constraints_indexed(i).into_iter().map(|(_, c)| c).collect()
    }

    fn cell_constraints_indexed(&self, i: usize) -> Vec<(usize, (Vec<f64>, f64))> {
        let pi = &self.pieces[i];
        self.pieces
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, pj)| {
                let a: Vec<f64> = pi.gradient.iter().zip(&pj.gradient).map(|(x, y)| x - y).collect();
                (j, (a, pi.constant - pj.constant))
            })
            .collect()
    }

    /// Interior cells, each triangulated into simplices (n <= 2).
    pub fn cells(&self, p: &Polytope) -> Result<Vec<Cell>> {
        let n = p.dim();
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: n, got: self.dim() });
        }
        if n > 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        let base: Vec<FSimplex> = p
            .triangulation()
            .iter()
            .map(|s| FSimplex { vertices: s.vertices_f64(), measure: s.measure_f64() })
            .collect();
        let mut cells = Vec::new();
        for i in 0..self.pieces.len() {
            let cons = self.cell_constraints(i);
            let mut simplices = Vec::new();
            for s in &base {
                let floor = 1e-14 * s.measure;
                if n == 1 {
                    if let Some((lo, hi)) = clip_interval(s.vertices[0][0], s.vertices[1][0], &cons) {
                        let m = (hi - lo).abs();
                        if m > floor {
                            simplices.push(FSimplex { vertices: vec![vec![lo], vec![hi]], measure: m });
                        }
                    }
                } else {
                    let mut poly: Vec<[f64; 2]> = s.vertices.iter().map(|v| [v[0], v[1]]).collect();
                    for (a, b) in &cons {
                        poly = clip_polygon(&poly, a, *b);
                        if poly.len() < 3 {
                            break;
                        }
                    }
                    for t in fan(&poly) {
                        if t.measure > floor {
                            simplices.push(t);
                        }
                    }
                }
            }
            if !simplices.is_empty() {
                cells.push(Cell { piece: i, simplices });
            }
        }
        Ok(cells)
    }

    /// Boundary cells: facet simplices split by the pieces, with lattice measure.
    pub fn boundary_cells(&self, p: &Polytope) -> Result<Vec<Cell>> {
        let n = p.dim();
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: n, got: self.dim() });
        }
        if n > 2 {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut by_piece: Vec<Vec<FSimplex>> = vec![Vec::new(); self.pieces.len()];
        for s in p.boundary_simplices() {
            let vs = s.vertices_f64();
            let m = s.measure_f64();
            if n == 1 {
                let i = self.argmax(&vs[0]);
                by_piece[i].push(FSimplex { vertices: vs, measure: m });
                continue;
            }
            let (a, b) = (&vs[0], &vs[1]);
            for (i, cell) in by_piece.iter_mut().enumerate() {
                // parametrize a + s (b - a), s in [0, 1]
                let mut lo = 0.0f64;
                let mut hi = 1.0f64;
                for (j, (g, c)) in self.cell_constraints_indexed(i) {
                    let g0 = g[0] * a[0] + g[1] * a[1] + c;
                    let g1 = g[0] * b[0] + g[1] * b[1] + c;
                    let scale = 1e-12 * (1.0 + c.abs() + g[0].abs() + g[1].abs());
                    if g0.abs() <= scale && g1.abs() <= scale {
                        // edge lies on the tie locus: lower index owns it
                        if j < i {
                            hi = lo - 1.0;
                        }
                        continue;
                    }
                    let slope = g1 - g0;
                    if slope == 0.0 {
                        if g0 < 0.0 {
                            hi = lo - 1.0;
                        }
                        continue;
                    }
                    let root = -g0 / slope;
                    if slope > 0.0 {
                        lo = lo.max(root);
                    } else {
                        hi = hi.min(root);
                    }
                }
                if hi - lo > 1e-14 {
                    let pt = |s: f64| vec![a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                    cell.push(FSimplex { vertices: vec![pt(lo), pt(hi)], measure: m * (hi - lo) });
                }
            }
        }
        Ok(by_piece
            .into_iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(piece, simplices)| Cell { piece, simplices })
            .collect())
    }
}

fn clip_interval(x0: f64, x1: f64, cons: &[(Vec<f64>, f64)]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
    for (a, b) in cons {
        let a = a[0];
        if a > 0.0 {
            lo = lo.max(-b / a);
        } else if a < 0.0 {
            hi = hi.min(-b / a);
        } else if *b < 0.0 {
            return None;
        }
    }
    (hi > lo).then_some((lo, hi))
}

/// Sutherland-Hodgman clip of a convex polygon by `a·x + b >= 0`.
fn clip_polygon(poly: &[[f64; 2]], a: &[f64], b: f64) -> Vec<[f64; 2]> {
    let g = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] + b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let cur = poly[k];
        let prev = poly[(k + poly.len() - 1) % poly.len()];
        let (gc, gp) = (g(&cur), g(&prev));
        if gc >= 0.0 {
            if gp < 0.0 {
                out.push(intersect(&prev, &cur, gp, gc));
            }
            out.push(cur);
        } else if gp >= 0.0 {
            out.push(intersect(&prev, &cur, gp, gc));
        }
    }
    out
}

fn intersect(p: &[f64; 2], q: &[f64; 2], gp: f64, gq: f64) -> [f64; 2] {
    let t = gp / (gp - gq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

fn fan(poly: &[[f64; 2]]) -> Vec<FSimplex> {
    if poly.len() < 3 {
        return Vec::new();
    }
    let p0 = poly[0];
    (1..poly.len() - 1)
        .map(|k| {
            let (p1, p2) = (poly[k], poly[k + 1]);
            let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])).abs();
            FSimplex { vertices: vec![p0.to_vec(), p1.to_vec(), p2.to_vec()], measure: area }
        })
        .collect()
}
