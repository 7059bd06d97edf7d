//! Rational polytopes given by primitive integer halfspaces `<v_i, x> <= c_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: BigRational,
}

/// A simplex with exact vertices and its measure: Lebesgue for full-dimensional
/// simplices, lattice-normalized surface measure for boundary simplices.
#[derive(Clone, Debug)]
pub struct Simplex {
    pub vertices: Vec<Vec<BigRational>>,
    pub measure: BigRational,
    /// Index of the owning facet for boundary simplices.
    pub facet: Option<usize>,
}

impl Simplex {
    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| to_f64_vec(v)).collect()
    }

    pub fn measure_f64(&self) -> f64 {
        self.measure.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    facets: Vec<Halfspace>,
    vertices: Vec<Vec<BigRational>>,
    /// Vertex indices on each facet.
    incidence: Vec<Vec<usize>>,
    interior: Vec<Simplex>,
    boundary: Vec<Simplex>,
}

pub fn to_f64_vec(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn normal_q(n: &[i64]) -> Vec<Q> {
    n.iter().map(|&x| exact::q_int(x)).collect()
}

fn is_primitive(n: &[i64]) -> bool {
    n.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl Polytope {
    /// Build from halfspaces `<normal, x> <= offset` with primitive integer normals.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: h.normal.len() });
            }
            if !is_primitive(&h.normal) {
                return Err(Error::NonPrimitiveNormal(h.normal.clone()));
            }
        }
        let mut hs: Vec<Halfspace> = Vec::new();
        for h in halfspaces {
            if !hs.contains(&h) {
                hs.push(h);
            }
        }
        let normals: Vec<Vec<Q>> = hs.iter().map(|h| normal_q(&h.normal)).collect();
        if exact::rank(&normals) < dim {
            return Err(Error::UnboundedRegion);
        }
        let feasible = |x: &[Q]| {
            hs.iter().zip(&normals).all(|(h, n)| exact::dot(n, x) <= h.offset)
        };

        let mut vertices: Vec<Vec<Q>> = Vec::new();
        for s in subsets(hs.len(), dim) {
            let a: Vec<Vec<Q>> = s.iter().map(|&i| normals[i].clone()).collect();
            let b: Vec<Q> = s.iter().map(|&i| hs[i].offset.clone()).collect();
            if let Some(x) = exact::solve(&a, &b) {
                if feasible(&x) && !vertices.contains(&x) {
                    vertices.push(x);
                }
            }
        }
        if vertices.is_empty() {
            return Err(Error::EmptyRegion);
        }
        if recession_direction(&normals, dim) {
            return Err(Error::UnboundedRegion);
        }
        vertices.sort();
        let refs: Vec<&Vec<Q>> = vertices.iter().collect();
        if exact::affine_rank(&refs) < dim as isize {
            return Err(Error::NotFullDimensional);
        }

        let mut facets = Vec::new();
        let mut incidence = Vec::new();
        for (h, n) in hs.iter().zip(&normals) {
            let on: Vec<usize> = (0..vertices.len())
                .filter(|&i| exact::dot(n, &vertices[i]) == h.offset)
                .collect();
            let pts: Vec<&Vec<Q>> = on.iter().map(|&i| &vertices[i]).collect();
            if exact::affine_rank(&pts) == dim as isize - 1 {
                facets.push(h.clone());
                incidence.push(on);
            }
        }

        let mut p = Polytope { dim, facets, vertices, incidence, interior: Vec::new(), boundary: Vec::new() };
        p.triangulate();
        Ok(p)
    }

    /// Build from a point set; the polytope is its convex hull.
    pub fn from_vertices(points: Vec<Vec<BigRational>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyRegion);
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        let refs: Vec<&Vec<Q>> = points.iter().collect();
        if exact::affine_rank(&refs) < dim as isize {
            return Err(Error::NotFullDimensional);
        }
        let mut hs = Vec::new();
        for s in subsets(points.len(), dim) {
            let base = &points[s[0]];
            let diffs: Vec<Vec<Q>> = s[1..]
                .iter()
                .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            let ns = exact::null_space(&diffs, dim);
            if ns.len() != 1 {
                continue;
            }
            let prim = exact::primitive(&ns[0]);
            let nq: Vec<Q> = prim.iter().map(|x| Q::from_integer(x.clone())).collect();
            let off = exact::dot(&nq, base);
            let vals: Vec<Q> = points.iter().map(|p| exact::dot(&nq, p)).collect();
            let sign: i64 = if vals.iter().all(|v| *v <= off) {
                1
            } else if vals.iter().all(|v| *v >= off) {
                -1
            } else {
                continue;
            };
            let normal: Option<Vec<i64>> = prim.iter().map(|x| (x * BigInt::from(sign)).to_i64()).collect();
            let normal = normal.ok_or_else(|| Error::InvalidInput("facet normal overflows i64".into()))?;
            hs.push(Halfspace { normal, offset: if sign == 1 { off } else { -off } });
        }
        Polytope::from_halfspaces(dim, hs)
    }

    fn triangulate(&mut self) {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let cells = self.triangulate_face(&all, self.dim);
        let nfact = exact::factorial(self.dim);
        self.interior = cells
            .into_iter()
            .map(|c| {
                let vs: Vec<Vec<Q>> = c.iter().map(|&i| self.vertices[i].clone()).collect();
                let m: Vec<Vec<Q>> = vs[1..]
                    .iter()
                    .map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a - b).collect())
                    .collect();
                let measure = exact::det(&m).abs() / &nfact;
                Simplex { vertices: vs, measure, facet: None }
            })
            .collect();

        let mut boundary = Vec::new();
        let fact = exact::factorial(self.dim - 1);
        for (fi, (h, on)) in self.facets.iter().zip(&self.incidence).enumerate() {
            let w = exact::bezout_dual(&h.normal).expect("normals are primitive");
            let wq = normal_q(&w);
            for c in self.triangulate_face(on, self.dim - 1) {
                let vs: Vec<Vec<Q>> = c.iter().map(|&i| self.vertices[i].clone()).collect();
                let mut m: Vec<Vec<Q>> = vs[1..]
                    .iter()
                    .map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a - b).collect())
                    .collect();
                m.push(wq.clone());
                let measure = exact::det(&m).abs() / &fact;
                boundary.push(Simplex { vertices: vs, measure, facet: Some(fi) });
            }
        }
        self.boundary = boundary;
    }

    /// Pulling triangulation of the face spanned by `ids` (of dimension `d`).
    fn triangulate_face(&self, ids: &[usize], d: usize) -> Vec<Vec<usize>> {
        if d == 0 {
            return vec![vec![ids[0]]];
        }
        if d == 1 {
            let refs: Vec<&Vec<Q>> = ids.iter().map(|&i| &self.vertices[i]).collect();
            // extreme points of a collinear set: min and max along the segment direction
            let dir: Vec<Q> = refs[1].iter().zip(refs[0]).map(|(a, b)| a - b).collect();
            let key = |i: &usize| exact::dot(&dir, &self.vertices[*i]);
            let lo = *ids.iter().min_by_key(|i| key(i)).unwrap();
            let hi = *ids.iter().max_by_key(|i| key(i)).unwrap();
            return vec![vec![lo, hi]];
        }
        let apex = *ids.iter().min().unwrap();
        let mut seen: Vec<Vec<usize>> = Vec::new();
        let mut out = Vec::new();
        for on in &self.incidence {
            let sub: Vec<usize> = ids.iter().copied().filter(|i| on.contains(i)).collect();
            if sub.contains(&apex) || seen.contains(&sub) {
                continue;
            }
            let refs: Vec<&Vec<Q>> = sub.iter().map(|&i| &self.vertices[i]).collect();
            if exact::affine_rank(&refs) != d as isize - 1 {
                continue;
            }
            for mut s in self.triangulate_face(&sub, d - 1) {
                s.push(apex);
                out.push(s);
            }
            seen.push(sub);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| to_f64_vec(v)).collect()
    }

    /// Vertex indices lying on facet `i`.
    pub fn facet_vertices(&self, i: usize) -> &[usize] {
        &self.incidence[i]
    }

    pub fn triangulation(&self) -> &[Simplex] {
        &self.interior
    }

    pub fn boundary_simplices(&self) -> &[Simplex] {
        &self.boundary
    }

    pub fn volume(&self) -> BigRational {
        self.interior.iter().map(|s| s.measure.clone()).sum()
    }

    pub fn volume_f64(&self) -> f64 {
        self.volume().to_f64().unwrap_or(f64::NAN)
    }

    /// Total lattice-normalized boundary measure.
    pub fn boundary_measure(&self) -> BigRational {
        self.boundary.iter().map(|s| s.measure.clone()).sum()
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.facets.iter().all(|h| exact::dot(&normal_q(&h.normal), x) <= h.offset)
    }

    /// Floating-point membership with absolute slack `tol`.
    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|h| {
            let s: f64 = h.normal.iter().zip(x).map(|(&n, &xi)| n as f64 * xi).sum();
            s <= h.offset.to_f64().unwrap_or(f64::NAN) + tol
        })
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let vs = self.vertices_f64();
        let lo = (0..self.dim).map(|k| vs.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min)).collect();
        let hi = (0..self.dim).map(|k| vs.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
        (lo, hi)
    }

    /// Barycenter of the uniform measure.
    pub fn barycenter(&self) -> Vec<BigRational> {
        let d1 = exact::q_int(self.dim as i64 + 1);
        let mut c = vec![Q::zero(); self.dim];
        for s in &self.interior {
            for v in &s.vertices {
                for k in 0..self.dim {
                    c[k] += &s.measure * &v[k] / &d1;
                }
            }
        }
        let vol = self.volume();
        c.into_iter().map(|x| x / &vol).collect()
    }

    /// `[0, a]` as a polytope.
    pub fn interval(a: BigRational) -> Result<Self> {
        Polytope::from_halfspaces(
            1,
            vec![
                Halfspace { normal: vec![-1], offset: Q::zero() },
                Halfspace { normal: vec![1], offset: a },
            ],
        )
    }

    pub fn interval_f64(a: f64) -> Result<Self> {
        let q = Q::from_float(a).ok_or_else(|| Error::InvalidInput(format!("length {a}")))?;
        if q <= Q::zero() {
            return Err(Error::EmptyRegion);
        }
        Polytope::interval(q)
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            dim: self.dim,
            halfspaces: Some(
                self.facets
                    .iter()
                    .map(|h| HalfspaceJson { normal: h.normal.clone(), offset: RationalJson::from(&h.offset) })
                    .collect(),
            ),
            vertices: None,
        }
    }
}

/// True if `{d : N d <= 0}` contains a nonzero direction, assuming `N` has full column rank.
fn recession_direction(normals: &[Vec<Q>], dim: usize) -> bool {
    for s in subsets(normals.len(), dim - 1) {
        let rows: Vec<Vec<Q>> = s.iter().map(|&i| normals[i].clone()).collect();
        let ns = exact::null_space(&rows, dim);
        if ns.len() != 1 {
            continue;
        }
        for sign in [1, -1] {
            let d: Vec<Q> = ns[0].iter().map(|x| x * exact::q_int(sign)).collect();
            if normals.iter().all(|n| exact::dot(n, &d) <= Q::zero()) {
                return true;
            }
        }
    }
    false
}

/// A rational number in JSON: integer, float (converted exactly), or `"p/q"` string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RationalJson {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            RationalJson::Int(i) => Ok(exact::q_int(*i)),
            RationalJson::Float(f) => {
                Q::from_float(*f).ok_or_else(|| Error::InvalidInput(format!("non-finite number {f}")))
            }
            RationalJson::Text(s) => parse_rational(s),
        }
    }
}

impl From<&BigRational> for RationalJson {
    fn from(q: &BigRational) -> Self {
        if q.is_integer() {
            if let Some(i) = q.to_integer().to_i64() {
                return RationalJson::Int(i);
            }
        }
        RationalJson::Text(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(i));
    }
    let f: f64 = s.parse().map_err(|_| bad())?;
    Q::from_float(f).ok_or_else(bad)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfspaceJson {
    pub normal: Vec<i64>,
    pub offset: RationalJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<RationalJson>>>,
}

impl PolytopeJson {
    pub fn build(&self) -> Result<Polytope> {
        match (&self.halfspaces, &self.vertices) {
            (Some(hs), None) => {
                let hs = hs
                    .iter()
                    .map(|h| Ok(Halfspace { normal: h.normal.clone(), offset: h.offset.to_rational()? }))
                    .collect::<Result<Vec<_>>>()?;
                Polytope::from_halfspaces(self.dim, hs)
            }
            (None, Some(vs)) => {
                let pts = vs
                    .iter()
                    .map(|v| v.iter().map(|x| x.to_rational()).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                if let Some(p) = pts.iter().find(|p| p.len() != self.dim) {
                    return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
                }
                Polytope::from_vertices(pts)
            }
            _ => Err(Error::InvalidInput("polytope needs exactly one of `halfspaces` or `vertices`".into())),
        }
    }
}

/// Unit lattice-normalized surface measure check helper: `|v|` of a primitive normal.
pub fn normal_length(n: &[i64]) -> f64 {
    n.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn pts(v: &[[i64; 2]]) -> Vec<Vec<Q>> {
        v.iter().map(|p| vec![exact::q_int(p[0]), exact::q_int(p[1])]).collect()
    }

    #[test]
    fn unit_interval() {
        let p = Polytope::interval(exact::q_int(1)).unwrap();
        assert_eq!(p.volume(), exact::q_int(1));
        assert_eq!(p.boundary_measure(), exact::q_int(2));
        assert_eq!(p.vertices().len(), 2);
    }

    #[test]
    fn standard_triangle() {
        let p = Polytope::from_vertices(pts(&[[0, 0], [1, 0], [0, 1]])).unwrap();
        assert_eq!(p.volume(), q(1, 2));
        // three primitive edges of lattice length one
        assert_eq!(p.boundary_measure(), exact::q_int(3));
        assert_eq!(p.facets().len(), 3);
    }

    #[test]
    fn square_from_halfspaces() {
        let hs = vec![
            Halfspace { normal: vec![-1, 0], offset: exact::q_int(0) },
            Halfspace { normal: vec![0, -1], offset: exact::q_int(0) },
            Halfspace { normal: vec![1, 0], offset: exact::q_int(2) },
            Halfspace { normal: vec![0, 1], offset: exact::q_int(3) },
            // redundant
            Halfspace { normal: vec![1, 1], offset: exact::q_int(10) },
        ];
        let p = Polytope::from_halfspaces(2, hs).unwrap();
        assert_eq!(p.volume(), exact::q_int(6));
        assert_eq!(p.boundary_measure(), exact::q_int(10));
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.triangulation().len(), 2);
    }

    #[test]
    fn lattice_measure_of_slanted_edge() {
        // edge from (2,0) to (0,2) has lattice length 2, Euclidean length 2*sqrt(2)
        let p = Polytope::from_vertices(pts(&[[0, 0], [2, 0], [0, 2]])).unwrap();
        let slanted = p
            .boundary_simplices()
            .iter()
            .find(|s| p.facets()[s.facet.unwrap()].normal == vec![1, 1])
            .unwrap();
        assert_eq!(slanted.measure, exact::q_int(2));
        let euclid = 8f64.sqrt();
        assert!((slanted.measure_f64() - euclid / normal_length(&[1, 1])).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = vec![Halfspace { normal: vec![2], offset: exact::q_int(1) }];
        assert!(matches!(Polytope::from_halfspaces(1, bad), Err(Error::NonPrimitiveNormal(_))));
        let half_line = vec![Halfspace { normal: vec![-1], offset: exact::q_int(0) }];
        assert_eq!(Polytope::from_halfspaces(1, half_line).unwrap_err(), Error::UnboundedRegion);
        let quadrant = vec![
            Halfspace { normal: vec![-1, 0], offset: exact::q_int(0) },
            Halfspace { normal: vec![0, -1], offset: exact::q_int(0) },
        ];
        assert_eq!(Polytope::from_halfspaces(2, quadrant).unwrap_err(), Error::UnboundedRegion);
        let strip = vec![
            Halfspace { normal: vec![-1, 0], offset: exact::q_int(0) },
            Halfspace { normal: vec![1, 0], offset: exact::q_int(1) },
            Halfspace { normal: vec![0, -1], offset: exact::q_int(0) },
        ];
        assert_eq!(Polytope::from_halfspaces(2, strip).unwrap_err(), Error::UnboundedRegion);
        let empty = vec![
            Halfspace { normal: vec![-1], offset: exact::q_int(-2) },
            Halfspace { normal: vec![1], offset: exact::q_int(1) },
        ];
        assert_eq!(Polytope::from_halfspaces(1, empty).unwrap_err(), Error::EmptyRegion);
        let point = vec![
            Halfspace { normal: vec![-1], offset: exact::q_int(-1) },
            Halfspace { normal: vec![1], offset: exact::q_int(1) },
        ];
        assert_eq!(Polytope::from_halfspaces(1, point).unwrap_err(), Error::NotFullDimensional);
    }

    #[test]
    fn rational_offsets_and_json() {
        let js = r#"{"dim":1,"halfspaces":[{"normal":[-1],"offset":"1/3"},{"normal":[1],"offset":0.5}]}"#;
        let p: PolytopeJson = serde_json::from_str(js).unwrap();
        let p = p.build().unwrap();
        assert_eq!(p.volume(), q(5, 6));
        let back = serde_json::to_string(&p.to_json()).unwrap();
        let p2: PolytopeJson = serde_json::from_str(&back).unwrap();
        assert_eq!(p2.build().unwrap().volume(), q(5, 6));
    }

    #[test]
    fn hexagon_barycenter() {
        let p = Polytope::from_vertices(pts(&[[1, 0], [2, 0], [2, 1], [1, 2], [0, 2], [0, 1]])).unwrap();
        assert_eq!(p.volume(), exact::q_int(3));
        assert_eq!(p.barycenter(), vec![exact::q_int(1), exact::q_int(1)]);
        assert_eq!(p.boundary_measure(), exact::q_int(6));
    }
}
