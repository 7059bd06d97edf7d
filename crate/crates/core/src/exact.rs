//! Small exact linear algebra over `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            let t = &m[r][j] * &inv;
            m[r][j] = t;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    echelon(&mut m).len()
}

/// Affine rank of a point set (dimension of its affine hull), -1 for empty.
pub fn affine_rank(points: &[&Vec<Q>]) -> isize {
    if points.is_empty() {
        return -1;
    }
    let base = points[0];
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs) as isize
}

/// Unique solution of the square system `a x = b`, if it exists.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut m);
    if pivots.len() != n || pivots.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Basis of the right null space of `rows` (each row has `cols` entries).
pub fn null_space(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = echelon(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn det(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c].clone();
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scale a nonzero rational vector to the primitive integer vector on the same ray.
pub fn primitive(v: &[Q]) -> Vec<BigInt> {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

/// Integer vector `w` with `<v, w> = 1` for a primitive `v`.
pub fn bezout_dual(v: &[i64]) -> Option<Vec<i64>> {
    let mut g: i64 = 0;
    let mut w = vec![0i64; v.len()];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        if g == 0 {
            g = vi.abs();
            w[i] = vi.signum();
            continue;
        }
        let e = (g as i128).extended_gcd(&(vi as i128));
        for wj in w.iter_mut().take(i) {
            *wj = (*wj as i128 * e.x) as i64;
        }
        w[i] = e.y as i64;
        g = e.gcd as i64;
    }
    (g == 1).then_some(w)
}

pub fn factorial(n: usize) -> Q {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    Q::from_integer(f)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q_int(x)).collect()
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let a = vec![qv(&[2, 0, 1]), qv(&[1, 3, 2]), qv(&[1, 1, 1])];
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(det(&a), q_int(0));
        let b = vec![qv(&[4, 1]), qv(&[2, 3])];
        assert_eq!(det(&b), q_int(10));
    }

    #[test]
    fn bezout_dual_pairs_to_one() {
        for v in [vec![1i64], vec![-1], vec![2, 3], vec![-4, 7], vec![0, -1], vec![6, 10, 15]] {
            let w = bezout_dual(&v).unwrap();
            let s: i64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            assert_eq!(s, 1, "{v:?} -> {w:?}");
        }
        assert!(bezout_dual(&[2, 4]).is_none());
    }

    #[test]
    fn null_space_is_annihilated() {
        let rows = vec![qv(&[1, 2, 3]), qv(&[2, 4, 7])];
        let ns = null_space(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            assert!(dot(r, &ns[0]).is_zero());
        }
    }

    #[test]
    fn primitive_scales_rationals() {
        let v = vec![Q::new(2.into(), 3.into()), Q::new((-4).into(), 9.into())];
        assert_eq!(primitive(&v), vec![BigInt::from(3), BigInt::from(-2)]);
    }
}
