//! Chebyshev series, Chebyshev-Gauss-Lobatto nodes, Clenshaw-Curtis weights,
//! and the spectral differentiation matrix on `[0, a]`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

/// `Σ c_k T_k(s)` by Clenshaw recurrence.
pub fn eval(c: &[f64], s: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + s * b1 - b2
}

/// Coefficients of `d/ds Σ c_k T_k(s)`.
pub fn derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut b = vec![0.0; n + 1];
    for k in (1..n).rev() {
        b[k - 1] = b[k + 1] + 2.0 * k as f64 * c[k];
    }
    b[0] *= 0.5;
    b.truncate(n - 1);
    b
}

/// Nodes `x_j = a (1 - cos(jπ/N)) / 2`, increasing from 0 to `a`.
pub fn lobatto_nodes(a: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|j| 0.5 * a * (1.0 - (j as f64 * PI / n as f64).cos())).collect()
}

/// Clenshaw-Curtis weights on `[0, a]` for [`lobatto_nodes`].
pub fn clenshaw_curtis(a: f64, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let nf = n as f64;
    if n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
    }
    for (j, wj) in w.iter_mut().enumerate().take(n).skip(1) {
        let theta = j as f64 * PI / nf;
        let mut v = 1.0;
        if n % 2 == 0 {
            for k in 1..n / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
            v -= (nf * theta).cos() / (nf * nf - 1.0);
        } else {
            for k in 1..=(n - 1) / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        *wj = 2.0 * v / nf;
    }
    w.iter().map(|x| x * 0.5 * a).collect()
}

/// Differentiation matrix in `x` on [`lobatto_nodes`].
pub fn diff_matrix(a: f64, n: usize) -> DMatrix<f64> {
    let t: Vec<f64> = (0..=n).map(|j| (j as f64 * PI / n as f64).cos()).collect();
    let c: Vec<f64> = (0..=n)
        .map(|j| {
            let base = if j == 0 || j == n { 2.0 } else { 1.0 };
            if j % 2 == 0 {
                base
            } else {
                -base
            }
        })
        .collect();
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c[i] / c[j] / (t[i] - t[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    // x = a(1 - t)/2, so d/dx = -(2/a) d/dt
    d * (-2.0 / a)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_matches_cosine_definition() {
        let c = [0.3, -1.0, 0.25, 2.0, -0.5];
        for s in [-1.0, -0.3, 0.0, 0.71, 1.0] {
            let theta = f64::acos(s);
            let want: f64 = c.iter().enumerate().map(|(k, ck)| ck * (k as f64 * theta).cos()).sum();
            assert!((eval(&c, s) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_t3() {
        // T3 = 4s^3 - 3s, T3' = 12 s^2 - 3 = 3 T0 + 6 T2
        let d = derivative(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(d.len(), 3);
        assert!((d[0] - 3.0).abs() < 1e-15 && d[1].abs() < 1e-15 && (d[2] - 6.0).abs() < 1e-15);
    }

    #[test]
    fn weights_integrate_polynomials() {
        for n in [8, 9, 64] {
            let a = 2.5;
            let x = lobatto_nodes(a, n);
            let w = clenshaw_curtis(a, n);
            let total: f64 = w.iter().sum();
            assert!((total - a).abs() < 1e-14);
            let m3: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(3)).sum();
            assert!((m3 - a.powi(4) / 4.0).abs() < 1e-12);
            assert!(w.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in [1, 2, 5, 32] {
            let (x, w) = gauss_legendre(n);
            for d in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
                assert!((got - want).abs() < 1e-13, "n={n} d={d}: {got}");
            }
        }
    }

    #[test]
    fn differentiates_smooth_functions() {
        let a = 3.0;
        let n = 40;
        let x = lobatto_nodes(a, n);
        let d = diff_matrix(a, n);
        let f = nalgebra::DVector::from_iterator(n + 1, x.iter().map(|x| (0.7 * x).sin()));
        let df = &d * f;
        for (i, xi) in x.iter().enumerate() {
            assert!((df[i] - 0.7 * (0.7 * xi).cos()).abs() < 1e-11);
        }
    }
}
