//! Closed-form integrals of `poly * exp(affine)` over simplices via divided
//! differences of `exp`.

use crate::error::{Error, Result};

/// Largest exponent magnitude accepted before `exp` is considered unsafe.
pub const EXP_LIMIT: f64 = 700.0;

/// Node spread below which a divided difference is summed as a Taylor series.
const TAYLOR_SPREAD: f64 = 1.0;
const TAYLOR_TERMS: usize = 48;

pub fn check_exponent(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > EXP_LIMIT {
        return Err(Error::OverflowRisk(x));
    }
    Ok(())
}

/// `[x_0, ..., x_m] exp` for sorted nodes whose spread is at most `TAYLOR_SPREAD`.
///
/// With `c` the mean and `y = x - c`, the divided difference equals
/// `e^c * sum_p h_p(y) / (p + m)!` where `h_p` is the complete homogeneous
/// symmetric polynomial.
fn taylor_divdiff(x: &[f64]) -> f64 {
    let m = x.len() - 1;
    let c = x.iter().sum::<f64>() / x.len() as f64;
    let mut h = [0.0f64; TAYLOR_TERMS];
    h[0] = 1.0;
    for &xi in x {
        let y = xi - c;
        for p in 1..TAYLOR_TERMS {
            h[p] += y * h[p - 1];
        }
    }
    let mut inv_fact = 1.0;
    for k in 2..=m {
        inv_fact /= k as f64;
    }
    let mut sum = 0.0;
    for (p, hp) in h.iter().enumerate() {
        sum += hp * inv_fact;
        inv_fact /= (p + m + 1) as f64;
    }
    c.exp() * sum
}

/// Divided difference of `exp` over the multiset `nodes`.
pub fn divdiff_exp(nodes: &[f64]) -> Result<f64> {
    assert!(!nodes.is_empty());
    for &x in nodes {
        check_exponent(x)?;
    }
    let mut x = nodes.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    let k = x.len();
    if x[k - 1] - x[0] <= TAYLOR_SPREAD {
        return Ok(taylor_divdiff(&x));
    }
    // table[i] holds [x_i .. x_{i+len-1}] for the current length
    let mut table: Vec<f64> = x.iter().map(|v| v.exp()).collect();
    for len in 2..=k {
        for i in 0..=k - len {
            let j = i + len - 1;
            let spread = x[j] - x[i];
            table[i] = if spread <= TAYLOR_SPREAD {
                taylor_divdiff(&x[i..=j])
            } else {
                (table[i + 1] - table[i]) / spread
            };
        }
    }
    Ok(table[0])
}

/// `∫_S e^ℓ dμ` for a simplex of measure `measure` and exponent values `exps`
/// at its vertices.
pub fn exp_integral_simplex(measure: f64, exps: &[f64]) -> Result<f64> {
    simplex_integral(measure, exps, &[])
}

/// `∫_S Π_k A_k(μ) e^{ℓ(μ)} dμ` where `ℓ` and every `A_k` are affine on `S`,
/// given by their values at the vertices.
///
/// Uses `∫_S λ^α e^ℓ = d!·|S|·Π α_i!·[ℓ_i repeated α_i + 1 times] exp`.
pub fn simplex_integral(measure: f64, exps: &[f64], factors: &[&[f64]]) -> Result<f64> {
    let d = exps.len() - 1;
    let mut d_fact = 1.0;
    for k in 2..=d {
        d_fact *= k as f64;
    }
    let k = factors.len();
    let npts = exps.len();
    // Enumerate index tuples; group by multiplicity vector alpha.
    let mut groups: Vec<(Vec<usize>, f64)> = Vec::new();
    let total = npts.pow(k as u32);
    for code in 0..total {
        let mut alpha = vec![0usize; npts];
        let mut coef = 1.0;
        let mut c = code;
        for f in factors {
            let i = c % npts;
            c /= npts;
            alpha[i] += 1;
            coef *= f[i];
        }
        if coef == 0.0 {
            continue;
        }
        match groups.iter_mut().find(|(a, _)| *a == alpha) {
            Some(g) => g.1 += coef,
            None => groups.push((alpha, coef)),
        }
    }
    let mut sum = 0.0;
    let mut nodes = Vec::with_capacity(npts + k);
    for (alpha, coef) in groups {
        nodes.clear();
        let mut afact = 1.0;
        for (i, &a) in alpha.iter().enumerate() {
            for _ in 0..=a {
                nodes.push(exps[i]);
            }
            for j in 2..=a {
                afact *= j as f64;
            }
        }
        sum += coef * afact * divdiff_exp(&nodes)?;
    }
    Ok(d_fact * measure * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite 10-point Gauss-Legendre on [lo, hi].
    fn gauss_legendre<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
        const X: [f64; 5] = [
            0.148_874_338_981_631_2,
            0.433_395_394_129_247_2,
            0.679_409_568_299_024_4,
            0.865_063_366_688_984_5,
            0.973_906_528_517_171_7,
        ];
        const W: [f64; 5] = [
            0.295_524_224_714_752_9,
            0.269_266_719_309_996_4,
            0.219_086_362_515_982_04,
            0.149_451_349_150_580_6,
            0.066_671_344_308_688_14,
        ];
        let h = (hi - lo) / panels as f64;
        let mut s = 0.0;
        for p in 0..panels {
            let c = lo + (p as f64 + 0.5) * h;
            for (x, w) in X.iter().zip(W) {
                s += w * (f(c - 0.5 * h * x) + f(c + 0.5 * h * x));
            }
        }
        0.5 * h * s
    }

    #[test]
    fn two_node_closed_form() {
        for (a, b) in [(0.0, 1.0), (-3.0, 2.5), (1.0, 1.0 + 1e-9), (5.0, 5.0), (-20.0, 20.0)] {
            let dd = divdiff_exp(&[a, b]).unwrap();
            let want = if a == b { f64::exp(a) } else { f64::exp(a) * f64::exp_m1(b - a) / (b - a) };
            assert!((dd - want).abs() <= 1e-13 * want.abs().max(1.0), "{a} {b}: {dd} vs {want}");
        }
    }

    #[test]
    fn repeated_nodes_are_derivatives() {
        // [x,x,x] exp = e^x / 2
        let x = 0.7f64;
        assert!((divdiff_exp(&[x, x, x]).unwrap() - x.exp() / 2.0).abs() < 1e-15);
        let x = 30.0f64;
        let v = divdiff_exp(&[x, x, x, x]).unwrap();
        assert!((v / (x.exp() / 6.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn taylor_and_recursion_agree_near_threshold() {
        // Nodes straddling the switch; compare against the explicit three-node formula.
        for s in [0.9, 0.999, 1.001, 1.1] {
            let (a, b, c) = (0.0, 0.4 * s, s);
            let explicit = (f64::exp(a) / ((a - b) * (a - c))
                + f64::exp(b) / ((b - a) * (b - c))
                + f64::exp(c) / ((c - a) * (c - b))) as f64;
            let dd = divdiff_exp(&[a, b, c]).unwrap();
            assert!((dd - explicit).abs() < 1e-12, "{s}: {dd} vs {explicit}");
        }
    }

    #[test]
    fn interval_integrals_match_gauss_legendre() {
        let cases = [(0.0, 1.0, -3.0, 2.0), (-1.0, 2.0, 20.0, -20.0), (0.5, 0.5001, 1.0, 1.0 + 1e-12), (0.0, 3.0, 0.0, 0.0)];
        for (lo, hi, e0, e1) in cases {
            let ell = |x: f64| e0 + (e1 - e0) * (x - lo) / (hi - lo);
            let a = [1.0, -2.0];
            let aff = |x: f64| a[0] + (a[1] - a[0]) * (x - lo) / (hi - lo);
            let gl0 = gauss_legendre(|x| ell(x).exp(), lo, hi, 200);
            let gl1 = gauss_legendre(|x| aff(x) * ell(x).exp(), lo, hi, 200);
            let gl2 = gauss_legendre(|x| aff(x) * aff(x) * aff(x) * ell(x).exp(), lo, hi, 200);
            let k0 = exp_integral_simplex(hi - lo, &[e0, e1]).unwrap();
            let k1 = simplex_integral(hi - lo, &[e0, e1], &[&a]).unwrap();
            let k2 = simplex_integral(hi - lo, &[e0, e1], &[&a, &a, &a]).unwrap();
            for (k, g) in [(k0, gl0), (k1, gl1), (k2, gl2)] {
                assert!((k - g).abs() <= 1e-10 * g.abs().max(1e-300), "{k} vs {g}");
            }
        }
    }

    #[test]
    fn triangle_monomials() {
        // Reference triangle (0,0),(1,0),(0,1), exponent zero: ∫ x^2 = 1/12, ∫ x y = 1/24.
        let x = [0.0, 1.0, 0.0];
        let y = [0.0, 0.0, 1.0];
        let z = [0.0; 3];
        let ixx = simplex_integral(0.5, &z, &[&x, &x]).unwrap();
        let ixy = simplex_integral(0.5, &z, &[&x, &y]).unwrap();
        assert!((ixx - 1.0 / 12.0).abs() < 1e-15);
        assert!((ixy - 1.0 / 24.0).abs() < 1e-15);
        // ∫ e^{x} over the triangle = e - 2
        let e = simplex_integral(0.5, &[0.0, 1.0, 0.0], &[]).unwrap();
        assert!((e - (std::f64::consts::E - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_rejected() {
        assert!(matches!(divdiff_exp(&[0.0, 701.0]), Err(Error::OverflowRisk(_))));
        assert!(divdiff_exp(&[-699.0, 699.0]).is_ok());
    }
}
