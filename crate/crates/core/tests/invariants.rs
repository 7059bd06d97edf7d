use mu_entropy::exact::q_int;
use mu_entropy::exp_integrals::{bundle, AffinePiece, Decomposition, PLConvexFunction};
use mu_entropy::na_entropy::{
    dh_measure, mu_futaki, na_entropy, tilted_mu_lambda, vector_mu_entropy, EntropyParams, ToricTestConfig,
};
use mu_entropy::polytope::Polytope;
use mu_entropy::toric_metric::{random_momentum, SymplecticPotential1D, ToricMetric};
use mu_entropy::verify::{random_config, random_lattice_polytope};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn case(seed: u64, dim: usize) -> ToricTestConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_lattice_polytope(&mut rng, dim);
    random_config(&mut rng, &p)
}

fn translate(p: &Polytope, v: &[i64]) -> Polytope {
    let pts = p
        .vertices()
        .iter()
        .map(|x| x.iter().zip(v).map(|(a, b)| a + q_int(*b)).collect())
        .collect();
    Polytope::from_vertices(pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zero_tau_gives_volume_and_boundary(seed in 0u64..10_000, dim in 1usize..=2) {
        let tc = case(seed, dim);
        let b = bundle(tc.polytope(), tc.q(), 0.0, false).unwrap();
        prop_assert!(close(b.i0, tc.polytope().volume_f64(), 1e-12));
        prop_assert!(b.i1.abs() < 1e-12);
        let sigma: f64 = num_traits::ToPrimitive::to_f64(&tc.polytope().boundary_measure()).unwrap();
        prop_assert!(close(b.b0, sigma, 1e-12));
    }

    #[test]
    fn rescaling_q_against_tau(seed in 0u64..10_000, dim in 1usize..=2, tau in 0.05f64..3.0, d in 0.25f64..4.0) {
        let tc = case(seed, dim);
        let a = bundle(tc.polytope(), tc.q(), tau, false).unwrap();
        let b = bundle(tc.polytope(), &tc.q().scaled(d), tau / d, false).unwrap();
        prop_assert!(close(a.i0, b.i0, 1e-10) && close(a.i1, b.i1, 1e-10) && close(a.b0, b.b0, 1e-10));
    }

    #[test]
    fn constant_shift_scales_mass(seed in 0u64..10_000, dim in 1usize..=2, tau in 0.0f64..3.0, c in 0.0f64..2.0) {
        let tc = case(seed, dim);
        let a = bundle(tc.polytope(), tc.q(), tau, false).unwrap();
        let b = bundle(tc.polytope(), &tc.q().shifted(-c), tau, false).unwrap();
        let f = (-tau * c).exp();
        prop_assert!(close(b.i0, f * a.i0, 1e-10) && close(b.b0, f * a.b0, 1e-10));
    }

    #[test]
    fn na_entropy_ignores_constant_shift(seed in 0u64..10_000, dim in 1usize..=2, tau in 0.0f64..3.0, c in 0.0f64..2.0, lambda in -10.0f64..0.0) {
        let tc = case(seed, dim);
        let shifted = ToricTestConfig::new(tc.polytope().clone(), tc.q().shifted(-c)).unwrap();
        let params = EntropyParams { lambda, tau };
        let a = na_entropy(&tc, params).unwrap();
        let b = na_entropy(&shifted, params).unwrap();
        prop_assert!(close(a.mu, b.mu, 1e-9), "{a:?} {b:?}");
        prop_assert!(close(a.mu_lambda, b.mu_lambda, 1e-9));
    }

    #[test]
    fn lattice_translation_invariance(seed in 0u64..10_000, dim in 1usize..=2, tau in 0.0f64..2.5, shift in prop::collection::vec(-3i64..=3, 2)) {
        let tc = case(seed, dim);
        let v = &shift[..dim];
        let moved = translate(tc.polytope(), v);
        let pieces = tc
            .q()
            .pieces
            .iter()
            .map(|p| {
                let off: f64 = p.gradient.iter().zip(v).map(|(g, s)| g * *s as f64).sum();
                AffinePiece { gradient: p.gradient.clone(), constant: p.constant - off }
            })
            .collect();
        let q = PLConvexFunction::new(pieces).unwrap();
        let a = bundle(tc.polytope(), tc.q(), tau, false).unwrap();
        let b = bundle(&moved, &q, tau, false).unwrap();
        prop_assert!(close(a.i0, b.i0, 1e-10) && close(a.i1, b.i1, 1e-10) && close(a.b0, b.b0, 1e-10));
    }

    #[test]
    fn dh_mass_is_volume(seed in 0u64..10_000, dim in 1usize..=2) {
        let tc = case(seed, dim);
        prop_assert!(close(dh_measure(&tc).total_mass(), tc.polytope().volume_f64(), 1e-10));
    }

    #[test]
    fn futaki_vanishes_on_constants(seed in 0u64..10_000, dim in 1usize..=2, lambda in -10.0f64..0.0, c in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_lattice_polytope(&mut rng, dim);
        let xi: Vec<f64> = (0..dim).map(|k| 0.3 * (k as f64 + 1.0)).collect();
        let f = mu_futaki(&p, &xi, &PLConvexFunction::affine(vec![0.0; dim], c), lambda).unwrap();
        prop_assert!(f.abs() < 1e-9, "{f}");
    }

    #[test]
    fn tilted_matches_vector_at_zero_tau(seed in 0u64..10_000, dim in 1usize..=2, lambda in -10.0f64..0.0) {
        let tc = case(seed, dim);
        let d = Decomposition::new(tc.polytope(), tc.q()).unwrap();
        let xi: Vec<f64> = (0..dim).map(|k| 0.7 - 0.4 * k as f64).collect();
        let a = tilted_mu_lambda(&d, &xi, 0.0, lambda).unwrap();
        let b = vector_mu_entropy(tc.polytope(), &xi, lambda).unwrap();
        prop_assert!(close(a, b, 1e-10), "{a} {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn w_entropy_is_shift_invariant(seed in 0u64..10_000, c in -3.0f64..3.0, lambda in -10.0f64..0.0) {
        let u = SymplecticPotential1D::random(1.0 + (seed % 3) as f64, 8, 0.5, seed).unwrap();
        let m = ToricMetric::with_default_grid(&u).unwrap();
        let f = random_momentum(&m, 5, 1.0, seed + 1);
        let g = m.momentum(|_| c);
        let shifted = mu_entropy::toric_metric::Momentum1D {
            nodes: f.nodes.clone(),
            values: f.values.iter().zip(&g.values).map(|(a, b)| a + b).collect(),
        };
        prop_assert!(close(m.w_entropy(&f, lambda).unwrap(), m.w_entropy(&shifted, lambda).unwrap(), 1e-11));
    }

    #[test]
    fn critical_momentum_is_a_local_max(seed in 0u64..10_000, lambda in -10.0f64..0.0, eps in 1e-3f64..1e-1) {
        let u = SymplecticPotential1D::random(1.0 + (seed % 2) as f64, 8, 0.5, seed).unwrap();
        let m = ToricMetric::with_default_grid(&u).unwrap();
        let c = m.critical_momentum(lambda, 1e-10, 100, None).unwrap();
        let g = random_momentum(&m, 5, 1.0, seed + 2);
        for sign in [1.0, -1.0] {
            let probe = mu_entropy::toric_metric::Momentum1D {
                nodes: c.f.nodes.clone(),
                values: c.f.values.iter().zip(&g.values).map(|(a, b)| a + sign * eps * b).collect(),
            };
            prop_assert!(m.w_entropy(&probe, lambda).unwrap() <= c.value + 1e-12);
        }
    }

    #[test]
    fn vector_entropy_bounded_by_metric(seed in 0u64..10_000, lambda in -10.0f64..0.0, xi in -6.0f64..6.0) {
        let a = 1 + (seed % 3) as i64;
        let u = SymplecticPotential1D::random(a as f64, 8, 0.5, seed).unwrap();
        let m = ToricMetric::with_default_grid(&u).unwrap();
        let p = Polytope::interval(q_int(a)).unwrap();
        prop_assert!(vector_mu_entropy(&p, &[xi], lambda).unwrap() <= m.mu_entropy(lambda).unwrap() + 1e-8);
    }
}

#[test]
fn grid_refinement_is_stable() {
    for seed in 0..4 {
        let u = SymplecticPotential1D::random(1.5, 10, 0.5, seed).unwrap();
        for lambda in [0.0, -2.0] {
            let coarse = ToricMetric::new(&u, 96).unwrap().mu_entropy(lambda).unwrap();
            let fine = ToricMetric::new(&u, 192).unwrap().mu_entropy(lambda).unwrap();
            assert!((coarse - fine).abs() < 1e-9, "{coarse} {fine}");
        }
    }
}

#[test]
fn product_directions_are_flat_at_critical_vectors() {
    use mu_entropy::optimizer::maximize_over_xi;
    let p = Polytope::interval(q_int(1)).unwrap();
    let search = maximize_over_xi(&p, 30.0, 4, 1).unwrap();
    assert_eq!(search.maxima.len(), 2);
    let pl = PLConvexFunction::new(vec![
        AffinePiece { gradient: vec![-1.0], constant: 0.0 },
        AffinePiece { gradient: vec![1.0], constant: -1.0 },
    ])
    .unwrap();
    for opt in &search.maxima {
        let f = mu_futaki(&p, &opt.xi, &PLConvexFunction::affine(vec![1.0], 0.3), 30.0).unwrap();
        assert!(f.abs() < 1e-8);
        assert!(mu_futaki(&p, &opt.xi, &pl, 30.0).unwrap().is_finite());
    }
}

#[test]
fn futaki_nonnegative_at_maximizer() {
    use mu_entropy::optimizer::maximize_over_xi;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for a in [1, 2] {
        let p = Polytope::interval(q_int(a)).unwrap();
        for lambda in [0.0, -1.0, -10.0, 30.0 / a as f64] {
            let search = maximize_over_xi(&p, lambda, 4, 5).unwrap();
            for opt in &search.maxima {
                for _ in 0..40 {
                    let tc = random_config(&mut rng, &p);
                    let f = mu_futaki(&p, &opt.xi, tc.q(), lambda).unwrap();
                    assert!(f >= -1e-8, "a={a} λ={lambda} ξ={:?} fut={f}", opt.xi);
                }
            }
        }
    }
}
