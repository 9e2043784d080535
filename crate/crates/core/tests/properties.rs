use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssflab::asymptotics::{f_c, f_inverse, phi1, profile, ssf_predict, Boundary, Side};
use ssflab::capacity::{capacity, FeketeConfig};
use ssflab::counting::{count, random_hermitian, random_psd, tr_arctan, tr_arctan_staircase};
use ssflab::geometry::PlanarSet;
use ssflab::linalg::hermitian_eigenvalues;
use ssflab::resolvent::{kernel_value, Cutoff1D, KernelSpec, KernelVariant};
use ssflab::toeplitz::{toeplitz_matrix, QuadConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_are_monotone_in_threshold(seed in 0u64..10_000, dim in 1usize..8, s1 in 0.01f64..3.0, ds in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eig = hermitian_eigenvalues(&random_hermitian(dim, &mut rng)).unwrap();
        let lo = count(s1, &eig).unwrap();
        let hi = count(s1 + ds, &eig).unwrap();
        prop_assert!(hi.n_plus <= lo.n_plus && hi.n_minus <= lo.n_minus);
        prop_assert!(lo.n_plus + lo.n_minus <= dim);
    }

    #[test]
    fn arctan_trace_matches_staircase(seed in 0u64..10_000, dim in 1usize..8, scale in 0.05f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eig: Vec<f64> = hermitian_eigenvalues(&random_psd(dim, &mut rng)).unwrap().iter().map(|x| x.max(0.0)).collect();
        let direct = tr_arctan(&eig, scale).unwrap();
        let stairs = tr_arctan_staircase(&eig, scale).unwrap();
        prop_assert!((direct - stairs).abs() < 1e-10, "{} vs {}", direct, stairs);
    }

    #[test]
    fn tr_arctan_is_bounded_by_rank(seed in 0u64..10_000, dim in 1usize..8, scale in 0.01f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eig: Vec<f64> = hermitian_eigenvalues(&random_psd(dim, &mut rng)).unwrap().iter().map(|x| x.max(0.0)).collect();
        let t = tr_arctan(&eig, scale).unwrap();
        prop_assert!(t >= 0.0 && t <= dim as f64 * std::f64::consts::FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn inverse_round_trips(c in -3.0f64..3.0, ly in 0.0f64..30.0) {
        let y = ly.exp();
        let r = f_inverse(c, y).unwrap();
        prop_assert!((f_c(c, r.x) - y).abs() <= 1e-12 * y.max(r.x));
        prop_assert!(r.x > (c - 1.0).exp());
    }

    #[test]
    fn phi1_exceeds_phi0_for_large_constants(l in 20.0f64..1e6, c in 0.0f64..5.0) {
        let p = profile(-l, true).unwrap();
        prop_assert!(phi1(&p, c).unwrap() >= p.phi0);
    }

    #[test]
    fn predictor_relations(l in 20.0f64..1e8, b in 0.1f64..5.0, cap in 0.05f64..4.0, q in 0usize..5) {
        let p = |side, bd| ssf_predict(q, side, bd, -l, b, cap).unwrap();
        prop_assert_eq!(p(Side::Below, Boundary::Dirichlet).value, 0.0);
        prop_assert_eq!(p(Side::Below, Boundary::Neumann).value, 2.0 * p(Side::Above, Boundary::Neumann).value);
        prop_assert_eq!(p(Side::Above, Boundary::Dirichlet).value, -p(Side::Above, Boundary::Neumann).value);
    }

    #[test]
    fn kernel_symmetries(e in prop_oneof![-10.0f64..-0.01, 0.01f64..10.0], x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let cut = Cutoff1D::Gaussian { center: 0.0, width: 1.5 };
        let plain = KernelSpec::new(e, KernelVariant::Plain).unwrap();
        let tilde = KernelSpec::new(e, KernelVariant::Tilde).unwrap();
        prop_assert!((kernel_value(&plain, &cut, x, y) - kernel_value(&plain, &cut, y, x)).norm() < 1e-15);
        prop_assert!((kernel_value(&tilde, &cut, x, y) + kernel_value(&tilde, &cut, y, x)).norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn capacity_scales_linearly(scale in 0.05f64..20.0, dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        let set = PlanarSet::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]] };
        let cfg = FeketeConfig::default();
        let base = capacity(&set, &[24, 48], &cfg).unwrap().value;
        let moved = capacity(&set.clone().scaled(scale, [dx, dy]), &[24, 48], &cfg).unwrap().value;
        prop_assert!((moved / (scale * base) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn toeplitz_trace_is_flux(r in 0.2f64..0.9, cx in -0.3f64..0.3, cy in -0.3f64..0.3, q in 0usize..2) {
        // sum over all k of the diagonal is b |O| / 2pi; K = 60 leaves a negligible tail here
        let b = 2.0;
        let set = PlanarSet::disk([cx, cy], r);
        let op = toeplitz_matrix(&set, q, b, 60, &QuadConfig::default()).unwrap();
        let trace: Complex64 = (0..op.dim()).map(|k| op.entries[(k, k)]).sum();
        let flux = b * std::f64::consts::PI * r * r / (2.0 * std::f64::consts::PI);
        prop_assert!((trace.re - flux).abs() < 1e-9, "{} vs {}", trace.re, flux);
        let eig = hermitian_eigenvalues(&op.entries).unwrap();
        prop_assert!(eig.iter().all(|&v| v > -1e-12 && v < 1.0 + 1e-12));
    }
}
