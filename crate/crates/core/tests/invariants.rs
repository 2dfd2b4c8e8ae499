use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sklyanin::dpp::build_default_kernel;
use sklyanin::oracles::{monte_carlo, quad_real_nd, quad_torus_nd, GaussianSampler};
use sklyanin::poly::monomial_basis;
use sklyanin::qsw::{root_pochhammer_product, root_theta_factorized, root_theta_product, separated_torus_points};
use sklyanin::roots::{build_root_system, Family};
use sklyanin::special::{hermite_basis, log_gamma, sklyanin_factor, theta, theta_product};
use sklyanin::sw::{sw_biorthogonal_determinant, sw_moment_determinant, SWProblem};
use sklyanin::weights::{fourier_eval, FourierWeight, RealWeight};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::A), Just(Family::B), Just(Family::C), Just(Family::D)]
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn weyl_vector_coordinates(fam in family(), n in 1usize..=10) {
        let rs = build_root_system(fam, n).unwrap();
        let expected = |i: usize| -> f64 {
            let (n, i) = (n as f64, i as f64);
            match fam {
                Family::A => (n - 1.0) / 2.0 - i,
                Family::B => n - i - 0.5,
                Family::C => n - i,
                Family::D => n - i - 1.0,
            }
        };
        for (i, v) in rs.weyl_vector().iter().enumerate() {
            prop_assert_eq!(*v, expected(i));
        }
    }

    #[test]
    fn gamma_reflection(re in -4.0..4.0f64, im in -3.0..3.0f64) {
        let z = C::new(re, im);
        prop_assume!((re - re.round()).abs() > 1e-3 || im.abs() > 1e-3);
        let lhs = (log_gamma(z).unwrap() + log_gamma(C::new(1.0, 0.0) - z).unwrap()).exp();
        let rhs = PI / (z * PI).sin();
        prop_assert!(rel(lhs, rhs) < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn sklyanin_factor_is_pi_over_gamma_squared(x in 0.1..20.0f64, negative in any::<bool>()) {
        let x = if negative { -x } else { x };
        let g = log_gamma(C::new(0.0, x / (2.0 * PI))).unwrap();
        let gamma_sq = (2.0 * g.re).exp();
        prop_assert!((sklyanin_factor(x) * gamma_sq / PI - 1.0).abs() < 1e-10);
    }

    #[test]
    fn theta_series_matches_product(r in 0.1..3.0f64, arg in 0.0..2.0 * PI, k in 0usize..3) {
        let q = C::new([0.1, 0.3, 0.6][k], 0.0);
        let z = C::from_polar(r, arg);
        let a = theta(z, q).unwrap();
        let b = theta_product(z, q).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn root_products_split(fam in family(), n in 1usize..=3, k in 0usize..3, seed in any::<u64>()) {
        prop_assume!(!(fam == Family::D && n == 1));
        let q = C::new([0.1, 0.3, 0.6][k], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = separated_torus_points(fam, n, &mut rng);
        let rs = build_root_system(fam, n).unwrap();
        let split = root_theta_product(&rs, &z, q).unwrap();
        prop_assert!(rel(root_pochhammer_product(&rs, &z, q).unwrap(), split) < 1e-12);
        prop_assert!(rel(root_theta_factorized(fam, &z, q).unwrap(), split) < 1e-10);
    }
}

#[test]
fn fourier_constant_term() {
    let w = FourierWeight::finite([(0, C::new(1.3, 0.0)), (1, C::new(0.2, 0.1)), (-1, C::new(0.2, -0.1)), (3, C::new(-0.05, 0.0))]);
    let r = quad_torus_nd(&|z: &[C]| fourier_eval(&w, z[0]).unwrap(), 1, 8, 1e-14).unwrap();
    assert!((r.value - C::new(1.3, 0.0)).norm() < 1e-12);
    let g = FourierWeight::Geometric { amplitude: 0.7, ratio: 0.5 };
    let r = quad_torus_nd(&|z: &[C]| fourier_eval(&g, z[0]).unwrap(), 1, 64, 1e-14).unwrap();
    assert!((r.value - g.coefficient(0)).norm() < 1e-12);
}

#[test]
fn monte_carlo_interval_covers_truth() {
    // int exp(-|x|^2) over R^2 is pi.
    let sampler = GaussianSampler { center: vec![0.2, -0.1], scale: 0.9 };
    let f = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp();
    let covered = (0..100u64)
        .filter(|&seed| {
            let r = monte_carlo(&f, &sampler, 4000, seed).unwrap();
            (r.value.re - PI).abs() <= r.error_estimate
        })
        .count();
    assert!(covered >= 99, "covered {covered}/100");
}

#[test]
fn biorthogonal_determinant_is_basis_independent() {
    for fam in Family::ALL {
        for n in 1..=3 {
            for weight in [RealWeight::gaussian(), RealWeight::quartic()] {
                let problem = SWProblem::new(build_root_system(fam, n).unwrap(), weight).unwrap();
                let z = sw_moment_determinant(&problem).unwrap();
                for basis in [monomial_basis(n), hermite_basis(n)] {
                    let d = sw_biorthogonal_determinant(&problem, &basis, &basis).unwrap();
                    assert!((d / z - 1.0).abs() < 1e-9, "{fam}{n}: {d} vs {z}");
                }
            }
        }
    }
}

#[test]
fn kernel_determinant_is_normalized() {
    for fam in Family::ALL {
        for n in 1..=2 {
            let problem = SWProblem::new(build_root_system(fam, n).unwrap(), RealWeight::gaussian()).unwrap();
            let model = build_default_kernel(&problem).unwrap();
            let f = |x: &[f64]| model.correlation(x).unwrap().value;
            let r = quad_real_nd(&f, n, &model.measure, 40).unwrap();
            let factorial = if n == 2 { 2.0 } else { 1.0 };
            assert!((r.value.re / factorial - 1.0).abs() < 1e-8, "{fam}{n}: {}", r.value.re);
        }
    }
}

#[test]
fn two_point_function_integrates_to_one_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for fam in Family::ALL {
        for n in 2..=3 {
            let problem = SWProblem::new(build_root_system(fam, n).unwrap(), RealWeight::gaussian()).unwrap();
            let model = build_default_kernel(&problem).unwrap();
            let (power, rate) = model.growth();
            for _ in 0..3 {
                let x: f64 = rng.gen_range(-1.5..1.5);
                let kxx = model.kernel(x, x);
                let rho2 = model.integrate(|y| model.correlation(&[x, y]).unwrap().value, 2 * power, 2.0 * rate).unwrap();
                assert!((rho2 - (n as f64 - 1.0) * kxx).abs() <= 1e-7 * kxx.abs().max(1.0), "{fam}{n} x = {x}: {rho2} vs {kxx}");
            }
        }
    }
}
