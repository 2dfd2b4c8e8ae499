use num_complex::Complex64 as C;
use proptest::prelude::*;
use serde_json::json;

use sklyanin::mb::classical::{mb_wronskian_a, mb_wronskian_bcd, psi, MbForm};
use sklyanin::mb::MBParams;
use sklyanin::report::{from_json, to_json, VerificationReport};
use sklyanin::roots::{build_root_system, Family};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::A), Just(Family::B), Just(Family::C), Just(Family::D)]
}

/// Real parameters with every `x ± y` and `2x` at least 0.05 from an integer,
/// so that the poles stay simple for all families. `b` is checked against `a`.
fn generic(a: Vec<f64>, b: Vec<f64>) -> Option<(Vec<C>, Vec<C>)> {
    let far = |d: f64| {
        let d = d.rem_euclid(1.0);
        d.min(1.0 - d) >= 0.05
    };
    let all: Vec<f64> = a.iter().chain(&b).copied().collect();
    for (i, x) in all.iter().enumerate() {
        if !far(2.0 * x) {
            return None;
        }
        for y in &all[..i] {
            if !far(x - y) || !far(x + y) {
                return None;
            }
        }
    }
    let c = |v: Vec<f64>| v.into_iter().map(|x| C::new(x, 0.0)).collect();
    Some((c(a), c(b)))
}

/// Four parameters near distinct points of a lattice on which every `x ± y`
/// and `2x` stays away from the integers.
fn spread_a() -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec(-0.015..0.015f64, 4)
        .prop_map(|j| [0.03, 0.13, -0.31, 0.42].iter().zip(j).map(|(x, d)| C::new(x + d, 0.0)).collect())
}

/// `b` off the real axis, hence generic with respect to real `a`.
fn complex_b() -> impl Strategy<Value = Vec<C>> {
    prop::collection::vec((-0.45..0.45f64, 0.05..0.2f64), 2).prop_map(|v| v.into_iter().map(|(re, im)| C::new(re, im)).collect())
}

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dz_matches_finite_difference(a in prop::collection::vec(-0.45..0.45f64, 3), b0 in -0.45..0.45f64, z in 0.1..0.5f64) {
        let ab = generic(a, vec![b0]);
        prop_assume!(ab.is_some());
        let (a, b) = ab.unwrap();
        let p = MBParams::new(a, b, vec![0], C::new(z, 0.0)).unwrap();
        let s = psi(&p, 0).unwrap();
        let h = 1e-5 * z;
        let zc = C::new(z, 0.0);
        let fd = zc * (s.eval(zc + h) - s.eval(zc - h)) / (2.0 * h);
        let exact = s.dz().eval(zc);
        prop_assert!((fd - exact).norm() <= 1e-6 * s.term_scale(z).max(exact.norm()), "{fd} vs {exact}");
    }

    #[test]
    fn wronskian_symmetric_in_b(a in spread_a(), b in complex_b(), z in 0.1..0.3f64) {
        let rev: Vec<C> = b.iter().rev().copied().collect();
        let z = C::new(z, 0.0);
        let w1 = mb_wronskian_a(&MBParams::new(a.clone(), b.clone(), vec![0, 2], z).unwrap(), MbForm::Derived).unwrap();
        let w2 = mb_wronskian_a(&MBParams::new(a.clone(), rev.clone(), vec![0, 2], z).unwrap(), MbForm::Derived).unwrap();
        prop_assert!(close(w1, w2, 1e-10));
        let w1 = mb_wronskian_bcd(Family::C, &MBParams::new(a.clone(), b.clone(), vec![1, 3], z).unwrap(), MbForm::Derived).unwrap();
        let w2 = mb_wronskian_bcd(Family::C, &MBParams::new(a, rev, vec![1, 3], z).unwrap(), MbForm::Derived).unwrap();
        prop_assert!(close(w1, w2, 1e-10));
    }

    #[test]
    fn wronskian_symmetric_in_index(a in spread_a(), b in complex_b(), z in 0.1..0.3f64, fam in family()) {
        let z = C::new(z, 0.0);
        let eval = |index: Vec<usize>| {
            let p = MBParams::new(a.clone(), b.clone(), index, z).unwrap();
            match fam {
                Family::A => mb_wronskian_a(&p, MbForm::Derived),
                f => mb_wronskian_bcd(f, &p, MbForm::Derived),
            }
            .unwrap()
        };
        prop_assert!(close(eval(vec![0, 2]), eval(vec![2, 0]), 1e-10));
    }

    #[test]
    fn real_parameters_give_real_rank_two_wronskian(a in prop::collection::vec(-0.45..0.45f64, 3), b0 in -0.45..0.45f64, z in 0.1..0.4f64) {
        let ab = generic(a, vec![b0]);
        prop_assume!(ab.is_some());
        let (a, b) = ab.unwrap();
        let p = MBParams::new(a, b, vec![0, 1], C::new(z, 0.0)).unwrap();
        let w = mb_wronskian_a(&p, MbForm::Derived).unwrap();
        prop_assert!(w.im.abs() <= 1e-12 * w.norm(), "{w}");
    }

    #[test]
    fn root_system_invariants(fam in family(), n in 1usize..=8) {
        let rs = build_root_system(fam, n).unwrap();
        let count = rs.positive_roots.len() as u64;
        prop_assert_eq!(rs.dim_g, rs.lie_rank() as u64 + 2 * count);
        prop_assert_eq!(rs.root_count(), 2 * rs.positive_roots.len());
        let mut sorted = rs.positive_roots.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), rs.positive_roots.len());
        prop_assert_eq!(rs.twelve_rho_squared(), (rs.dual_coxeter * rs.dim_g) as i64);
        for root in &rs.positive_roots {
            prop_assert_eq!(root.len(), n);
            prop_assert!(root.iter().any(|&c| c != 0));
        }
    }

    #[test]
    fn report_json_round_trip(rel in 0.0..1.0f64, tol in 1e-16..1e-3f64, re in -1e6..1e6f64, im in -1e6..1e6f64, seed in any::<u64>(), note in "[a-z ]{0,12}") {
        let a = C::new(re, im);
        let b = a * (1.0 + rel);
        let r = VerificationReport::identity("prop/check", json!({"x": re}), a, b, tol)
            .with_seed(seed)
            .with_note(note);
        let back = from_json(&to_json(std::slice::from_ref(&r)).unwrap()).unwrap();
        prop_assert_eq!(back, vec![r]);
    }
}

#[test]
fn low_rank_root_systems() {
    let a3 = build_root_system(Family::A, 3).unwrap();
    assert_eq!((a3.positive_roots.len(), a3.weyl_order, a3.dim_g, a3.dual_coxeter), (3, 6, 8, 3));
    let c2 = build_root_system(Family::C, 2).unwrap();
    assert_eq!((c2.positive_roots.len(), c2.weyl_order, c2.dim_g, c2.dual_coxeter), (4, 8, 10, 3));
    assert!(c2.positive_roots.contains(&vec![2, 0]));
    let d3 = build_root_system(Family::D, 3).unwrap();
    assert_eq!((d3.positive_roots.len(), d3.weyl_order, d3.dim_g, d3.dual_coxeter), (6, 24, 15, 4));
    let b1 = build_root_system(Family::B, 1).unwrap();
    assert_eq!((b1.positive_roots.clone(), b1.weyl_order, b1.dim_g, b1.dual_coxeter), (vec![vec![1]], 2, 3, 1));
}

#[test]
fn duplicate_contour_index_is_rejected() {
    let a = vec![C::new(0.1, 0.0), C::new(0.3, 0.0)];
    assert!(MBParams::new(a, vec![], vec![1, 1], C::new(0.2, 0.0)).is_err());
}
