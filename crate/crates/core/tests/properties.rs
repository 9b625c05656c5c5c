//! Randomized invariants of the closed forms.

use proptest::prelude::*;
use sle_passage::formulas::{
    area_integrand, left_passage_one, left_passage_two, separation_probability, sigma,
    two_path_one_point, two_path_two_point,
};
use sle_passage::special_fn::{g_sigma, SigmaValue};
use sle_passage::HalfPlanePoint;

fn point() -> impl Strategy<Value = HalfPlanePoint> {
    (-5.0f64..5.0, 0.01f64..5.0).prop_map(|(x, y)| HalfPlanePoint::new(x, y).unwrap())
}

fn disk_point() -> impl Strategy<Value = HalfPlanePoint> {
    (0.01f64..0.99, 0.01f64..3.13)
        .prop_map(|(r, t)| HalfPlanePoint::new(r * t.cos(), r * t.sin()).unwrap())
}

proptest! {
    #[test]
    fn joint_left_is_a_probability_below_marginals(z in point(), w in point()) {
        let joint = left_passage_two(z, w).value();
        prop_assert!((0.0..=1.0).contains(&joint));
        prop_assert!(joint <= left_passage_one(z).value() + 1e-12);
        prop_assert!(joint <= left_passage_one(w).value() + 1e-12);
        let both_right = 1.0 - left_passage_one(z).value() - left_passage_one(w).value() + joint;
        prop_assert!(both_right >= -1e-12);
    }

    #[test]
    fn joint_left_is_symmetric_and_scale_invariant(z in point(), w in point(), lambda in 0.1f64..10.0) {
        let base = left_passage_two(z, w).value();
        prop_assert!((base - left_passage_two(w, z).value()).abs() < 1e-12);
        let scaled = left_passage_two(z.scale(lambda).unwrap(), w.scale(lambda).unwrap()).value();
        prop_assert!((base - scaled).abs() < 1e-10, "{} vs {}", base, scaled);
    }

    #[test]
    fn sigma_lies_in_unit_interval(z in point(), w in point()) {
        let s = sigma(z, w).value();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s - sigma(w, z).value()).abs() < 1e-14);
    }

    #[test]
    fn g_is_decreasing(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let g_lo = g_sigma(SigmaValue::new(lo).unwrap());
        let g_hi = g_sigma(SigmaValue::new(hi).unwrap());
        prop_assert!(g_hi <= g_lo + 1e-14);
        prop_assert!((0.0..=1.0).contains(&g_hi));
    }

    #[test]
    fn separation_is_a_probability(z in point(), w in point()) {
        let p = separation_probability(z, w).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn two_path_two_point_below_one_point(z in point(), w in point()) {
        let p = two_path_two_point(z, w).unwrap().value();
        prop_assert!(p <= two_path_one_point(z).value() + 1e-12);
        prop_assert!(p <= two_path_one_point(w).value() + 1e-12);
    }

    #[test]
    fn area_integrand_is_symmetric_probability(z in disk_point(), w in disk_point()) {
        let f = area_integrand(z, w).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - area_integrand(w, z).unwrap().value()).abs() < 1e-10);
    }
}
