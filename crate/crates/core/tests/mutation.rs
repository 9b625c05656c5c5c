//! The Green-limit check must reject a perturbed constant.

use sle_passage::special_fn::green_constant;
use sle_passage::verify::green_limit_check;

#[test]
fn green_limit_check_accepts_the_true_constant() {
    let (ok, detail) = green_limit_check(green_constant()).unwrap();
    assert!(ok, "{detail}");
}

#[test]
fn green_limit_check_rejects_one_percent_error() {
    for factor in [1.01, 0.99] {
        let (ok, detail) = green_limit_check(green_constant() * factor).unwrap();
        assert!(!ok, "factor {factor}: {detail}");
    }
}
