//! Gamma function, Gauss hypergeometric ₂F₁ on real arguments `x ≤ 1`, and
//! the two-point correlation factor
//!
//! ```text
//! G(σ) = 1 − σ ₂F₁(1, 4/3; 5/3; 1 − σ),   0 ≤ σ ≤ 1.
//! ```
//!
//! ₂F₁ uses the power series for `|x| ≤ 0.5`, the `x → 1 − x` connection
//! formula on `(0.5, 1)` and Pfaff's transformation for `x < −0.5`.
//! Because `c − a − b = −2/3` for the parameters of `G`, the connection
//! formula collapses (one Gamma ratio equals −1 and the second series is
//! `(1 − σ)^{-2/3}`) and gives
//!
//! ```text
//! G(σ) = 1 + σ ₂F₁(1, 4/3; 5/3; σ) − K σ^{1/3} (1 − σ)^{−2/3},
//! K = Γ(2/3) Γ(5/3) / Γ(4/3),
//! ```
//!
//! which is what [`g_sigma`] evaluates for `σ < 0.5`. There is no
//! cancellation near `σ = 0`: `σ ₂F₁(1, 4/3; 5/3; 1 − σ) ≈ K σ^{1/3}` is small
//! there. Near `σ = 1` the series form is rewritten as `(1 − σ)(1 − σ S)` so
//! that `G` keeps relative accuracy as it vanishes.

use std::f64::consts::PI;
use std::sync::LazyLock;

use crate::error::{domain, Error, Result};

/// Default absolute tolerance for ₂F₁.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Iteration cap for every power series.
pub const MAX_TERMS: usize = 10_000;
/// Largest `|x|` evaluated by the direct power series.
pub const SERIES_SWITCH: f64 = 0.5;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(gamma_real(x))
}

/// Γ on the whole real line minus the poles, via reflection for `x < 0.5`.
fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_real(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        // split the power so that large x does not overflow before exp(-t)
        let half = t.powf(0.5 * (x + 0.5));
        (2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc
    }
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

/// 1/Γ(x), zero at the poles.
fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_real(x)
    }
}

/// Parameters and argument of a Gauss hypergeometric evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Query {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
}

impl Hyp2F1Query {
    pub fn new(a: f64, b: f64, c: f64, x: f64) -> Result<Self> {
        if ![a, b, c, x].iter().all(|v| v.is_finite()) {
            return Err(domain("hyp2f1 parameters must be finite"));
        }
        if is_nonpositive_integer(c) {
            return Err(domain(format!(
                "c must not be zero or a negative integer, got {c}"
            )));
        }
        if x > 1.0 {
            return Err(domain(format!("hyp2f1 requires x <= 1, got {x}")));
        }
        Ok(Self { a, b, c, x })
    }
}

/// A value σ ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SigmaValue(f64);

impl SigmaValue {
    pub fn new(sigma: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&sigma) {
            Ok(Self(sigma))
        } else {
            Err(domain(format!("sigma must lie in [0, 1], got {sigma}")))
        }
    }

    /// Unchecked constructor for values that are in range by construction.
    pub(crate) fn from_raw(sigma: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&sigma), "sigma out of range: {sigma}");
        Self(sigma.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sums `Σ (a)_n (b)_n / ((c)_n n!) x^n` until the tail bound drops below `tol`.
fn power_series(a: f64, b: f64, c: f64, x: f64, tol: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    if x == 0.0 {
        return Ok(sum);
    }
    let ax = x.abs();
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Tail bound: once the term ratio is below one, the remaining terms are
        // dominated by a geometric series with ratio max(|ratio|, |x|).
        let next_ratio = {
            let m = nf + 1.0;
            ((a + m) * (b + m) / ((c + m) * (m + 1.0)) * x).abs()
        };
        let rho = next_ratio.max(ax);
        if rho < 1.0 && term.abs() * rho / (1.0 - rho) <= tol {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!(
        "2F1({a}, {b}; {c}; {x}) exceeded {MAX_TERMS} terms"
    )))
}

/// Terminating series when `a` is zero or a negative integer.
fn polynomial_series(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let n = (-a).round() as usize;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
    }
    sum
}

/// Precomputed `x → 1 − x` connection data for fixed parameters with
/// non-integer `c − a − b`:
///
/// ```text
/// F(a,b;c;x) = A·F(a, b; a+b−c+1; 1−x) + (1−x)^{c−a−b} B·F(c−a, c−b; c−a−b+1; 1−x)
/// A = Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b)),   B = Γ(c)Γ(a+b−c) / (Γ(a)Γ(b)).
/// ```
#[derive(Debug, Clone, Copy)]
pub struct Hyp2F1Kernel {
    a: f64,
    b: f64,
    c: f64,
    connection: Option<(f64, f64)>,
}

fn near_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-9
}

impl Hyp2F1Kernel {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Hyp2F1Query::new(a, b, c, 0.0)?;
        let s = c - a - b;
        let connection = if near_integer(s) {
            None
        } else {
            let gc = gamma_real(c);
            let coef_a = gc * gamma_real(s) * recip_gamma(c - a) * recip_gamma(c - b);
            let coef_b = gc * gamma_real(-s) * recip_gamma(a) * recip_gamma(b);
            Some((coef_a, coef_b))
        };
        Ok(Self {
            a,
            b,
            c,
            connection,
        })
    }

    /// ₂F₁(a, b; c; x).
    pub fn eval(&self, x: f64, tol: f64) -> Result<f64> {
        let Self { a, b, c, .. } = *self;
        if !(tol > 0.0) {
            return Err(domain(format!("tolerance must be positive, got {tol}")));
        }
        if x.is_nan() || x > 1.0 {
            return Err(domain(format!("hyp2f1 requires x <= 1, got {x}")));
        }
        if is_nonpositive_integer(a) {
            return Ok(polynomial_series(a, b, c, x));
        }
        if is_nonpositive_integer(b) {
            return Ok(polynomial_series(b, a, c, x));
        }
        if x == 1.0 {
            return self.at_one();
        }
        if x < -SERIES_SWITCH {
            // Pfaff: F(a,b;c;x) = (1−x)^{−a} F(a, c−b; c; x/(x−1))
            let y = x / (x - 1.0);
            let scale = (1.0 - x).powf(-a);
            let inner = Hyp2F1Kernel::new(a, c - b, c)?;
            return Ok(scale * inner.eval(y, tol / scale.max(1.0))?);
        }
        if x <= SERIES_SWITCH {
            return power_series(a, b, c, x, tol);
        }
        self.eval_one_minus(1.0 - x, tol)
    }

    /// ₂F₁(a, b; c; 1 − s) with `s` supplied directly, which keeps full
    /// precision when `s` is tiny.
    pub fn eval_one_minus(&self, s: f64, tol: f64) -> Result<f64> {
        let Self { a, b, c, .. } = *self;
        if !(0.0..=2.0).contains(&s) {
            return Err(domain(format!(
                "eval_one_minus requires 0 <= s <= 2, got {s}"
            )));
        }
        if s == 0.0 {
            return self.at_one();
        }
        if s >= 1.0 - SERIES_SWITCH {
            return self.eval(1.0 - s, tol);
        }
        match self.connection {
            Some((coef_a, coef_b)) => {
                let e = c - a - b;
                let pow = s.powf(e);
                let t1 = power_series(
                    a,
                    b,
                    a + b - c + 1.0,
                    s,
                    tol / (2.0 * coef_a.abs().max(1.0)),
                )?;
                let tol2 = tol / (2.0 * (coef_b * pow).abs().max(1.0));
                let t2 = power_series(c - a, c - b, e + 1.0, s, tol2)?;
                Ok(coef_a * t1 + pow * coef_b * t2)
            }
            // integer c − a − b: fall back to the (slow) direct series
            None => power_series(a, b, c, 1.0 - s, tol),
        }
    }

    fn at_one(&self) -> Result<f64> {
        let Self { a, b, c, .. } = *self;
        let s = c - a - b;
        if s > 0.0 {
            Ok(gamma_real(c) * gamma_real(s) * recip_gamma(c - a) * recip_gamma(c - b))
        } else {
            Err(Error::Divergent(format!(
                "2F1({a}, {b}; {c}; 1) diverges since c - a - b = {s} <= 0"
            )))
        }
    }
}

/// ₂F₁(a, b; c; x) with absolute error at most `tol`.
pub fn hyp2f1(q: &Hyp2F1Query, tol: f64) -> Result<f64> {
    Hyp2F1Kernel::new(q.a, q.b, q.c)?.eval(q.x, tol)
}

const THIRD: f64 = 1.0 / 3.0;

/// ₂F₁(1, 4/3; 5/3; ·), the function inside `G`.
pub(crate) static F_G: LazyLock<Hyp2F1Kernel> =
    LazyLock::new(|| Hyp2F1Kernel::new(1.0, 4.0 * THIRD, 5.0 * THIRD).expect("valid parameters"));

/// ₂F₁(4/3, 2; 5/3; ·), used by the radius-1 bubble two-point function.
pub(crate) static F_AREA: LazyLock<Hyp2F1Kernel> =
    LazyLock::new(|| Hyp2F1Kernel::new(4.0 * THIRD, 2.0, 5.0 * THIRD).expect("valid parameters"));

/// K = Γ(2/3)Γ(5/3)/Γ(4/3); the Green-function constant is K/2.
pub(crate) static KUMMER_K: LazyLock<f64> =
    LazyLock::new(|| gamma_real(2.0 * THIRD) * gamma_real(5.0 * THIRD) / gamma_real(4.0 * THIRD));

/// c₀ = Γ(2/3)Γ(5/3)/(2Γ(4/3)).
pub fn green_constant() -> f64 {
    0.5 * *KUMMER_K
}

/// `S(x) = Σ_{n≥1} t_n x^{n−1}` where `t_n` are the terms of ₂F₁(1, 4/3; 5/3; x),
/// so that ₂F₁ = 1 + x S(x).
fn g_tail_series(x: f64) -> f64 {
    let (a, b, c) = (1.0, 4.0 * THIRD, 5.0 * THIRD);
    // first coefficient (a b / c) = 4/5
    let mut coef = a * b / c;
    let mut sum = coef;
    let mut xn = 1.0;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        coef *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        xn *= x;
        let term = coef * xn;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// The correlation factor `G(σ)`. Exactly 1 at σ = 0 and 0 at σ = 1.
pub fn g_sigma(s: SigmaValue) -> f64 {
    g_raw(s.value())
}

pub(crate) fn g_raw(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    if s >= SERIES_SWITCH {
        let x = 1.0 - s;
        // 1 − s(1 + x S) = x (1 − s S)
        x * (1.0 - s * g_tail_series(x))
    } else {
        let series = power_series(1.0, 4.0 * THIRD, 5.0 * THIRD, s, 1e-17)
            .expect("series in s <= 0.5 converges");
        1.0 + s * series - *KUMMER_K * s.cbrt() * (1.0 - s).powf(-2.0 * THIRD)
    }
}

/// Residual of `t − 1 + (t+1)G(t) − 3t(1−t)G'(t)` with `G'` replaced by the
/// central difference of step `h`.
pub fn g_ode_residual(t: f64, h: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!(
            "g_ode_residual requires 0 < t < 1, got {t}"
        )));
    }
    if !(h > 0.0 && h < t.min(1.0 - t)) {
        return Err(domain(format!(
            "step h = {h} must satisfy 0 < h < min(t, 1 - t)"
        )));
    }
    let dg = (g_raw(t + h) - g_raw(t - h)) / (2.0 * h);
    Ok(t - 1.0 + (t + 1.0) * g_raw(t) - 3.0 * t * (1.0 - t) * dg)
}

/// Difference between the two sides of Kummer's connection formula
///
/// ```text
/// ₂F₁(1/3, 2/3; 5/3; t) = Γ(−2/3)Γ(5/3)/(Γ(1/3)Γ(2/3)) (1−t)^{2/3} ₂F₁(4/3, 1; 5/3; 1−t)
///                        + Γ(2/3)Γ(5/3)/Γ(4/3) t^{−2/3},
/// ```
///
/// with the left side summed directly and the right side through
/// [`Hyp2F1Kernel`].
pub fn kummer_residual(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!(
            "kummer_residual requires 0 < t < 1, got {t}"
        )));
    }
    let lhs = power_series(THIRD, 2.0 * THIRD, 5.0 * THIRD, t, 1e-16)?;
    let a1 = gamma_real(-2.0 * THIRD) * gamma_real(5.0 * THIRD)
        / (gamma_real(THIRD) * gamma_real(2.0 * THIRD));
    let f = Hyp2F1Kernel::new(4.0 * THIRD, 1.0, 5.0 * THIRD)?.eval(1.0 - t, 1e-15)?;
    let rhs = a1 * (1.0 - t).powf(2.0 * THIRD) * f + *KUMMER_K * t.powf(-2.0 * THIRD);
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gamma_known_values() {
        assert!(close(gamma_fn(1.0).unwrap(), 1.0, 1e-14));
        assert!(close(gamma_fn(0.5).unwrap(), PI.sqrt(), 1e-14));
        assert!(close(gamma_fn(5.0).unwrap(), 24.0, 1e-12));
        assert!(matches!(gamma_fn(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_fn(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn reflected_gamma_matches_recurrence() {
        // Γ(−2/3) = Γ(1/3)/(−2/3)
        let lhs = gamma_real(-2.0 / 3.0);
        let rhs = gamma_real(1.0 / 3.0) / (-2.0 / 3.0);
        assert!((lhs / rhs - 1.0).abs() < 1e-14);
        assert_eq!(recip_gamma(-2.0), 0.0);
    }

    #[test]
    fn empty_series_at_zero() {
        let q = Hyp2F1Query::new(1.0, 4.0 / 3.0, 5.0 / 3.0, 0.0).unwrap();
        assert_eq!(hyp2f1(&q, DEFAULT_TOL).unwrap(), 1.0);
    }

    #[test]
    fn invalid_queries() {
        assert!(Hyp2F1Query::new(1.0, 1.0, -2.0, 0.3).is_err());
        assert!(Hyp2F1Query::new(1.0, 1.0, 0.0, 0.3).is_err());
        assert!(Hyp2F1Query::new(1.0, 1.0, 2.0, 1.5).is_err());
        let q = Hyp2F1Query::new(1.0, 4.0 / 3.0, 5.0 / 3.0, 1.0).unwrap();
        assert!(matches!(hyp2f1(&q, DEFAULT_TOL), Err(Error::Divergent(_))));
    }

    #[test]
    fn integer_gap_falls_back_to_series() {
        // 2F1(1,1;2;x) = −ln(1−x)/x
        let x = 0.7;
        let q = Hyp2F1Query::new(1.0, 1.0, 2.0, x).unwrap();
        let v = hyp2f1(&q, DEFAULT_TOL).unwrap();
        assert!(close(v, -(1.0f64 - x).ln() / x, 1e-12));
        let q = Hyp2F1Query::new(1.0, 1.0, 2.0, 0.99999).unwrap();
        assert!(matches!(
            hyp2f1(&q, DEFAULT_TOL),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn gauss_sum_at_one() {
        // 2F1(a,b;c;1) = Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b))
        let q = Hyp2F1Query::new(0.25, 0.75, 2.5, 1.0).unwrap();
        let v = hyp2f1(&q, DEFAULT_TOL).unwrap();
        assert!(close(v, 1.131_370_849_898_476, 1e-13));
    }

    #[test]
    fn g_endpoints_and_midpoint() {
        assert_eq!(g_sigma(SigmaValue::new(0.0).unwrap()), 1.0);
        assert_eq!(g_sigma(SigmaValue::new(1.0).unwrap()), 0.0);
        // mpmath, 40 digits
        assert!(close(g_raw(0.5), 0.137_630_146_923_403_155, 1e-14));
        assert!(close(g_raw(1.0 / 9.0), 0.410_185_413_741_095_855, 1e-14));
    }

    #[test]
    fn g_branches_agree_with_generic_kernel() {
        for &s in &[0.01, 0.2, 0.45, 0.5, 0.55, 0.8, 0.999] {
            let generic = 1.0 - s * F_G.eval_one_minus(s, 1e-15).unwrap();
            assert!(close(g_raw(s), generic, 1e-13), "s = {s}");
        }
    }

    #[test]
    fn g_keeps_relative_accuracy_near_one() {
        // G(σ) ≈ (1 − σ)/5 as σ → 1
        let x = 1e-10;
        let g = g_raw(1.0 - x);
        assert!((g / (x / 5.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ode_residual_domain_checks() {
        assert!(g_ode_residual(0.0, 1e-5).is_err());
        assert!(g_ode_residual(0.5, 0.6).is_err());
        assert!(g_ode_residual(0.5, 1e-5).unwrap().abs() < 1e-8);
        assert!(g_ode_residual(0.01, 1e-6).unwrap().abs() < 1e-6);
        assert!(g_ode_residual(0.99, 1e-6).unwrap().abs() < 1e-6);
    }

    #[test]
    fn ode_residual_is_second_order_in_h() {
        let t = 0.3;
        let r1 = g_ode_residual(t, 2e-3).unwrap().abs();
        let r2 = g_ode_residual(t, 1e-3).unwrap().abs();
        let rate = (r1 / r2).log2();
        assert!((rate - 2.0).abs() < 0.1, "observed rate {rate}");
    }

    #[test]
    fn green_constant_value() {
        assert!(close(green_constant(), 0.684_463_405_979_725_727, 1e-14));
    }
}
