//! Closed-form SLE(8/3) probabilities as functions of half-plane points.
//!
//! Notation: `z = x + iy`, `w = u + iv`, `J(z) = z + 1/z`, and
//! `σ(z, w) = |z − w|² / |z − w̄|²`. Signs such as `ℑ(1/z) = −y/|z|²` are kept
//! literal; every probability goes through [`Probability::checked`], which
//! clamps float noise within `1e-12` of `[0, 1]` and rejects anything larger.
//!
//! # Radius-1 bubble, one point
//!
//! With `P̃_R(z) = ℑ(J(z/R))² / (4R²)` and `ℑ(J(z/R)) = y(|z|² − R²)/(R|z|²)`,
//!
//! ```text
//! ∂_R P̃_R(z) = −(y²/(4|z|⁴)) · 4|z|²(|z|² − R²) / R⁵,
//! f₁(z) = (4R³/5) ∂_R P̃_R(z) |_{R=1} = (4/5) · y² (1 − |z|²) / |z|²
//!       = (4/5) sin²(arg z) (1 − |z|²).
//! ```
//!
//! Its integral over the unit half-disk is `(4/5)(π/2)(1/4) = π/10`, and it is
//! also the diagonal value `f(z, z)` of the two-point function: at `w = z`
//! both hypergeometric terms of `A` vanish (they decay like `|z − w|^{2/3}`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::point::HalfPlanePoint;
use crate::special_fn::{g_raw, green_constant, SigmaValue, F_AREA, F_G};

/// Tolerance used by the clamping policy.
pub const CLAMP_TOL: f64 = 1e-12;
/// Looser tolerance for the radius-1 two-point function.
pub const AREA_CLAMP_TOL: f64 = 1e-9;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        Self::checked(p, 0.0, "probability")
    }

    /// Accepts `raw` if it lies within `tol` of `[0, 1]`, clamping it.
    pub fn checked(raw: f64, tol: f64, what: &str) -> Result<Self> {
        if raw.is_nan() || raw < -tol || raw > 1.0 + tol {
            return Err(Error::InvariantViolation(format!(
                "{what} = {raw} is outside [0, 1]"
            )));
        }
        Ok(Self(raw.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The ε² coefficient of a small-ε bubble expansion.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LeadingCoefficient(f64);

impl LeadingCoefficient {
    fn checked(c: f64, what: &str) -> Result<Self> {
        if c.is_finite() && c >= -CLAMP_TOL {
            Ok(Self(c.max(0.0)))
        } else {
            Err(Error::InvariantViolation(format!(
                "{what} coefficient {c} is negative or not finite"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn im_inv(z: HalfPlanePoint) -> f64 {
    -z.y() / z.norm_sqr()
}

fn sin_arg(z: HalfPlanePoint) -> f64 {
    z.y() / z.abs()
}

/// σ for arbitrary complex pairs in the same (open) half-plane.
pub fn sigma_complex(a: Complex64, b: Complex64) -> Result<SigmaValue> {
    sigma_from_parts(a - b, a.im, b.im)
}

fn sigma_from_parts(diff: Complex64, im_a: f64, im_b: f64) -> Result<SigmaValue> {
    if im_a * im_b < 0.0 {
        return Err(domain("sigma requires both points in the same half-plane"));
    }
    let im_sum = im_a + im_b;
    let num = diff.norm_sqr();
    let den = diff.re * diff.re + im_sum * im_sum;
    if den == 0.0 {
        return if num == 0.0 {
            Ok(SigmaValue::from_raw(0.0))
        } else {
            Err(domain("sigma undefined: both points on the real axis"))
        };
    }
    // num ≤ den holds exactly for same-sign imaginary parts; rounding may not
    Ok(SigmaValue::from_raw((num / den).min(1.0)))
}

/// σ(z, w) = |z − w|² / |z − w̄|² ∈ [0, 1).
pub fn sigma(z: HalfPlanePoint, w: HalfPlanePoint) -> SigmaValue {
    SigmaValue::from_raw(sigma_xy(z.x(), z.y(), w.x(), w.y()))
}

fn sigma_xy(x: f64, y: f64, u: f64, v: f64) -> f64 {
    let dx = x - u;
    let dy = y - v;
    let sy = y + v;
    (dx * dx + dy * dy) / (dx * dx + sy * sy)
}

/// `F_ε(z) = z / (ε − z)`.
pub fn mobius_f_eps(z: HalfPlanePoint, eps: f64) -> Result<HalfPlanePoint> {
    if !(eps > 0.0) {
        return Err(domain(format!("mobius_f_eps requires eps > 0, got {eps}")));
    }
    let z = z.to_complex();
    HalfPlanePoint::from_complex(z / (eps - z))
}

/// `F_ε⁻¹(z) = εz / (z + 1)`.
pub fn mobius_f_eps_inv(z: HalfPlanePoint, eps: f64) -> Result<HalfPlanePoint> {
    if !(eps > 0.0) {
        return Err(domain(format!(
            "mobius_f_eps_inv requires eps > 0, got {eps}"
        )));
    }
    let z = z.to_complex();
    HalfPlanePoint::from_complex(eps * z / (z + 1.0))
}

/// Joukowsky map `J(z) = z + 1/z` on general complex input.
pub fn joukowsky(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(domain("joukowsky is undefined at 0"));
    }
    Ok(z + z.inv())
}

/// σ(J(z/R), J(w/R)), using `J(a) − J(b) = (a − b)(1 − 1/(ab))` to keep
/// precision when `z ≈ w`.
fn sigma_joukowsky(z: Complex64, w: Complex64, radius: f64) -> Result<SigmaValue> {
    let a = z / radius;
    let b = w / radius;
    let ja = joukowsky(a)?;
    let jb = joukowsky(b)?;
    let diff = (a - b) * (1.0 - (a * b).inv());
    sigma_from_parts(diff, ja.im, jb.im)
}

/// Schramm's one-point function `½(1 + x/|z|)`.
pub fn left_passage_one(z: HalfPlanePoint) -> Probability {
    Probability(left_one_raw(z.x(), z.y()))
}

pub(crate) fn left_one_raw(x: f64, y: f64) -> f64 {
    let r = x.hypot(y);
    if x >= 0.0 {
        0.5 * (1.0 + x / r)
    } else {
        // ½(1 + x/r) = y² / (2r(r − x)) without cancellation
        y * y / (2.0 * r * (r - x))
    }
}

/// `cos²(arg(z)/2)`, the complex form of [`left_passage_one`].
pub fn left_passage_one_trig(z: HalfPlanePoint) -> Probability {
    let c = (0.5 * z.arg()).cos();
    Probability(c * c)
}

/// Probability that the path passes to the left of both `z` and `w`:
/// `L(z)L(w) + ¼ sin(arg z) sin(arg w) G(σ(z, w))`.
pub fn left_passage_two(z: HalfPlanePoint, w: HalfPlanePoint) -> Probability {
    Probability(left_two_raw(z.x(), z.y(), w.x(), w.y()).clamp(0.0, 1.0))
}

pub(crate) fn left_two_raw(x: f64, y: f64, u: f64, v: f64) -> f64 {
    let sz = y / x.hypot(y);
    let sw = v / u.hypot(v);
    left_one_raw(x, y) * left_one_raw(u, v) + 0.25 * sz * sw * g_raw(sigma_xy(x, y, u, v))
}

/// The same probability in the Cartesian product form
/// `L(z) L(w) (1 + y/(x+|z|) · v/(u+|w|) · G(σ))`.
pub fn left_passage_two_cartesian(z: HalfPlanePoint, w: HalfPlanePoint) -> Probability {
    let (x, y, u, v) = (z.x(), z.y(), w.x(), w.y());
    let lz = 0.5 + x / (2.0 * z.abs());
    let lw = 0.5 + u / (2.0 * w.abs());
    let g = g_raw(sigma(z, w).value());
    Probability((lz * lw * (1.0 + y / (x + z.abs()) * v / (u + w.abs()) * g)).clamp(0.0, 1.0))
}

/// Probability that the path separates `a` and `b`: `L(a) + L(b) − 2L(a, b)`.
pub fn separation_probability(a: HalfPlanePoint, b: HalfPlanePoint) -> Result<Probability> {
    let raw = left_one_raw(a.x(), a.y()) + left_one_raw(b.x(), b.y())
        - 2.0 * left_two_raw(a.x(), a.y(), b.x(), b.y());
    Probability::checked(raw, CLAMP_TOL, "separation probability")
}

/// `c₀ y^{−2/3} sin²(arg z)`, the small-ε limit of `ε^{−2/3}` times the
/// separation probability of `z ± εη`.
pub fn green_limit(z: HalfPlanePoint) -> f64 {
    let s = sin_arg(z);
    green_constant() * z.y().powf(-2.0 / 3.0) * s * s
}

/// ε² coefficient of the probability that `z` lies inside the ε-bubble.
pub fn bubble_one_point_coeff(z: HalfPlanePoint) -> LeadingCoefficient {
    let m = im_inv(z);
    LeadingCoefficient(0.25 * m * m)
}

/// ε² coefficient of the probability that the ε-bubble contains `z` and `w`.
pub fn bubble_two_point_coeff(z: HalfPlanePoint, w: HalfPlanePoint) -> LeadingCoefficient {
    LeadingCoefficient(0.25 * im_inv(z) * im_inv(w) * g_raw(sigma(z, w).value()))
}

fn check_in_disk(z: HalfPlanePoint, radius: f64, name: &str) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(domain(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    if z.abs() >= radius {
        return Err(domain(format!(
            "{name} = {z} must satisfy |{name}| < R = {radius}"
        )));
    }
    Ok(())
}

fn im_joukowsky_scaled(z: HalfPlanePoint, radius: f64) -> f64 {
    // ℑ J(z/R) = y(|z|² − R²)/(R|z|²)
    z.y() * (z.norm_sqr() - radius * radius) / (radius * z.norm_sqr())
}

/// ε² coefficient of "the ε-bubble stays in `D_R` and contains `z`".
pub fn bubble_in_disk_one_coeff(z: HalfPlanePoint, radius: f64) -> Result<LeadingCoefficient> {
    check_in_disk(z, radius, "z")?;
    let j = im_joukowsky_scaled(z, radius);
    LeadingCoefficient::checked(j * j / (4.0 * radius * radius), "in-disk one-point")
}

/// ε² coefficient of "the ε-bubble stays in `D_R` and contains `z` and `w`".
pub fn bubble_in_disk_two_coeff(
    z: HalfPlanePoint,
    w: HalfPlanePoint,
    radius: f64,
) -> Result<LeadingCoefficient> {
    check_in_disk(z, radius, "z")?;
    check_in_disk(w, radius, "w")?;
    let s0 = sigma_joukowsky(z.to_complex(), w.to_complex(), radius)?;
    let jz = im_joukowsky_scaled(z, radius);
    let jw = im_joukowsky_scaled(w, radius);
    LeadingCoefficient::checked(
        jz * jw * g_raw(s0.value()) / (4.0 * radius * radius),
        "in-disk two-point",
    )
}

/// Truncated small-ε expansion of the probability that an ε-bubble stays in
/// the disk of radius `R + δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeExpansion {
    pub value: f64,
    /// Set when `ε/R > 0.1`, where the truncation is not trustworthy.
    pub untrusted: bool,
}

pub fn bubble_escape_expansion(radius: f64, delta: f64, eps: f64) -> Result<EscapeExpansion> {
    if !(radius > 0.0 && eps > 0.0 && delta >= 0.0) {
        return Err(domain(format!(
            "escape expansion requires R > 0, eps > 0, delta >= 0 (got R={radius}, delta={delta}, eps={eps})"
        )));
    }
    let e2 = eps * eps;
    let value = 1.0 - 0.625 * e2 / (radius * radius) + 1.25 * e2 * delta / radius.powi(3);
    Ok(EscapeExpansion {
        value,
        untrusted: eps / radius > 0.1,
    })
}

/// Probability that `z` lies in the bubble with bulk point `w`:
/// `ℑ(1/z)/ℑ(1/w) · G(σ(z, w))`.
pub fn bulk_containment(z: HalfPlanePoint, w: HalfPlanePoint) -> Result<Probability> {
    let raw = im_inv(z) / im_inv(w) * g_raw(sigma(z, w).value());
    Probability::checked(raw, CLAMP_TOL, "bulk containment")
}

/// `P{R_z ≤ r} = (1 − |z|²/r²)²` for `r ≥ |z|`, zero below.
pub fn radius_cdf(r: f64, z: HalfPlanePoint) -> Result<Probability> {
    if !(r > 0.0) {
        return Err(domain(format!("radius_cdf requires r > 0, got {r}")));
    }
    let q = z.norm_sqr();
    if r * r <= q {
        return Ok(Probability(0.0));
    }
    let t = 1.0 - q / (r * r);
    Ok(Probability(t * t))
}

/// Density `4(1 − |z|²/r²)|z|²/r³` of the bubble radius; zero for `r < |z|`.
pub fn radius_density(r: f64, z: HalfPlanePoint) -> f64 {
    let q = z.norm_sqr();
    if r * r <= q {
        0.0
    } else {
        4.0 * (1.0 - q / (r * r)) * q / (r * r * r)
    }
}

/// Probability that `z` lies in the bubble with bulk point `w` conditioned
/// to stay inside `D_R`.
pub fn bulk_containment_in_disk(
    z: HalfPlanePoint,
    w: HalfPlanePoint,
    radius: f64,
) -> Result<Probability> {
    check_in_disk(z, radius, "z")?;
    check_in_disk(w, radius, "w")?;
    let s0 = sigma_joukowsky(z.to_complex(), w.to_complex(), radius)?;
    let raw = im_joukowsky_scaled(z, radius) / im_joukowsky_scaled(w, radius) * g_raw(s0.value());
    Probability::checked(raw, CLAMP_TOL, "bulk containment in disk")
}

fn check_unit_half_disk(z: HalfPlanePoint, name: &str) -> Result<()> {
    if z.norm_sqr() >= 1.0 {
        return Err(domain(format!(
            "{name} = {z} must lie in the open unit half-disk"
        )));
    }
    Ok(())
}

/// Probability that `z` lies in the hull of the bubble conditioned to have
/// radius 1: `(4/5) y² (1 − |z|²)/|z|²` (see the module docs).
pub fn touch_radius_one_point(z: HalfPlanePoint) -> Result<Probability> {
    check_unit_half_disk(z, "z")?;
    Probability::checked(touch_one_raw(z.x(), z.y()), CLAMP_TOL, "radius-1 one-point")
}

pub(crate) fn touch_one_raw(x: f64, y: f64) -> f64 {
    let q = x * x + y * y;
    0.8 * y * y * (1.0 - q) / q
}

/// Probability that `z` and `w` both lie in the hull of the bubble
/// conditioned to have radius 1.
///
/// On the diagonal (σ = 0, or σ₀ underflowing to 0) this returns the limit
/// value [`touch_radius_one_point`].
pub fn area_integrand(z: HalfPlanePoint, w: HalfPlanePoint) -> Result<Probability> {
    check_unit_half_disk(z, "z")?;
    check_unit_half_disk(w, "w")?;
    let raw = area_integrand_raw(z.x(), z.y(), w.x(), w.y())?;
    Probability::checked(raw, AREA_CLAMP_TOL, "radius-1 two-point")
}

/// Unvalidated two-point function of the radius-1 bubble; callers guarantee
/// `0 < |z|, |w| < 1` and `y, v > 0`.
pub fn area_integrand_raw(x: f64, y: f64, u: f64, v: f64) -> Result<f64> {
    const TOL: f64 = 1e-13;
    let q = x * x + y * y;
    let p = u * u + v * v;
    let s = sigma_xy(x, y, u, v);
    let z = Complex64::new(x, y);
    let w = Complex64::new(u, v);
    let s0 = sigma_joukowsky(z, w, 1.0)?.value();
    if s == 0.0 || s0 == 0.0 {
        return Ok(touch_one_raw(x, y));
    }
    let dist2 = (x - u) * (x - u) + (y - v) * (y - v);
    let a_term =
        2.0 * s * (1.0 - q) * (1.0 - p) * (x * u - y * v - q * p) * F_G.eval_one_minus(s0, TOL)?
            + s0 * dist2 * (1.0 - q * p) * F_AREA.eval_one_minus(s0, TOL)?;
    // 1 − 2(xu + yv) + |z|²|w|² = |1 − z w̄|² > 0 on the disk
    let denom = (Complex64::new(1.0, 0.0) - z * w.conj()).norm_sqr();
    Ok(2.0 * y * v / (5.0 * q * p) * (q + p - 2.0 * q * p - a_term / denom))
}

/// Probability that `z` and `w` are both in the hull of two commuting
/// SLE(8/3) paths: `−(2/5)(ℑz ℑ(1/w) + ℑ(1/z) ℑw) G(σ)`.
pub fn two_path_two_point(z: HalfPlanePoint, w: HalfPlanePoint) -> Result<Probability> {
    let raw = two_path_two_raw(z, w);
    Probability::checked(raw, CLAMP_TOL, "two-path two-point")
}

fn two_path_two_raw(z: HalfPlanePoint, w: HalfPlanePoint) -> f64 {
    -0.4 * (z.y() * im_inv(w) + im_inv(z) * w.y()) * g_raw(sigma(z, w).value())
}

/// `−(4/5) ℑz ℑ(1/z) = (4/5) sin²(arg z)`.
pub fn two_path_one_point(z: HalfPlanePoint) -> Probability {
    Probability((-0.8 * z.y() * im_inv(z)).clamp(0.0, 1.0))
}

/// `z` in the two-path hull but `w` not.
pub fn two_path_in_not_in(z: HalfPlanePoint, w: HalfPlanePoint) -> Result<Probability> {
    let raw = two_path_one_point(z).value() - two_path_two_raw(z, w);
    Probability::checked(raw, CLAMP_TOL, "two-path in/not-in")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(pt(0.3, 0.7), pt(0.3, 0.7)).value(), 0.0);
        assert!(close(
            sigma(pt(0.0, 1.0), pt(0.0, 2.0)).value(),
            1.0 / 9.0,
            1e-15
        ));
        let (z, w) = (pt(1.0, 1.0), pt(-1.0, 2.0));
        let fz = mobius_f_eps(z, 0.3).unwrap();
        let fw = mobius_f_eps(w, 0.3).unwrap();
        assert!(close(sigma(fz, fw).value(), sigma(z, w).value(), 1e-13));
    }

    #[test]
    fn mobius_examples() {
        let f = mobius_f_eps(pt(0.0, 1.0), 1.0).unwrap();
        assert!(close(f.x(), -0.5, 1e-15) && close(f.y(), 0.5, 1e-15));
        let z = pt(0.5, 0.5);
        let back = mobius_f_eps_inv(mobius_f_eps(z, 0.1).unwrap(), 0.1).unwrap();
        assert!(close(back.x(), z.x(), 1e-14) && close(back.y(), z.y(), 1e-14));
        assert!(mobius_f_eps(z, 0.0).is_err());
    }

    #[test]
    fn joukowsky_examples() {
        let j = joukowsky(Complex64::new(0.0, 0.5)).unwrap();
        assert!(close(j.re, 0.0, 1e-15) && close(j.im, -1.5, 1e-15));
        let z = pt(0.3, 0.4);
        let q = z.norm_sqr();
        assert!(close(
            joukowsky(z.to_complex()).unwrap().im,
            z.y() * (q - 1.0) / q,
            1e-15
        ));
        let t = std::f64::consts::FRAC_PI_3;
        let j = joukowsky(Complex64::from_polar(1.0, t)).unwrap();
        assert!(close(j.re, 2.0 * t.cos(), 1e-15) && close(j.im, 0.0, 1e-15));
        assert!(joukowsky(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn one_point_examples() {
        assert!(close(left_passage_one(pt(0.0, 1.0)).value(), 0.5, 1e-15));
        let v = left_passage_one(pt(1.0, 1.0)).value();
        assert!(close(v, 0.5 * (1.0 + 1.0 / 2f64.sqrt()), 1e-15));
        assert!(close(v, 0.853_553_390_593_273_8, 1e-15));
    }

    #[test]
    fn two_point_examples() {
        let z = pt(-0.5, 1.0);
        assert!(close(
            left_passage_two(z, z).value(),
            left_passage_one(z).value(),
            1e-12
        ));
        assert!(close(
            left_passage_two(pt(0.0, 1.0), pt(0.0, 1.0)).value(),
            0.5,
            1e-12
        ));
        // mpmath values of the Cartesian form
        let v = left_passage_two(pt(-0.5, 1.0), pt(0.5, 1.0)).value();
        assert!(close(v, 0.261_978_293_536_717_665, 1e-13));
        let v = left_passage_two(pt(0.0, 1.0), pt(0.0, 2.0)).value();
        assert!(close(v, 0.352_546_353_435_273_964, 1e-13));
    }

    #[test]
    fn separation_examples() {
        let a = pt(0.4, 0.9);
        assert!(close(
            separation_probability(a, a).unwrap().value(),
            0.0,
            1e-12
        ));
        let v = separation_probability(pt(-1.0, 1.0), pt(1.0, 1.0))
            .unwrap()
            .value();
        assert!(close(v, 0.715_592_463_269_149_211, 1e-13));
    }

    #[test]
    fn green_limit_examples() {
        let c0 = green_constant();
        assert!(close(green_limit(pt(0.0, 1.0)), c0, 1e-15));
        assert!(close(
            green_limit(pt(0.0, 2.0)),
            c0 * 2f64.powf(-2.0 / 3.0),
            1e-15
        ));
    }

    #[test]
    fn bubble_coefficient_examples() {
        assert!(close(
            bubble_one_point_coeff(pt(0.0, 1.0)).value(),
            0.25,
            1e-15
        ));
        assert!(close(
            bubble_one_point_coeff(pt(0.0, 2.0)).value(),
            1.0 / 16.0,
            1e-15
        ));
        let z = pt(0.0, 1.0);
        let w = pt(0.0, 2.0);
        let expected = 0.25 * 1.0 * 0.5 * 0.410_185_413_741_095_855;
        assert!(close(bubble_two_point_coeff(z, w).value(), expected, 1e-14));
        assert!(close(
            bubble_two_point_coeff(z, z).value(),
            bubble_one_point_coeff(z).value(),
            1e-15
        ));
    }

    #[test]
    fn in_disk_examples() {
        let v = bubble_in_disk_one_coeff(pt(0.0, 0.5), 1.0).unwrap().value();
        assert!(close(v, 0.5625, 1e-15));
        assert!(bubble_in_disk_one_coeff(pt(0.0, 1.0), 1.0).is_err());
        let (z, w) = (pt(0.3, 0.4), pt(-0.2, 0.5));
        let v = bubble_in_disk_two_coeff(z, w, 1.0).unwrap().value();
        assert!(close(v, 0.051_572_743_711_822_826, 1e-13));
        assert!(close(
            bubble_in_disk_two_coeff(z, z, 1.0).unwrap().value(),
            bubble_in_disk_one_coeff(z, 1.0).unwrap().value(),
            1e-15
        ));
        assert!(bubble_in_disk_two_coeff(z, pt(0.9, 0.9), 1.0).is_err());
    }

    #[test]
    fn escape_expansion_examples() {
        let e = bubble_escape_expansion(1.0, 0.0, 0.01).unwrap();
        assert!(close(e.value, 1.0 - 6.25e-5, 1e-15));
        assert!(!e.untrusted);
        assert!(bubble_escape_expansion(1.0, 0.0, 0.2).unwrap().untrusted);
        let (r, eps) = (2.0, 0.01);
        let d = 1e-3;
        let slope = (bubble_escape_expansion(r, d, eps).unwrap().value
            - bubble_escape_expansion(r, 0.0, eps).unwrap().value)
            / d;
        assert!(close(slope, 1.25 * eps * eps / r.powi(3), 1e-12));
    }

    #[test]
    fn bulk_containment_examples() {
        let w = pt(0.0, 1.0);
        assert!(close(bulk_containment(w, w).unwrap().value(), 1.0, 1e-15));
        let v = bulk_containment(pt(0.0, 2.0), w).unwrap().value();
        assert!(close(v, 0.5 * 0.410_185_413_741_095_855, 1e-14));
        let v = bulk_containment_in_disk(pt(0.0, 0.5), pt(0.0, 0.25), 1.0)
            .unwrap()
            .value();
        assert!(close(v, 0.129_996_886_095_779_314, 1e-13));
        assert!(close(
            bulk_containment_in_disk(w.scale(0.5).unwrap(), w.scale(0.5).unwrap(), 1.0)
                .unwrap()
                .value(),
            1.0,
            1e-15
        ));
    }

    #[test]
    fn radius_cdf_examples() {
        let z = pt(0.6, 0.8);
        assert_eq!(radius_cdf(1.0, z).unwrap().value(), 0.0);
        assert!(radius_cdf(1e9, z).unwrap().value() > 1.0 - 1e-15);
        assert!(radius_cdf(0.0, z).is_err());
    }

    #[test]
    fn two_path_examples() {
        let i = pt(0.0, 1.0);
        assert!(close(two_path_one_point(i).value(), 0.8, 1e-15));
        assert!(close(two_path_one_point(pt(1.0, 1.0)).value(), 0.4, 1e-15));
        assert!(close(two_path_two_point(i, i).unwrap().value(), 0.8, 1e-15));
        let v = two_path_two_point(i, pt(0.0, 2.0)).unwrap().value();
        assert!(close(v, 0.410_185_413_741_095_855, 1e-14));
        assert!(close(two_path_in_not_in(i, i).unwrap().value(), 0.0, 1e-15));
        let far = two_path_in_not_in(i, pt(1e6, 1.0)).unwrap().value();
        assert!(close(far, 0.8, 1e-5));
    }

    #[test]
    fn touch_one_point_edges() {
        assert!(touch_radius_one_point(pt(0.0, 1.0)).is_err());
        let v = touch_radius_one_point(pt(0.0, 0.5)).unwrap().value();
        assert!(close(v, 0.8 * 0.75, 1e-15));
    }

    #[test]
    fn area_integrand_matches_reference() {
        // mpmath evaluation of the closed form, cross-checked against a
        // finite-difference R-derivative of the in-disk two-point coefficient
        let cases = [
            ((0.3, 0.4), (-0.2, 0.5), 0.128_755_861_761_251_554),
            ((0.1, 0.2), (0.5, 0.6), 0.139_770_391_275_241_590),
            ((-0.7, 0.1), (0.2, 0.9), 1.747_586_122_045_598e-4),
            ((0.0, 0.5), (0.001, 0.5), 0.594_609_297_049_097_538),
        ];
        for ((x, y), (u, v), expected) in cases {
            let f = area_integrand(pt(x, y), pt(u, v)).unwrap().value();
            assert!(
                close(f, expected, 1e-12),
                "({x},{y}),({u},{v}): {f} vs {expected}"
            );
        }
        // diagonal limit
        let z = pt(0.2, 0.3);
        assert_eq!(
            area_integrand(z, z).unwrap().value(),
            touch_radius_one_point(z).unwrap().value()
        );
        assert!(area_integrand(z, pt(0.9, 0.9)).is_err());
    }
}
