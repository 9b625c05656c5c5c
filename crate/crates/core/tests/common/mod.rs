//! Independent oracles for the integration tests: a double-double power
//! series for `₂F₁` and the frozen mpmath fixture.

#![allow(dead_code)]

use serde::Deserialize;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`, about 32 digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `₂F₁(a, b; c; x)` by the direct series in double-double, stopping once a
/// term falls below `1e-30` of the partial sum. Requires `|x| < 1`.
pub fn hyp2f1_dd(a: f64, b: f64, c: f64, x: f64) -> Dd {
    assert!(x.abs() < 1.0, "direct series needs |x| < 1");
    let (a, b, c, x) = (Dd::from(a), Dd::from(b), Dd::from(c), Dd::from(x));
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for n in 0..200_000u32 {
        let nn = Dd::from(n as f64);
        let num = a.add(nn).mul(b.add(nn));
        let den = c.add(nn).mul(nn.add(Dd::ONE));
        term = term.mul(num).div(den).mul(x);
        sum = sum.add(term);
        if term.hi.abs() < 1e-30 * sum.hi.abs() && n > 8 {
            return sum;
        }
    }
    panic!("oracle series did not converge");
}

/// `G(σ) = 1 − σ ₂F₁(1, 4/3; 5/3; 1 − σ)` through the double-double series.
pub fn g_dd(sigma: f64) -> f64 {
    let s = Dd::from(sigma);
    let f = hyp2f1_dd(1.0, 4.0 / 3.0, 5.0 / 3.0, Dd::ONE.sub(s).to_f64());
    Dd::ONE.sub(s.mul(f)).to_f64()
}

#[derive(Debug, Deserialize)]
pub struct Hyp2F1Case {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
    pub value: String,
}

#[derive(Debug, Deserialize)]
pub struct GCase {
    pub sigma: f64,
    pub value: String,
}

#[derive(Debug, Deserialize)]
pub struct Oracle {
    pub c0: String,
    pub gamma_half: String,
    pub hyp2f1: Vec<Hyp2F1Case>,
    pub g: Vec<GCase>,
}

pub fn oracle() -> Oracle {
    serde_json::from_str(include_str!("../fixtures/oracle.json")).expect("oracle fixture parses")
}

/// Parses a fixture decimal string to the nearest double.
pub fn num(s: &str) -> f64 {
    s.parse().expect("fixture number")
}
