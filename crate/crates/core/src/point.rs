//! Points of the upper half-plane and the `a+bi` text form used on the CLI.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `z = x + iy` with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    x: f64,
    y: f64,
}

impl TryFrom<RawPoint> for HalfPlanePoint {
    type Error = Error;
    fn try_from(p: RawPoint) -> Result<Self> {
        HalfPlanePoint::new(p.x, p.y)
    }
}

impl From<HalfPlanePoint> for RawPoint {
    fn from(p: HalfPlanePoint) -> Self {
        RawPoint { x: p.x, y: p.y }
    }
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(domain(format!(
                "point coordinates must be finite, got ({x}, {y})"
            )));
        }
        if !(y > 0.0) {
            return Err(domain(format!(
                "point must lie in the upper half-plane, got Im = {y}"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn y(self) -> f64 {
        self.y
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn abs(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Argument in `(0, π)`.
    pub fn arg(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn scale(self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.x, lambda * self.y)
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_complex(self.to_complex()))
    }
}

impl FromStr for HalfPlanePoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_complex(parse_complex(s)?)
    }
}

/// Formats as `a+bi` / `a-bi`, the inverse of [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a+bi`, `a-bi`, `bi` or `a` (whitespace ignored, exponents allowed).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |p: &str| -> Result<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_im(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}
