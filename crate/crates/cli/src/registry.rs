//! Names accepted by `sle-passage eval`, one per closed-form operation.

use num_complex::Complex64;
use sle_passage::formulas::{self, Probability};
use sle_passage::special_fn::{self, Hyp2F1Query, SigmaValue, DEFAULT_TOL};
use sle_passage::{Error, HalfPlanePoint, Result};

/// Parameters collected from the command line; each formula reads the ones
/// it needs and reports the first missing one by name.
#[derive(Debug, Clone, Default)]
pub struct Params {
    pub z: Option<Complex64>,
    pub w: Option<Complex64>,
    pub sigma: Option<f64>,
    pub radius: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<f64>,
    pub x: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub t: Option<f64>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, name: &str, formula: &str) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("{formula} requires --{name}")))
}

impl Params {
    fn point(&self, which: char, formula: &str) -> Result<HalfPlanePoint> {
        let v = if which == 'z' { self.z } else { self.w };
        let c = need(v, &which.to_string(), formula)?;
        HalfPlanePoint::from_complex(c).map_err(|e| Error::Domain(format!("--{which}: {e}")))
    }

    fn real(&self, name: &'static str, formula: &str) -> Result<f64> {
        let v = match name {
            "sigma" => self.sigma,
            "R" => self.radius,
            "eps" => self.eps,
            "delta" => self.delta,
            "r" => self.r,
            "x" => self.x,
            "a" => self.a,
            "b" => self.b,
            "c" => self.c,
            "t" => self.t,
            "h" => self.h,
            _ => None,
        };
        need(v, name, formula)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Real(f64),
    Complex(Complex64),
    /// A truncated expansion with its trust flag.
    Expansion {
        value: f64,
        untrusted: bool,
    },
}

pub struct Formula {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub summary: &'static str,
    pub eval: fn(&Params) -> Result<Value>,
}

fn p(v: Probability) -> Value {
    Value::Real(v.value())
}

pub static REGISTRY: &[Formula] = &[
    Formula {
        name: "gamma_fn",
        params: &["x"],
        summary: "Gamma function for x > 0",
        eval: |a| Ok(Value::Real(special_fn::gamma_fn(a.real("x", "gamma_fn")?)?)),
    },
    Formula {
        name: "hyp2f1",
        params: &["a", "b", "c", "x", "tol?"],
        summary: "Gauss hypergeometric 2F1(a, b; c; x) for x <= 1",
        eval: |p| {
            let f = "hyp2f1";
            let q = Hyp2F1Query::new(
                p.real("a", f)?,
                p.real("b", f)?,
                p.real("c", f)?,
                p.real("x", f)?,
            )?;
            Ok(Value::Real(special_fn::hyp2f1(
                &q,
                p.tol.unwrap_or(DEFAULT_TOL),
            )?))
        },
    },
    Formula {
        name: "G",
        params: &["sigma"],
        summary: "correlation factor G(sigma) on [0, 1]",
        eval: |a| {
            Ok(Value::Real(special_fn::g_sigma(SigmaValue::new(
                a.real("sigma", "G")?,
            )?)))
        },
    },
    Formula {
        name: "g_ode_residual",
        params: &["t", "h"],
        summary: "residual of the ODE for G with a central difference of step h",
        eval: |a| {
            let f = "g_ode_residual";
            Ok(Value::Real(special_fn::g_ode_residual(
                a.real("t", f)?,
                a.real("h", f)?,
            )?))
        },
    },
    Formula {
        name: "sigma",
        params: &["z", "w"],
        summary: "cross-ratio |z - w|^2 / |z - conj w|^2",
        eval: |a| {
            Ok(Value::Real(
                formulas::sigma(a.point('z', "sigma")?, a.point('w', "sigma")?).value(),
            ))
        },
    },
    Formula {
        name: "mobius_f_eps",
        params: &["z", "eps"],
        summary: "z / (eps - z)",
        eval: |a| {
            let f = "mobius_f_eps";
            Ok(Value::Complex(
                formulas::mobius_f_eps(a.point('z', f)?, a.real("eps", f)?)?.to_complex(),
            ))
        },
    },
    Formula {
        name: "joukowsky",
        params: &["z"],
        summary: "J(z) = z + 1/z",
        eval: |a| {
            Ok(Value::Complex(formulas::joukowsky(need(
                a.z,
                "z",
                "joukowsky",
            )?)?))
        },
    },
    Formula {
        name: "left_passage_one",
        params: &["z"],
        summary: "probability the SLE(8/3) path passes left of z",
        eval: |a| {
            Ok(p(formulas::left_passage_one(
                a.point('z', "left_passage_one")?,
            )))
        },
    },
    Formula {
        name: "left_passage_two",
        params: &["z", "w"],
        summary: "probability the path passes left of both z and w",
        eval: |a| {
            let f = "left_passage_two";
            Ok(p(formulas::left_passage_two(
                a.point('z', f)?,
                a.point('w', f)?,
            )))
        },
    },
    Formula {
        name: "separation_probability",
        params: &["z", "w"],
        summary: "probability the path separates z from w",
        eval: |a| {
            let f = "separation_probability";
            Ok(p(formulas::separation_probability(
                a.point('z', f)?,
                a.point('w', f)?,
            )?))
        },
    },
    Formula {
        name: "green_limit",
        params: &["z"],
        summary: "c0 Im(z)^(-2/3) sin^2(arg z)",
        eval: |a| {
            Ok(Value::Real(formulas::green_limit(
                a.point('z', "green_limit")?,
            )))
        },
    },
    Formula {
        name: "bubble_one_point_coeff",
        params: &["z"],
        summary: "eps^2 coefficient of P(z in eps-bubble)",
        eval: |a| {
            Ok(Value::Real(
                formulas::bubble_one_point_coeff(a.point('z', "bubble_one_point_coeff")?).value(),
            ))
        },
    },
    Formula {
        name: "bubble_two_point_coeff",
        params: &["z", "w"],
        summary: "eps^2 coefficient of P(z, w in eps-bubble)",
        eval: |a| {
            let f = "bubble_two_point_coeff";
            Ok(Value::Real(
                formulas::bubble_two_point_coeff(a.point('z', f)?, a.point('w', f)?).value(),
            ))
        },
    },
    Formula {
        name: "bubble_in_disk_one_coeff",
        params: &["z", "R"],
        summary: "eps^2 coefficient of P(z in bubble, bubble inside D_R)",
        eval: |a| {
            let f = "bubble_in_disk_one_coeff";
            Ok(Value::Real(
                formulas::bubble_in_disk_one_coeff(a.point('z', f)?, a.real("R", f)?)?.value(),
            ))
        },
    },
    Formula {
        name: "bubble_in_disk_two_coeff",
        params: &["z", "w", "R"],
        summary: "eps^2 coefficient of P(z, w in bubble, bubble inside D_R)",
        eval: |a| {
            let f = "bubble_in_disk_two_coeff";
            let v = formulas::bubble_in_disk_two_coeff(
                a.point('z', f)?,
                a.point('w', f)?,
                a.real("R", f)?,
            )?;
            Ok(Value::Real(v.value()))
        },
    },
    Formula {
        name: "bubble_escape_expansion",
        params: &["R", "delta", "eps"],
        summary: "probability an eps-bubble stays inside D_(R+delta), to order eps^2",
        eval: |a| {
            let f = "bubble_escape_expansion";
            let e = formulas::bubble_escape_expansion(
                a.real("R", f)?,
                a.real("delta", f)?,
                a.real("eps", f)?,
            )?;
            Ok(Value::Expansion {
                value: e.value,
                untrusted: e.untrusted,
            })
        },
    },
    Formula {
        name: "bulk_containment",
        params: &["z", "w"],
        summary: "P(z in bubble with bulk point w)",
        eval: |a| {
            let f = "bulk_containment";
            Ok(p(formulas::bulk_containment(
                a.point('z', f)?,
                a.point('w', f)?,
            )?))
        },
    },
    Formula {
        name: "radius_cdf",
        params: &["r", "z"],
        summary: "P(R_z <= r) = (1 - |z|^2/r^2)^2",
        eval: |a| {
            let f = "radius_cdf";
            Ok(p(formulas::radius_cdf(a.real("r", f)?, a.point('z', f)?)?))
        },
    },
    Formula {
        name: "bulk_containment_in_disk",
        params: &["z", "w", "R"],
        summary: "P(z in bubble with bulk point w, conditioned to stay in D_R)",
        eval: |a| {
            let f = "bulk_containment_in_disk";
            Ok(p(formulas::bulk_containment_in_disk(
                a.point('z', f)?,
                a.point('w', f)?,
                a.real("R", f)?,
            )?))
        },
    },
    Formula {
        name: "touch_radius_one_point",
        params: &["z"],
        summary: "P(z in bubble conditioned to have radius 1)",
        eval: |a| {
            Ok(p(formulas::touch_radius_one_point(
                a.point('z', "touch_radius_one_point")?,
            )?))
        },
    },
    Formula {
        name: "area_integrand",
        params: &["z", "w"],
        summary: "P(z, w in bubble conditioned to have radius 1)",
        eval: |a| {
            let f = "area_integrand";
            Ok(p(formulas::area_integrand(
                a.point('z', f)?,
                a.point('w', f)?,
            )?))
        },
    },
    Formula {
        name: "two_path_two_point",
        params: &["z", "w"],
        summary: "P(z, w in the hull of two commuting SLE(8/3) paths)",
        eval: |a| {
            let f = "two_path_two_point";
            Ok(p(formulas::two_path_two_point(
                a.point('z', f)?,
                a.point('w', f)?,
            )?))
        },
    },
    Formula {
        name: "two_path_one_point",
        params: &["z"],
        summary: "(4/5) sin^2(arg z)",
        eval: |a| {
            Ok(p(formulas::two_path_one_point(
                a.point('z', "two_path_one_point")?,
            )))
        },
    },
    Formula {
        name: "two_path_in_not_in",
        params: &["z", "w"],
        summary: "P(z in the two-path hull, w not)",
        eval: |a| {
            let f = "two_path_in_not_in";
            Ok(p(formulas::two_path_in_not_in(
                a.point('z', f)?,
                a.point('w', f)?,
            )?))
        },
    },
];

pub fn lookup(name: &str) -> Option<&'static Formula> {
    REGISTRY.iter().find(|f| f.name == name)
}

/// `v` with 15 significant digits; exact zero prints as `0`.
pub fn sig15(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        format!("{:.*}", (14 - exp) as usize, v)
    } else {
        format!("{:.14e}", v)
    }
}

pub fn format_value(v: &Value) -> String {
    match v {
        Value::Real(x) => sig15(*x),
        Value::Complex(z) => {
            if z.im < 0.0 {
                format!("{}-{}i", sig15(z.re), sig15(-z.im))
            } else {
                format!("{}+{}i", sig15(z.re), sig15(z.im))
            }
        }
        Value::Expansion { value, untrusted } => {
            if *untrusted {
                format!(
                    "{} (warning: eps/R > 0.1, expansion untrustworthy)",
                    sig15(*value)
                )
            } else {
                sig15(*value)
            }
        }
    }
}
