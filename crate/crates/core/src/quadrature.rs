//! First and second area moments of the SLE(8/3) bubble conditioned to have
//! radius 1.
//!
//! `E[A] = ∫ f₁(z) dA(z)` over the unit half-disk `D₊`, and
//! `E[A²] = ∬ f(z, w) dA(z) dA(w)` over `D₊ × D₊`, where `f₁` and `f` are
//! [`touch_radius_one_point`](crate::formulas::touch_radius_one_point) and
//! [`area_integrand`](crate::formulas::area_integrand).
//!
//! The second moment is computed twice:
//! - a deterministic tensor Gauss rule: graded polar coordinates for `z`, and
//!   for `w` a fan of rays from `z` to the boundary of `D₊`, with the radial
//!   parameter cubed so the cusp of `f` on the diagonal `w = z` is smoothed;
//! - stratified Monte Carlo: `z` stratified and graded towards the circle,
//!   `w` drawn from a mixture of the uniform density and a `1/ρ` kernel
//!   around `z`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::formulas::{area_integrand_raw, touch_one_raw};
use crate::sle_sim::run_rng;

/// `π/10`, the first moment.
pub const FIRST_MOMENT: f64 = PI / 10.0;
/// `π/30`, the second moment predicted by the Airy area law.
pub const AIRY_SECOND_MOMENT: f64 = PI / 30.0;
/// `E[A²]/E[A]² = 10/(3π)` under the Airy law.
pub const AIRY_RATIO: f64 = 10.0 / (3.0 * PI);
/// Pairs closer than this are evaluated at the diagonal value `f₁(z)`.
pub const DIAGONAL_CAP_DIST: f64 = 1e-12;
/// Smallest MC budget accepted by [`integrate_second_moment`].
pub const MIN_MC_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Deterministic,
    StratifiedMc,
    UniformMc,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Deterministic => "deterministic",
            Method::StratifiedMc => "stratified-mc",
            Method::UniformMc => "uniform-mc",
        }
    }
}

/// Integration domain: the half-disk `{|z| < radius, ℑz > 0}` for each point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub radius: f64,
}

impl Region {
    pub const UNIT: Region = Region { radius: 1.0 };

    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= 1.0) {
            return Err(domain(format!(
                "region radius must lie in (0, 1], got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    fn area(self) -> f64 {
        0.5 * PI * self.radius * self.radius
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "half-disk(r<{})", self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Refinement difference for the deterministic rule, `3·SE` for MC.
    pub error_estimate: f64,
    pub n_evaluations: u64,
    pub method: Method,
    pub region: Region,
    pub budget: u64,
    pub seed: Option<u64>,
    pub wall_clock_s: f64,
}

/// Both second-moment results and their comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentReport {
    pub deterministic: IntegralResult,
    pub stratified: IntegralResult,
    /// `|det − mc| / det`.
    pub relative_discrepancy: f64,
    /// True when the methods differ by more than their combined error estimates.
    pub flagged: bool,
    /// Headline value: the deterministic one.
    pub value: f64,
    /// `value / (π/10)²`, to compare with [`AIRY_RATIO`].
    pub ratio_to_first_squared: f64,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` (Newton on `P_n`).
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // after the recurrence p1 = P_n(x), p0 = P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// The grading map `u ↦ 3u² − 2u³` on `[0, 1]` and its derivative; it
/// clusters nodes at both ends.
fn smoothstep(u: f64) -> (f64, f64) {
    (u * u * (3.0 - 2.0 * u), 6.0 * u * (1.0 - u))
}

/// Polar Gauss rule for `∫_{D₊(R)} g dA` with both coordinates graded.
fn polar_nodes(n_r: usize, n_theta: usize, radius: f64) -> Vec<(f64, f64, f64)> {
    let (ur, wr) = gauss_legendre_unit(n_r);
    let (ut, wt) = gauss_legendre_unit(n_theta);
    let mut out = Vec::with_capacity(n_r * n_theta);
    for (a, wa) in ur.iter().zip(&wr) {
        let (sr, dr) = smoothstep(*a);
        let r = radius * sr;
        for (b, wb) in ut.iter().zip(&wt) {
            let (st, dt) = smoothstep(*b);
            let th = PI * st;
            let w = wa * wb * r * radius * dr * PI * dt;
            out.push((r * th.cos(), r * th.sin(), w));
        }
    }
    out
}

/// `∫_{D₊} f₁ dA` by a graded polar Gauss rule; the error estimate is the
/// difference between orders `n` and `2n`, refined until it is below `tol`.
pub fn integrate_first_moment(tol: f64) -> Result<IntegralResult> {
    if !(tol > 0.0) {
        return Err(domain(format!("tol must be positive, got {tol}")));
    }
    let start = Instant::now();
    let rule = |n: usize| -> (f64, u64) {
        let nodes = polar_nodes(n, n, 1.0);
        let v = nodes.iter().map(|&(x, y, w)| w * touch_one_raw(x, y)).sum();
        (v, nodes.len() as u64)
    };
    let mut n = 4;
    let (mut prev, mut evals) = rule(n);
    while n <= 512 {
        n *= 2;
        let (cur, e) = rule(n);
        evals += e;
        let err = (cur - prev).abs();
        if err < tol {
            return Ok(IntegralResult {
                value: cur,
                error_estimate: err,
                n_evaluations: evals,
                method: Method::Deterministic,
                region: Region::UNIT,
                budget: evals,
                seed: None,
                wall_clock_s: start.elapsed().as_secs_f64(),
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "first moment refinements still differ by more than {tol} at order {n}"
    )))
}

/// `f(z, w)` with the diagonal cap applied; points outside the domain give 0.
fn pair_value(x: f64, y: f64, u: f64, v: f64, radius: f64) -> Result<f64> {
    let r2 = radius * radius;
    if !(y > 0.0 && v > 0.0) || x * x + y * y >= r2 || u * u + v * v >= r2 {
        return Ok(0.0);
    }
    if (x - u).hypot(y - v) < DIAGONAL_CAP_DIST {
        return Ok(touch_one_raw(x, y));
    }
    area_integrand_raw(x, y, u, v)
}

/// Inner integral `∫_{D₊(R)} f(z, w) dA(w)` as a fan from `z` over the
/// boundary of the half-disk: `w = z + s³ (b(τ) − z)` with `b` running over
/// the segment `[−R, R]` and then the arc. Then
/// `dA(w) = 3 s⁵ |det(b − z, b′)| ds dτ`, where the determinant is `y` on the
/// segment and `R² − R(x cos α + y sin α)` on the arc, so both pieces are
/// smooth and the cusp at `w = z` sits at `s = 0`.
fn inner_integral(x: f64, y: f64, radius: f64, nodes: &[f64], weights: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (t, wt) in nodes.iter().zip(weights) {
        let xi = radius * (2.0 * t - 1.0);
        let alpha = PI * t;
        let (sa, ca) = alpha.sin_cos();
        let pieces = [
            (xi, 0.0, 2.0 * radius * y),
            (
                radius * ca,
                radius * sa,
                PI * (radius * radius - radius * (x * ca + y * sa)),
            ),
        ];
        for (bx, by, jac) in pieces {
            let mut radial = 0.0;
            for (s, ws) in nodes.iter().zip(weights) {
                let lam = s * s * s;
                let f = pair_value(x, y, x + lam * (bx - x), y + lam * (by - y), radius)?;
                radial += ws * 3.0 * s.powi(5) * f;
            }
            total += wt * jac * radial;
        }
    }
    Ok(total)
}

/// Deterministic 4-D rule with `n` nodes per coordinate: `2n⁴` evaluations.
fn deterministic_level(n: usize, region: Region) -> Result<(f64, u64)> {
    let outer = polar_nodes(n, n, region.radius);
    let (nodes, weights) = gauss_legendre_unit(n);
    let vals: Vec<f64> = outer
        .par_iter()
        .map(|&(x, y, w)| Ok(w * inner_integral(x, y, region.radius, &nodes, &weights)?))
        .collect::<Result<_>>()?;
    Ok((vals.iter().sum(), (2 * n * n * n * n) as u64))
}

/// Order for a budget of `budget` evaluations split over two levels.
fn deterministic_order(budget: u64) -> usize {
    // levels n and 3n/4 cost about 2n⁴(1 + 0.32)
    ((budget as f64 / 2.63).powf(0.25).floor() as usize).clamp(6, 64)
}

/// Deterministic second moment over `region`; the error estimate is the
/// difference between orders `n` and `⌈3n/4⌉`.
pub fn integrate_second_moment_deterministic(
    budget: u64,
    region: Region,
) -> Result<IntegralResult> {
    let start = Instant::now();
    let n = deterministic_order(budget);
    let coarse = (3 * n).div_ceil(4);
    let (hi, e1) = deterministic_level(n, region)?;
    let (lo, e2) = deterministic_level(coarse, region)?;
    Ok(IntegralResult {
        value: hi,
        error_estimate: (hi - lo).abs(),
        n_evaluations: e1 + e2,
        method: Method::Deterministic,
        region,
        budget,
        seed: None,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Radius of the `1/ρ` kernel around `z` in the stratified sampler.
const KERNEL_RADIUS: f64 = 0.5;
/// Mixture weight of the uniform component.
const UNIFORM_SHARE: f64 = 0.5;

fn cells_per_side(budget: u64) -> usize {
    ((budget as f64 / 16.0).sqrt().floor() as usize).clamp(1, 256)
}

/// Stratified/importance MC second moment over `region`.
///
/// `z` comes from a `K × K` grid of strata in `(u_r, u_θ)` with
/// `r = R(1 − (1 − u_r)²)` (denser near the circle) and `θ = π u_θ`. Given `z`,
/// `w` is uniform on `D₊(R)` with probability ½ and otherwise
/// `w = z + ρ e^{iφ}` with `ρ` uniform on `(0, R/2)`, which has area density
/// `1/(π R ρ)` and takes extra samples near the diagonal. Draws outside the
/// domain score 0. Stratum `c` uses RNG stream `c`.
pub fn integrate_second_moment_mc(
    budget: u64,
    seed: u64,
    region: Region,
) -> Result<IntegralResult> {
    let start = Instant::now();
    let k = cells_per_side(budget);
    let m = (budget / (k * k) as u64).max(2);
    let radius = region.radius;
    let kr = KERNEL_RADIUS * radius;
    let uniform_density = 1.0 / region.area();
    let cells: Vec<(f64, f64)> = (0..k * k)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let (ci, cj) = ((c / k) as f64, (c % k) as f64);
            let mut rng = run_rng(seed, c as u64);
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in 0..m {
                let ur = (ci + rng.random::<f64>()) / k as f64;
                let ut = (cj + rng.random::<f64>()) / k as f64;
                let r = radius * (1.0 - (1.0 - ur) * (1.0 - ur));
                let dr = radius * 2.0 * (1.0 - ur);
                let th = PI * ut;
                let (x, y) = (r * th.cos(), r * th.sin());
                // dA(z) = r dr dθ with dr = r'(u) du, dθ = π du
                let wz = r * dr * PI;
                let (u, v) = if rng.random::<f64>() < UNIFORM_SHARE {
                    let rr = radius * rng.random::<f64>().sqrt();
                    let tt = PI * rng.random::<f64>();
                    (rr * tt.cos(), rr * tt.sin())
                } else {
                    let rho = kr * rng.random::<f64>();
                    let phi = 2.0 * PI * rng.random::<f64>();
                    (x + rho * phi.cos(), y + rho * phi.sin())
                };
                let fv = pair_value(x, y, u, v, radius)?;
                let val = if fv == 0.0 {
                    0.0
                } else {
                    let rho = (u - x).hypot(v - y);
                    let kernel = if rho < kr {
                        1.0 / (2.0 * PI * kr * rho)
                    } else {
                        0.0
                    };
                    let q = UNIFORM_SHARE * uniform_density + (1.0 - UNIFORM_SHARE) * kernel;
                    wz * fv / q
                };
                sum += val;
                sum2 += val * val;
            }
            let mf = m as f64;
            let mean = sum / mf;
            let var = ((sum2 - mf * mean * mean) / (mf - 1.0)).max(0.0);
            Ok((mean, var / mf))
        })
        .collect::<Result<_>>()?;
    let kk = (k * k) as f64;
    let value = cells.iter().map(|c| c.0).sum::<f64>() / kk;
    let var = cells.iter().map(|c| c.1).sum::<f64>() / (kk * kk);
    Ok(IntegralResult {
        value,
        error_estimate: 3.0 * var.sqrt(),
        n_evaluations: m * (k * k) as u64,
        method: Method::StratifiedMc,
        region,
        budget,
        seed: Some(seed),
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Plain MC with `z`, `w` independent and uniform on `D₊(R)`.
pub fn integrate_second_moment_uniform(
    budget: u64,
    seed: u64,
    region: Region,
) -> Result<IntegralResult> {
    const SHARD: u64 = 1 << 14;
    let start = Instant::now();
    let n_shards = budget.div_ceil(SHARD).max(1);
    let radius = region.radius;
    let area2 = region.area() * region.area();
    let shards: Vec<(f64, f64, u64)> = (0..n_shards)
        .into_par_iter()
        .map(|sh| -> Result<(f64, f64, u64)> {
            let mut rng = run_rng(seed, sh);
            let count = SHARD.min(budget - sh * SHARD);
            let mut draw = || {
                let rr = radius * rng.random::<f64>().sqrt();
                let tt = PI * rng.random::<f64>();
                (rr * tt.cos(), rr * tt.sin())
            };
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let (x, y) = draw();
                let (u, v) = draw();
                let val = area2 * pair_value(x, y, u, v, radius)?;
                s += val;
                s2 += val * val;
            }
            Ok((s, s2, count))
        })
        .collect::<Result<_>>()?;
    let n: u64 = shards.iter().map(|s| s.2).sum();
    let nf = n as f64;
    let sum: f64 = shards.iter().map(|s| s.0).sum();
    let sum2: f64 = shards.iter().map(|s| s.1).sum();
    let mean = sum / nf;
    let var = ((sum2 - nf * mean * mean) / (nf - 1.0).max(1.0)).max(0.0);
    Ok(IntegralResult {
        value: mean,
        error_estimate: 3.0 * (var / nf).sqrt(),
        n_evaluations: n,
        method: Method::UniformMc,
        region,
        budget,
        seed: Some(seed),
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Both second-moment methods over `D₊ × D₊`.
pub fn integrate_second_moment(budget: u64, seed: u64) -> Result<SecondMomentReport> {
    integrate_second_moment_in(budget, seed, Region::UNIT)
}

pub fn integrate_second_moment_in(
    budget: u64,
    seed: u64,
    region: Region,
) -> Result<SecondMomentReport> {
    if budget < MIN_MC_BUDGET {
        return Err(domain(format!(
            "second-moment budget must be at least {MIN_MC_BUDGET}, got {budget}"
        )));
    }
    Ok(compare(
        integrate_second_moment_deterministic(budget, region)?,
        integrate_second_moment_mc(budget, seed, region)?,
    ))
}

/// Comparison of the two methods, for any budget.
pub fn compare(deterministic: IntegralResult, stratified: IntegralResult) -> SecondMomentReport {
    let diff = (deterministic.value - stratified.value).abs();
    SecondMomentReport {
        relative_discrepancy: diff / deterministic.value.abs(),
        flagged: diff > deterministic.error_estimate + stratified.error_estimate,
        value: deterministic.value,
        ratio_to_first_squared: deterministic.value / (FIRST_MOMENT * FIRST_MOMENT),
        deterministic,
        stratified,
    }
}

/// Values of `f` on a `n × n` grid of `z` over `D₊` with `w` fixed:
/// rows `(x, y, f)`, NaN outside the half-disk.
pub fn grid_slice(w: (f64, f64), n: usize) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
            let y = (j as f64 + 0.5) / n as f64;
            let f = if x * x + y * y < 1.0 {
                pair_value(x, y, w.0, w.1, 1.0)?
            } else {
                f64::NAN
            };
            out.push((x, y, f));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n_probe: u64,
    pub n_nan: u64,
    pub n_negative: u64,
    pub n_above_one: u64,
    pub max_value: f64,
    /// `(distance, max f, max |f − f₁(z)|)` for `w` at distance `10⁻ᵏ`, `k = 2..8`.
    pub near_diagonal: Vec<(f64, f64, f64)>,
    /// Log-log slope of the near-diagonal maxima against distance; near 0
    /// when `f` stays bounded.
    pub diagonal_growth_exponent: f64,
    /// `(y, max f/y²)` as `z` approaches the real axis.
    pub near_axis: Vec<(f64, f64)>,
    /// Log-log slope of `max f` against `y`; 2, since `f(z, w) ≤ f₁(z) = O(y²)`.
    pub axis_exponent: f64,
}

impl Diagnostics {
    pub fn clean(&self) -> bool {
        self.n_nan == 0 && self.n_negative == 0 && self.n_above_one == 0
    }
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Scans `f` at random pairs, near the diagonal and near the real axis.
pub fn integrand_diagnostics(n_probe: u64, seed: u64) -> Result<Diagnostics> {
    const SHARD: u64 = 1 << 14;
    const NEG_TOL: f64 = 1e-9;
    let n_shards = n_probe.div_ceil(SHARD);
    let scans: Vec<(u64, u64, u64, f64)> = (0..n_shards)
        .into_par_iter()
        .map(|sh| {
            let mut rng = run_rng(seed, sh);
            let count = SHARD.min(n_probe - sh * SHARD);
            let mut draw = || {
                let rr = rng.random::<f64>().sqrt();
                let tt = PI * rng.random::<f64>();
                (rr * tt.cos(), rr * tt.sin())
            };
            let (mut nan, mut neg, mut big, mut max) = (0, 0, 0, 0.0f64);
            for _ in 0..count {
                let (x, y) = draw();
                let (u, v) = draw();
                match pair_value(x, y, u, v, 1.0) {
                    Ok(f) if f.is_nan() => nan += 1,
                    Ok(f) => {
                        neg += (f < -NEG_TOL) as u64;
                        big += (f > 1.0 + NEG_TOL) as u64;
                        max = max.max(f);
                    }
                    Err(_) => nan += 1,
                }
            }
            (nan, neg, big, max)
        })
        .collect();
    let mut d = Diagnostics {
        n_probe,
        n_nan: scans.iter().map(|s| s.0).sum(),
        n_negative: scans.iter().map(|s| s.1).sum(),
        n_above_one: scans.iter().map(|s| s.2).sum(),
        max_value: scans.iter().map(|s| s.3).fold(0.0, f64::max),
        near_diagonal: Vec::new(),
        diagonal_growth_exponent: 0.0,
        near_axis: Vec::new(),
        axis_exponent: 0.0,
    };
    let bases = [
        (0.0, 0.5),
        (0.3, 0.4),
        (-0.6, 0.2),
        (0.05, 0.9),
        (0.7, 0.05),
    ];
    for k in 2..=8 {
        let dist = 10f64.powi(-k);
        let (mut fmax, mut dev) = (0.0f64, 0.0f64);
        for &(x, y) in &bases {
            for j in 0..8 {
                let phi = 2.0 * PI * (j as f64 + 0.5) / 8.0;
                let (u, v) = (x + dist * phi.cos(), y + dist * phi.sin());
                let f = pair_value(x, y, u, v, 1.0)?;
                fmax = fmax.max(f);
                dev = dev.max((f - touch_one_raw(x, y)).abs());
            }
        }
        d.near_diagonal.push((dist, fmax, dev));
    }
    let diag: Vec<(f64, f64)> = d.near_diagonal.iter().map(|&(r, f, _)| (r, f)).collect();
    d.diagonal_growth_exponent = -slope(&diag);
    let partners = [(0.2, 0.5), (-0.4, 0.3), (0.0, 0.8)];
    let mut axis = Vec::new();
    for k in 2..=6 {
        let y = 10f64.powi(-k);
        let mut fmax = 0.0f64;
        for &(u, v) in &partners {
            for &x in &[-0.5, 0.1, 0.6] {
                fmax = fmax.max(pair_value(x, y, u, v, 1.0)?);
            }
        }
        d.near_axis.push((y, fmax / (y * y)));
        axis.push((y, fmax));
    }
    d.axis_exponent = slope(&axis);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 8, 13] {
            let (x, w) = gauss_legendre_unit(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn polar_rule_gives_half_disk_area() {
        let area: f64 = polar_nodes(12, 12, 0.5).iter().map(|n| n.2).sum();
        assert!((area - PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn first_moment_is_pi_over_ten() {
        let r = integrate_first_moment(1e-3).unwrap();
        assert!((r.value - FIRST_MOMENT).abs() < 1e-3);
        assert!(r.error_estimate >= 0.0);
        assert!(integrate_first_moment(0.0).is_err());
    }

    #[test]
    fn fan_jacobians_give_half_disk_area() {
        // the fan rule with f ≡ 1: ∫ 3 s⁵ ds = 1/2 times the boundary integral
        let (t, w) = gauss_legendre_unit(12);
        let (x, y, r) = (0.3f64, 0.2f64, 1.0f64);
        let mut area = 0.0;
        for (t, wt) in t.iter().zip(&w) {
            let a = PI * t;
            area += wt * 0.5 * (2.0 * r * y + PI * (r * r - r * (x * a.cos() + y * a.sin())));
        }
        assert!((area - PI / 2.0).abs() < 1e-13, "{area}");
    }

    #[test]
    fn small_budget_paths_still_report() {
        let det = integrate_second_moment_deterministic(10_000, Region::UNIT).unwrap();
        let mc = integrate_second_moment_mc(10_000, 1, Region::UNIT).unwrap();
        assert!(det.value > 0.0 && mc.value > 0.0);
        assert!(mc.error_estimate > 0.0);
        assert!(integrate_second_moment(10_000, 1).is_err());
    }
}
