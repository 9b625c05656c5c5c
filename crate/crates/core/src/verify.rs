//! Invariant suite behind `sle-passage verify`.
//!
//! Each check returns a pass flag and a one-line detail. Checks are tiered:
//! [`Tier::Quick`] runs in well under a second, [`Tier::Standard`] is the
//! default suite, [`Tier::Long`] adds the Monte Carlo experiments.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::formulas::*;
use crate::mc_harness::{
    load, one_point_tally, persist, run_martingale_test, run_one_point, two_point_counts,
    ExperimentRecord, Tally,
};
use crate::point::HalfPlanePoint;
use crate::quadrature::{
    gauss_legendre_unit, integrand_diagnostics, integrate_first_moment,
    integrate_second_moment_deterministic, integrate_second_moment_mc,
    integrate_second_moment_uniform, Region, FIRST_MOMENT,
};
use crate::sle_sim::{
    classify_passage, classify_passage_adaptive, run_rng, sample_driver, SimConfig,
};
use crate::special_fn::{
    g_ode_residual, g_sigma, green_constant, hyp2f1, kummer_residual, Hyp2F1Query, SigmaValue,
    DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Quick,
    Standard,
    Long,
}

pub type CheckFn = fn() -> Result<(bool, String)>;

pub struct Check {
    pub name: &'static str,
    pub module: &'static str,
    pub tier: Tier,
    pub run: CheckFn,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub module: &'static str,
    pub tier: Tier,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn pt(x: f64, y: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(x, y).expect("literal point in the upper half-plane")
}

fn random_point(rng: &mut impl Rng) -> HalfPlanePoint {
    let x = rng.random_range(-3.0..3.0);
    let y = 10f64.powf(rng.random_range(-2.0..0.5));
    pt(x, y)
}

fn random_unit_half_disk(rng: &mut impl Rng) -> HalfPlanePoint {
    loop {
        let r = rng.random::<f64>().sqrt();
        let t = PI * rng.random::<f64>();
        if r > 1e-6 && t.sin() > 0.0 && r < 1.0 {
            return pt(r * t.cos(), r * t.sin());
        }
    }
}

/// Every check, in display order.
pub fn checks() -> Vec<Check> {
    use Tier::*;
    let c = |name, module, tier, run| Check {
        name,
        module,
        tier,
        run,
    };
    vec![
        c(
            "hyp2f1_parameter_symmetry",
            "special_fn",
            Quick,
            hyp2f1_symmetry,
        ),
        c("g_strictly_decreasing", "special_fn", Quick, g_monotone),
        c("g_in_unit_interval", "special_fn", Quick, g_range),
        c("kummer_identity", "special_fn", Quick, kummer),
        c("ode_residual_second_order", "special_fn", Quick, ode_rate),
        c("probability_range_quick", "exact_formulas", Quick, || {
            probability_range(2_000)
        }),
        c("probability_range", "exact_formulas", Standard, || {
            probability_range(100_000)
        }),
        c(
            "joint_below_marginals",
            "exact_formulas",
            Quick,
            joint_below_marginals,
        ),
        c(
            "mobius_covariance",
            "exact_formulas",
            Quick,
            mobius_covariance,
        ),
        c(
            "factorization_limit",
            "exact_formulas",
            Quick,
            factorization_limit,
        ),
        c(
            "scale_invariance",
            "exact_formulas",
            Quick,
            scale_invariance,
        ),
        c(
            "area_integrand_symmetry",
            "exact_formulas",
            Quick,
            area_symmetry,
        ),
        c(
            "area_integrand_diagonal_limit",
            "exact_formulas",
            Quick,
            area_diagonal,
        ),
        c("radius_law", "exact_formulas", Quick, radius_law),
        c("green_limit_convergence", "exact_formulas", Quick, || {
            green_limit_check(green_constant())
        }),
        c(
            "two_path_collapse",
            "exact_formulas",
            Quick,
            two_path_collapse,
        ),
        c("simulation_determinism", "sle_sim", Quick, determinism),
        c(
            "undecided_fraction_decreases",
            "sle_sim",
            Standard,
            undecided_decreases,
        ),
        c("scale_consistency_chi2", "sle_sim", Long, scale_consistency),
        c("outcome_frequencies_sum", "mc_harness", Quick, outcome_sum),
        c("standard_error_formula", "mc_harness", Quick, se_formula),
        c("shard_merge_associative", "mc_harness", Quick, shard_merge),
        c(
            "persist_round_trip",
            "mc_harness",
            Quick,
            persist_round_trip,
        ),
        c("first_moment", "quadrature", Quick, first_moment),
        c(
            "second_moment_bounds",
            "quadrature",
            Standard,
            second_moment_bounds,
        ),
        c(
            "importance_sampling_unbiased",
            "quadrature",
            Standard,
            importance_unbiased,
        ),
        c("integrand_diagnostics", "quadrature", Standard, diagnostics),
        c("one_point_mc", "sle_sim", Long, one_point_mc),
        c("martingale_mc", "sle_sim", Long, martingale_mc),
    ]
}

/// Runs every check with tier at most `max_tier`.
pub fn run_suite(max_tier: Tier) -> Vec<CheckResult> {
    checks()
        .into_iter()
        .filter(|c| c.tier <= max_tier)
        .map(|c| {
            let start = Instant::now();
            let (passed, detail) = match (c.run)() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name: c.name,
                module: c.module,
                tier: c.tier,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

pub fn format_matrix(results: &[CheckResult]) -> String {
    let mut s = format!(
        "{:<16} {:<32} {:<6} {:>8}  detail\n",
        "module", "check", "result", "time"
    );
    for r in results {
        s.push_str(&format!(
            "{:<16} {:<32} {:<6} {:>7.2}s  {}\n",
            r.module,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.seconds,
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    s.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    s
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn hyp2f1_symmetry() -> Result<(bool, String)> {
    let mut rng = run_rng(11, 0);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let a = rng.random_range(-1.5..3.0);
        let b = rng.random_range(-1.5..3.0);
        let c = rng.random_range(0.3..5.0);
        let x = rng.random_range(-0.9..0.9);
        let f1 = hyp2f1(&Hyp2F1Query::new(a, b, c, x)?, DEFAULT_TOL)?;
        let f2 = hyp2f1(&Hyp2F1Query::new(b, a, c, x)?, DEFAULT_TOL)?;
        worst = worst.max((f1 - f2).abs() / f1.abs().max(1.0));
    }
    Ok((
        worst < 1e-10,
        format!("max relative asymmetry {worst:.2e} over 500 queries"),
    ))
}

fn g_monotone() -> Result<(bool, String)> {
    let vals: Vec<f64> = (0..=1000)
        .map(|k| SigmaValue::new(k as f64 / 1000.0).map(g_sigma))
        .collect::<Result<_>>()?;
    let bad = vals.windows(2).filter(|w| w[1] >= w[0]).count();
    Ok((
        bad == 0,
        format!("{bad} non-decreasing steps on a 1001-point grid"),
    ))
}

fn g_range() -> Result<(bool, String)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=10_000 {
        let g = g_sigma(SigmaValue::new(k as f64 / 10_000.0)?);
        lo = lo.min(g);
        hi = hi.max(g);
    }
    let ok = lo >= 0.0 && hi <= 1.0;
    Ok((ok, format!("G ranges over [{lo:.3e}, {hi}]")))
}

fn kummer() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
        worst = worst.max(kummer_residual(t)?.abs());
    }
    Ok((
        worst < 1e-9,
        format!("max |residual| {worst:.2e} at t in {{0.1,0.3,0.5,0.7,0.9}}"),
    ))
}

fn ode_rate() -> Result<(bool, String)> {
    let mut rates = Vec::new();
    for t in [0.2, 0.5, 0.8] {
        let r1 = g_ode_residual(t, 1e-2)?;
        let r2 = g_ode_residual(t, 5e-3)?;
        rates.push((r1 / r2).abs().log2());
    }
    let ok = rates.iter().all(|r| (r - 2.0).abs() < 0.2);
    Ok((ok, format!("observed orders {rates:.3?}")))
}

fn probability_range(n: usize) -> Result<(bool, String)> {
    let mut rng = run_rng(12, 0);
    let mut bad = 0usize;
    let mut errors = 0usize;
    let mut note = |r: Result<f64>| match r {
        Ok(p) if (0.0..=1.0).contains(&p) => {}
        Ok(_) => bad += 1,
        Err(_) => errors += 1,
    };
    for _ in 0..n {
        let z = random_point(&mut rng);
        let w = random_point(&mut rng);
        note(Ok(left_passage_one(z).value()));
        note(Ok(left_passage_two(z, w).value()));
        note(separation_probability(z, w).map(|p| p.value()));
        note(bulk_containment(z, w).map(|p| p.value()));
        note(radius_cdf(rng.random_range(0.01..5.0), z).map(|p| p.value()));
        note(two_path_two_point(z, w).map(|p| p.value()));
        note(Ok(two_path_one_point(z).value()));
        note(two_path_in_not_in(z, w).map(|p| p.value()));
        let a = random_unit_half_disk(&mut rng);
        let b = random_unit_half_disk(&mut rng);
        note(bulk_containment_in_disk(a, b, 1.0).map(|p| p.value()));
        note(touch_radius_one_point(a).map(|p| p.value()));
        note(area_integrand(a, b).map(|p| p.value()));
    }
    Ok((
        bad == 0 && errors == 0,
        format!("{n} draws x 11 ops: {bad} out of range, {errors} errors"),
    ))
}

fn joint_below_marginals() -> Result<(bool, String)> {
    let mut rng = run_rng(13, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let z = random_point(&mut rng);
        let w = random_point(&mut rng);
        let j = left_passage_two(z, w).value();
        let m = left_passage_one(z).value().min(left_passage_one(w).value());
        worst = worst.max(j - m);
    }
    Ok((
        worst <= 1e-12,
        format!("max L(z,w) - min(L(z),L(w)) = {worst:.2e}"),
    ))
}

fn mobius_covariance() -> Result<(bool, String)> {
    let mut rng = run_rng(14, 0);
    let mut worst = 0.0f64;
    for eps in [0.01, 0.1, 1.0] {
        for _ in 0..1_000 {
            let z = pt(rng.random_range(-2.0..2.0), rng.random_range(0.1..2.0));
            let w = pt(rng.random_range(-2.0..2.0), rng.random_range(0.1..2.0));
            let s = sigma(z, w).value();
            let t = sigma(mobius_f_eps(z, eps)?, mobius_f_eps(w, eps)?).value();
            worst = worst.max((s - t).abs());
        }
    }
    Ok((
        worst < 1e-12,
        format!("max |sigma(F z, F w) - sigma(z, w)| = {worst:.2e}"),
    ))
}

fn factorization_limit() -> Result<(bool, String)> {
    let z = pt(0.3, 1.2);
    let mut errs = Vec::new();
    for v in [1e-2, 1e-4, 1e-6, 1e-8] {
        let w = pt(-0.7, v);
        let prod = left_passage_one(z).value() * left_passage_one(w).value();
        errs.push((left_passage_two(z, w).value() - prod).abs());
    }
    let ok = errs.windows(2).all(|e| e[1] <= e[0]) && errs[3] < 1e-6;
    Ok((
        ok,
        format!("|L(z,w) - L(z)L(w)| for v = 1e-2..1e-8: {}", sci(&errs)),
    ))
}

fn scale_invariance() -> Result<(bool, String)> {
    let mut rng = run_rng(15, 0);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let z = random_point(&mut rng);
        let w = random_point(&mut rng);
        for lambda in [0.5, 3.0, 17.3] {
            let (zl, wl) = (z.scale(lambda)?, w.scale(lambda)?);
            let pairs = [
                (left_passage_one(z).value(), left_passage_one(zl).value()),
                (
                    left_passage_two(z, w).value(),
                    left_passage_two(zl, wl).value(),
                ),
                (
                    two_path_one_point(z).value(),
                    two_path_one_point(zl).value(),
                ),
                (
                    two_path_two_point(z, w)?.value(),
                    two_path_two_point(zl, wl)?.value(),
                ),
                (
                    two_path_in_not_in(z, w)?.value(),
                    two_path_in_not_in(zl, wl)?.value(),
                ),
            ];
            for (a, b) in pairs {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((
        worst < 1e-12,
        format!("max change under z,w -> lambda z, lambda w: {worst:.2e}"),
    ))
}

fn area_symmetry() -> Result<(bool, String)> {
    let mut rng = run_rng(16, 0);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let z = random_unit_half_disk(&mut rng);
        let w = random_unit_half_disk(&mut rng);
        let a = area_integrand(z, w)?.value();
        let b = area_integrand(w, z)?.value();
        worst = worst.max((a - b).abs());
    }
    Ok((
        worst < 1e-10,
        format!("max |f(z,w) - f(w,z)| = {worst:.2e} over 1000 pairs"),
    ))
}

fn area_diagonal() -> Result<(bool, String)> {
    let z = pt(0.0, 0.5);
    let limit = touch_radius_one_point(z)?.value();
    let mut worst = 0.0f64;
    for j in 0..8 {
        let phi = 2.0 * PI * j as f64 / 8.0;
        let w = pt(1e-6 * phi.cos(), 0.5 + 1e-6 * phi.sin());
        worst = worst.max((area_integrand(z, w)?.value() - limit).abs());
    }
    Ok((
        worst < 1e-3,
        format!("max |f(z, z + 1e-6 e^(i phi)) - f1(z)| = {worst:.2e}"),
    ))
}

fn radius_law() -> Result<(bool, String)> {
    let (t, wt) = gauss_legendre_unit(20);
    let mut worst_mass = 0.0f64;
    let mut worst_mean = 0.0f64;
    let mut monotone = true;
    for modulus in [0.5, 1.0, 2.0] {
        let z = pt(0.6 * modulus, 0.8 * modulus);
        // r = |z|/t maps (|z|, ∞) onto (0, 1)
        let (mut mass, mut mean_tail) = (0.0, 0.0);
        for (t, w) in t.iter().zip(&wt) {
            let r = modulus / t;
            let jac = modulus / (t * t);
            mass += w * jac * radius_density(r, z);
            mean_tail += w * jac * (1.0 - radius_cdf(r, z)?.value());
        }
        let mean = modulus + mean_tail;
        worst_mass = worst_mass.max((mass - 1.0).abs());
        worst_mean = worst_mean.max((mean - 8.0 / 3.0 * modulus).abs());
        let mut prev = 0.0;
        for k in 1..=400 {
            let p = radius_cdf(0.02 * k as f64 * modulus, z)?.value();
            monotone &= p >= prev;
            prev = p;
        }
    }
    let ok = worst_mass < 1e-8 && worst_mean < 1e-6 && monotone;
    Ok((
        ok,
        format!(
            "mass error {worst_mass:.2e}, E[R] error {worst_mean:.2e}, cdf monotone: {monotone}"
        ),
    ))
}

/// ε^{−2/3} times the separation probability of `i ± εη` against `c0` for
/// η ∈ {1, i} and ε = 10⁻²..10⁻⁵.
pub fn green_limit_check(c0: f64) -> Result<(bool, String)> {
    let mut ratios = Vec::new();
    let mut ok = true;
    for eta in [(1.0, 0.0), (0.0, 1.0)] {
        let mut errs = Vec::new();
        for k in 2..=5 {
            let eps = 10f64.powi(-k);
            let a = pt(-eps * eta.0, 1.0 - eps * eta.1);
            let b = pt(eps * eta.0, 1.0 + eps * eta.1);
            let ratio = separation_probability(a, b)?.value() * eps.powf(-2.0 / 3.0);
            errs.push((ratio - c0).abs() / c0);
        }
        ok &= errs.windows(2).all(|e| e[1] < e[0]) && errs[3] < 5e-3;
        ratios.push(errs);
    }
    Ok((
        ok,
        format!(
            "relative errors eta=1: {}, eta=i: {}",
            sci(&ratios[0]),
            sci(&ratios[1])
        ),
    ))
}

/// Value at `i`, and the collapse `w → z` of the two-point function, whose
/// error decays like `|δ|^{2/3}` because `1 − G(σ) ~ K σ^{1/3}` with `σ ~ |δ|²`.
fn two_path_collapse() -> Result<(bool, String)> {
    let at_i = two_path_one_point(pt(0.0, 1.0)).value();
    let z = pt(0.0, 1.0);
    let one = two_path_one_point(z).value();
    let errs: Vec<f64> = (3..=7)
        .map(|k| {
            let d = 10f64.powi(-k);
            let w = pt(d * 0.6, 1.0 + d * 0.8);
            Ok((two_path_two_point(z, w)?.value() - one).abs())
        })
        .collect::<Result<_>>()?;
    let orders: Vec<f64> = errs.windows(2).map(|e| (e[0] / e[1]).log10()).collect();
    let ok = (at_i - 0.8).abs() < 1e-15 && orders.iter().all(|o| (o - 2.0 / 3.0).abs() < 0.02);
    Ok((
        ok,
        format!(
            "value at i = {at_i}, errors at |delta| = 1e-3..1e-7: {}, orders {orders:.3?}",
            sci(&errs)
        ),
    ))
}

fn determinism() -> Result<(bool, String)> {
    let cfg = SimConfig {
        seed: 21,
        t_max: 1.0,
        ..Default::default()
    };
    let pts = [pt(0.2, 1.0), pt(-1.0, 0.5)];
    let d1 = sample_driver(&cfg)?;
    let d2 = sample_driver(&cfg)?;
    let same_fixed =
        d1 == d2 && classify_passage(&pts, &d1, &cfg) == classify_passage(&pts, &d2, &cfg);
    let cfg = SimConfig {
        seed: 21,
        ..Default::default()
    };
    let same_adaptive = (0..20).all(|s| {
        classify_passage_adaptive(&pts, &cfg, s) == classify_passage_adaptive(&pts, &cfg, s)
    });
    let ok = same_fixed && same_adaptive;
    Ok((
        ok,
        format!("fixed-grid identical: {same_fixed}, adaptive identical: {same_adaptive}"),
    ))
}

fn undecided_at(t_max: f64) -> f64 {
    let cfg = SimConfig {
        seed: 22,
        t_max,
        ..Default::default()
    };
    let t = one_point_tally(pt(0.3, 1.0), 0..2_000, &cfg);
    t.undecided as f64 / t.n as f64
}

fn undecided_decreases() -> Result<(bool, String)> {
    let fr: Vec<f64> = [0.05, 0.5, 5.0].iter().map(|&t| undecided_at(t)).collect();
    let ok = fr[0] > fr[1] && fr[1] > fr[2];
    Ok((
        ok,
        format!("undecided fraction at t_max = 0.05, 0.5, 5: {fr:.4?}"),
    ))
}

fn scale_consistency() -> Result<(bool, String)> {
    // 2×2 contingency table of Left/Right counts for z and λz on independent seeds
    let n = 10_000;
    let z = pt(0.5, 1.0);
    let lambda = 7.0;
    let a = one_point_tally(
        z,
        0..n,
        &SimConfig {
            seed: 31,
            ..Default::default()
        },
    );
    let b = one_point_tally(
        z.scale(lambda)?,
        0..n,
        &SimConfig {
            seed: 32,
            ..Default::default()
        },
    );
    let table = [
        [a.hits as f64, (a.n - a.hits - a.undecided) as f64],
        [b.hits as f64, (b.n - b.hits - b.undecided) as f64],
    ];
    let total: f64 = table.iter().flatten().sum();
    let mut chi2 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let row: f64 = table[i].iter().sum();
            let col = table[0][j] + table[1][j];
            let e = row * col / total;
            chi2 += (table[i][j] - e).powi(2) / e;
        }
    }
    // 1% critical value of χ² with one degree of freedom
    let ok = chi2 < 6.635;
    Ok((
        ok,
        format!("chi2 = {chi2:.3} (1 dof, 1% critical value 6.635)"),
    ))
}

fn outcome_sum() -> Result<(bool, String)> {
    let cfg = SimConfig {
        seed: 23,
        ..Default::default()
    };
    let c = two_point_counts(pt(-0.5, 1.0), pt(0.5, 1.0), 0..500, &cfg);
    let ok = c.ll + c.lr + c.rl + c.rr + c.undecided == 500;
    Ok((ok, format!("LL+LR+RL+RR+undecided = {} of 500", c.total())))
}

fn se_formula() -> Result<(bool, String)> {
    let e = Tally {
        n: 12_345,
        hits: 4_321,
        undecided: 17,
    }
    .estimate();
    let p = 4_321.0 / 12_345.0;
    let expect = (p * (1.0 - p) / 12_345.0f64).sqrt();
    let ok = (e.std_error - expect).abs() < 1e-16
        && e.bracket_low <= e.mean
        && e.mean <= e.bracket_high
        && e.bracket_high - e.bracket_low >= 17.0 / 12_345.0 - 1e-15;
    Ok((ok, format!("SE {} vs {expect}", e.std_error)))
}

fn shard_merge() -> Result<(bool, String)> {
    let cfg = SimConfig {
        seed: 24,
        ..Default::default()
    };
    let z = pt(0.1, 0.7);
    let pooled = one_point_tally(z, 0..200, &cfg);
    let merged = [0..73, 73..150, 150..200]
        .into_iter()
        .map(|r| one_point_tally(z, r, &cfg))
        .fold(Tally::default(), Tally::merge);
    let ok = pooled == merged && pooled.estimate() == merged.estimate();
    Ok((ok, format!("pooled {pooled:?}, merged {merged:?}")))
}

fn persist_round_trip() -> Result<(bool, String)> {
    let cfg = SimConfig {
        seed: 25,
        ..Default::default()
    };
    let recs: Vec<ExperimentRecord> = run_one_point(&[pt(0.5, 1.0)], 1_000, &cfg)?;
    let path =
        std::env::temp_dir().join(format!("sle-passage-verify-{}.jsonl", std::process::id()));
    persist(&recs, &path)?;
    let back = load(&path);
    let _ = std::fs::remove_file(&path);
    let back = back?;
    let rerun = run_one_point(&back[0].points, back[0].estimate.n, &back[0].config)?;
    let ok = back == recs && rerun[0].estimate == recs[0].estimate;
    Ok((
        ok,
        format!(
            "round trip equal: {}, rerun identical: {}",
            back == recs,
            rerun[0].estimate == recs[0].estimate
        ),
    ))
}

fn first_moment() -> Result<(bool, String)> {
    let r = integrate_first_moment(1e-6)?;
    let err = (r.value - FIRST_MOMENT).abs();
    Ok((
        err < 1e-6,
        format!("E[A] = {:.12}, |E[A] - pi/10| = {err:.2e}", r.value),
    ))
}

fn second_moment_bounds() -> Result<(bool, String)> {
    let full = integrate_second_moment_deterministic(200_000, Region::UNIT)?.value;
    let small = integrate_second_moment_deterministic(200_000, Region::new(0.1)?)?.value;
    let ea = FIRST_MOMENT;
    let ok = full <= ea * PI / 2.0 && full >= ea * ea && small < full && small >= 0.0;
    Ok((
        ok,
        format!(
            "(E A)^2 = {:.5} <= E[A^2] = {full:.5} <= E[A] pi/2 = {:.5}; |z|,|w|<0.1 part {small:.3e}",
            ea * ea,
            ea * PI / 2.0
        ),
    ))
}

fn importance_unbiased() -> Result<(bool, String)> {
    let u = integrate_second_moment_uniform(200_000, 41, Region::UNIT)?;
    let s = integrate_second_moment_mc(200_000, 42, Region::UNIT)?;
    // error estimates are 3·SE, so the combined 3·SE band is their quadrature sum
    let band = u.error_estimate.hypot(s.error_estimate);
    let diff = (u.value - s.value).abs();
    Ok((
        diff <= band,
        format!(
            "uniform {:.5}, stratified {:.5}, |diff| {diff:.2e} <= {band:.2e}",
            u.value, s.value
        ),
    ))
}

fn diagnostics() -> Result<(bool, String)> {
    let d = integrand_diagnostics(100_000, 43)?;
    let bounded = d.near_diagonal.iter().all(|r| r.1 <= 1.0);
    let ok = d.clean()
        && bounded
        && d.diagonal_growth_exponent.abs() < 0.05
        && (d.axis_exponent - 2.0).abs() < 0.05;
    Ok((
        ok,
        format!(
            "{} NaN, {} negative, {} above one, max {:.4}; diagonal exponent {:.3}, axis exponent {:.3}",
            d.n_nan, d.n_negative, d.n_above_one, d.max_value, d.diagonal_growth_exponent, d.axis_exponent
        ),
    ))
}

fn one_point_mc() -> Result<(bool, String)> {
    let cfg = SimConfig {
        seed: 51,
        ..Default::default()
    };
    let pts = [
        pt(0.0, 1.0),
        pt(1.0, 1.0),
        pt(-1.0, 1.0),
        pt(0.2, 0.05),
        pt(3.0, 0.5),
    ];
    let recs = run_one_point(&pts, 100_000, &cfg)?;
    let zs: Vec<f64> = recs.iter().map(|r| r.z_score).collect();
    Ok((
        recs.iter().all(|r| r.passes()),
        format!("z-scores {zs:.2?}"),
    ))
}

fn martingale_mc() -> Result<(bool, String)> {
    let cfg = SimConfig {
        seed: 52,
        ..Default::default()
    };
    let recs = run_martingale_test(pt(0.0, 1.0), pt(0.0, 2.0), &[0.01, 0.1, 1.0], 10_000, &cfg)?;
    let zs: Vec<f64> = recs.iter().map(|r| r.z_score).collect();
    let vars: Vec<f64> = recs.iter().map(|r| r.estimate.sample_variance()).collect();
    let ok = recs.iter().all(|r| r.passes()) && vars.windows(2).all(|v| v[1] >= v[0]);
    Ok((ok, format!("z-scores {zs:.2?}, variances {}", sci(&vars))))
}
