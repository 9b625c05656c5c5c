//! Monte Carlo experiments comparing simulated passage frequencies with the
//! exact formulas.
//!
//! Run `i` of an experiment always uses driver stream `i` of the configured
//! seed, and tallies are integer counts, so any split of the run indices into
//! shards merges to exactly the pooled result, independent of thread count.
//!
//! Undecided runs are bracketed: the lower bracket counts them as misses, the
//! upper bracket as hits, and a formula value passes when it lies within
//! `3·SE` of the bracket.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{left_passage_one, left_passage_two, left_two_raw};
use crate::point::HalfPlanePoint;
use crate::sle_sim::{
    classify_passage_adaptive, flow_trajectories, sample_driver_stream, PassageOutcome, SimConfig,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Acceptance band in standard errors.
pub const Z_THRESHOLD: f64 = 3.0;
/// Number of comparisons above which reports carry a Bonferroni note.
pub const BONFERRONI_AFTER: usize = 10;

/// Hit/miss/undecided counts; the mergeable state behind an [`Estimate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub n: u64,
    pub hits: u64,
    pub undecided: u64,
}

impl Tally {
    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            n: self.n + other.n,
            hits: self.hits + other.hits,
            undecided: self.undecided + other.undecided,
        }
    }

    pub fn estimate(self) -> Estimate {
        Estimate::from_tally(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub n_undecided: u64,
    pub bracket_low: f64,
    pub bracket_high: f64,
}

impl Estimate {
    /// Mean over decided runs, SE `√(p̂(1−p̂)/n)`, bracket from the undecided count.
    pub fn from_tally(t: Tally) -> Self {
        let n = t.n.max(1) as f64;
        let decided = t.n - t.undecided;
        let mean = if decided > 0 {
            t.hits as f64 / decided as f64
        } else {
            0.5
        };
        let p = t.hits as f64 / n;
        Self {
            mean,
            std_error: (p * (1.0 - p) / n).sqrt(),
            n: t.n,
            n_undecided: t.undecided,
            bracket_low: t.hits as f64 / n,
            bracket_high: (t.hits + t.undecided) as f64 / n,
        }
    }

    /// Sample mean and standard error of a real-valued statistic.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let nf = n.max(1) as f64;
        // sequential sums keep the result independent of thread scheduling
        let mean = values.iter().sum::<f64>() / nf;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / nf).sqrt(),
            n: n as u64,
            n_undecided: 0,
            bracket_low: mean,
            bracket_high: mean,
        }
    }

    pub fn undecided_fraction(&self) -> f64 {
        self.n_undecided as f64 / self.n.max(1) as f64
    }

    /// Sample variance implied by the standard error.
    pub fn sample_variance(&self) -> f64 {
        self.std_error * self.std_error * self.n as f64
    }

    /// Distance of `target` from the bracket in standard errors (0 inside).
    /// The SE is floored at `1/n` so that all-hit or all-miss tallies still
    /// give a finite score.
    pub fn z_score(&self, target: f64) -> f64 {
        let se = self.std_error.max(1.0 / self.n.max(1) as f64);
        if target < self.bracket_low {
            (target - self.bracket_low) / se
        } else if target > self.bracket_high {
            (target - self.bracket_high) / se
        } else {
            0.0
        }
    }

    pub fn agrees_with(&self, target: f64) -> bool {
        self.z_score(target).abs() <= Z_THRESHOLD
    }
}

/// Joint outcome counts of a two-point experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub ll: u64,
    pub lr: u64,
    pub rl: u64,
    pub rr: u64,
    pub undecided: u64,
}

impl OutcomeCounts {
    fn record(mut self, a: PassageOutcome, b: PassageOutcome) -> Self {
        use PassageOutcome::*;
        match (a, b) {
            (Left, Left) => self.ll += 1,
            (Left, Right) => self.lr += 1,
            (Right, Left) => self.rl += 1,
            (Right, Right) => self.rr += 1,
            _ => self.undecided += 1,
        }
        self
    }

    fn merge(self, o: Self) -> Self {
        Self {
            ll: self.ll + o.ll,
            lr: self.lr + o.lr,
            rl: self.rl + o.rl,
            rr: self.rr + o.rr,
            undecided: self.undecided + o.undecided,
        }
    }

    pub fn total(&self) -> u64 {
        self.ll + self.lr + self.rl + self.rr + self.undecided
    }

    fn tally(&self, hits: u64) -> Tally {
        Tally {
            n: self.total(),
            hits,
            undecided: self.undecided,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub id: String,
    pub config: SimConfig,
    pub points: Vec<HalfPlanePoint>,
    /// Formula identifier, e.g. `left_passage_two`.
    pub formula: String,
    pub estimate: Estimate,
    pub formula_value: f64,
    pub z_score: f64,
    /// Same experiment rerun with half the step, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halved_step: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_counts: Option<OutcomeCounts>,
    /// Capacity time, for martingale records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    pub wall_clock_s: f64,
    pub code_version: String,
}

impl ExperimentRecord {
    fn new(
        id: String,
        config: &SimConfig,
        points: Vec<HalfPlanePoint>,
        formula: &str,
        estimate: Estimate,
        formula_value: f64,
        wall_clock_s: f64,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            id,
            config: config.clone(),
            points,
            formula: formula.to_string(),
            z_score: estimate.z_score(formula_value),
            estimate,
            formula_value,
            halved_step: None,
            outcome_counts: None,
            time: None,
            wall_clock_s,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn passes(&self) -> bool {
        self.z_score.abs() <= Z_THRESHOLD
    }
}

/// Tally of Left outcomes for `point` over runs `range`.
pub fn one_point_tally(
    point: HalfPlanePoint,
    runs: std::ops::Range<u64>,
    cfg: &SimConfig,
) -> Tally {
    runs.into_par_iter()
        .map(|i| {
            let o = classify_passage_adaptive(&[point], cfg, i).outcomes[0];
            Tally {
                n: 1,
                hits: (o == PassageOutcome::Left) as u64,
                undecided: (o == PassageOutcome::Undecided) as u64,
            }
        })
        .reduce(Tally::default, Tally::merge)
}

/// Joint outcome counts for `(z, w)` under common drivers over runs `range`.
pub fn two_point_counts(
    z: HalfPlanePoint,
    w: HalfPlanePoint,
    runs: std::ops::Range<u64>,
    cfg: &SimConfig,
) -> OutcomeCounts {
    runs.into_par_iter()
        .map(|i| {
            let o = classify_passage_adaptive(&[z, w], cfg, i).outcomes;
            OutcomeCounts::default().record(o[0], o[1])
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::merge)
}

fn check_n(n: u64, min: u64, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!(
            "{what} requires at least {min} samples, got {n}"
        )));
    }
    Ok(())
}

/// Left frequency at each point versus `½(1 + x/|z|)`.
pub fn run_one_point(
    points: &[HalfPlanePoint],
    n_samples: u64,
    cfg: &SimConfig,
) -> Result<Vec<ExperimentRecord>> {
    check_n(n_samples, 1_000, "run_one_point")?;
    cfg.validate()?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let start = Instant::now();
            let est = one_point_tally(p, 0..n_samples, cfg).estimate();
            ExperimentRecord::new(
                format!("one-point/{k}"),
                cfg,
                vec![p],
                "left_passage_one",
                est,
                left_passage_one(p).value(),
                start.elapsed().as_secs_f64(),
            )
        })
        .collect())
}

/// Joint outcomes for each pair under common drivers. Each pair yields four
/// records: `LL` against `L(z, w)`, `LR` against `L(z) − L(z, w)`, `RL`
/// against `L(w) − L(z, w)` and `RR` against `1 − L(z) − L(w) + L(z, w)`.
pub fn run_two_point(
    pairs: &[(HalfPlanePoint, HalfPlanePoint)],
    n_samples: u64,
    cfg: &SimConfig,
) -> Result<Vec<ExperimentRecord>> {
    check_n(n_samples, 10_000, "run_two_point")?;
    cfg.validate()?;
    let mut out = Vec::new();
    for (k, &(z, w)) in pairs.iter().enumerate() {
        let start = Instant::now();
        let counts = two_point_counts(z, w, 0..n_samples, cfg);
        let elapsed = start.elapsed().as_secs_f64();
        let lz = left_passage_one(z).value();
        let lw = left_passage_one(w).value();
        let lzw = left_passage_two(z, w).value();
        let targets = [
            ("LL", "left_passage_two", counts.ll, lzw),
            ("LR", "left_one_minus_two", counts.lr, lz - lzw),
            ("RL", "left_one_minus_two_swapped", counts.rl, lw - lzw),
            ("RR", "right_passage_two", counts.rr, 1.0 - lz - lw + lzw),
        ];
        for (tag, formula, hits, value) in targets {
            let mut rec = ExperimentRecord::new(
                format!("two-point/{k}/{tag}"),
                cfg,
                vec![z, w],
                formula,
                counts.tally(hits).estimate(),
                value,
                elapsed,
            );
            rec.outcome_counts = Some(counts);
            out.push(rec);
        }
    }
    Ok(out)
}

/// Per-run values of `L̃(x_t, y_t, u_t, v_t)` at each time, one row per time.
pub fn martingale_samples(
    z: HalfPlanePoint,
    w: HalfPlanePoint,
    times: &[f64],
    runs: std::ops::Range<u64>,
    cfg: &SimConfig,
) -> Result<Vec<Vec<f64>>> {
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let drive_cfg = SimConfig {
        t_max: horizon.max(cfg.dt),
        ..cfg.clone()
    };
    drive_cfg.validate()?;
    let per_run: Vec<Vec<f64>> = runs
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let driver = sample_driver_stream(&drive_cfg, i)?;
            let traj = flow_trajectories(&[z, w], &driver, &drive_cfg, times)?;
            Ok(traj[0]
                .iter()
                .zip(&traj[1])
                .map(|(a, b)| left_two_raw(a.x, a.y, b.x, b.y))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..times.len())
        .map(|k| per_run.iter().map(|r| r[k]).collect())
        .collect())
}

/// Mean of `L̃_t` over fixed-grid drivers versus `L̃_0`, per time.
pub fn run_martingale_test(
    z: HalfPlanePoint,
    w: HalfPlanePoint,
    times: &[f64],
    n_samples: u64,
    cfg: &SimConfig,
) -> Result<Vec<ExperimentRecord>> {
    check_n(n_samples, 2, "run_martingale_test")?;
    if times.iter().any(|&t| t < 0.0 || t > cfg.t_max) {
        return Err(Error::Domain(
            "martingale times must lie in [0, t_max]".into(),
        ));
    }
    let start = Instant::now();
    let rows = martingale_samples(z, w, times, 0..n_samples, cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    let target = left_two_raw(z.x(), z.y(), w.x(), w.y());
    Ok(rows
        .iter()
        .zip(times)
        .enumerate()
        .map(|(k, (vals, &t))| {
            let mut rec = ExperimentRecord::new(
                format!("martingale/{k}"),
                cfg,
                vec![z, w],
                "left_passage_two_martingale",
                Estimate::from_samples(vals),
                target,
                elapsed,
            );
            rec.time = Some(t);
            rec
        })
        .collect())
}

/// Reruns one- and two-point records with half the adaptive step and
/// attaches the result as `halved_step`.
pub fn attach_dt_halving(records: &mut [ExperimentRecord]) {
    for rec in records.iter_mut() {
        let cfg = SimConfig {
            rel_step: 0.5 * rec.config.rel_step,
            ..rec.config.clone()
        };
        let n = rec.estimate.n;
        let est = match rec.points.as_slice() {
            [p] if rec.time.is_none() => Some(one_point_tally(*p, 0..n, &cfg).estimate()),
            [z, w] if rec.time.is_none() => {
                let c = two_point_counts(*z, *w, 0..n, &cfg);
                let hits = match rec.id.rsplit('/').next() {
                    Some("LL") => c.ll,
                    Some("LR") => c.lr,
                    Some("RL") => c.rl,
                    _ => c.rr,
                };
                Some(c.tally(hits).estimate())
            }
            _ => None,
        };
        rec.halved_step = est;
    }
}

/// Writes one JSON record per line.
pub fn persist(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Schema(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| Error::Schema(format!("line {}: {e}", lineno + 1)))?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            other => {
                return Err(Error::Schema(format!(
                    "line {}: expected schema_version {SCHEMA_VERSION}, found {other:?}",
                    lineno + 1
                )))
            }
        }
        out.push(
            serde_json::from_value(value)
                .map_err(|e| Error::Schema(format!("line {}: {e}", lineno + 1)))?,
        );
    }
    Ok(out)
}

/// Columns of the CSV summary table.
pub const SUMMARY_HEADER: [&str; 11] = [
    "id",
    "points",
    "formula",
    "formula_value",
    "estimate",
    "se",
    "z",
    "undecided_frac",
    "dt",
    "n",
    "estimate_half_dt",
];

/// One CSV row per record, matching [`SUMMARY_HEADER`].
pub fn summary_rows(records: &[ExperimentRecord]) -> Vec<[String; 11]> {
    records
        .iter()
        .map(|r| {
            let points: Vec<String> = r.points.iter().map(|p| p.to_string()).collect();
            let dt = if r.time.is_some() {
                r.config.dt
            } else {
                r.config.rel_step
            };
            [
                r.id.clone(),
                points.join(";"),
                r.formula.clone(),
                format!("{:.15}", r.formula_value),
                format!("{:.15}", r.estimate.mean),
                format!("{:.3e}", r.estimate.std_error),
                format!("{:.3}", r.z_score),
                format!("{:.3e}", r.estimate.undecided_fraction()),
                format!("{dt:e}"),
                r.estimate.n.to_string(),
                r.halved_step
                    .map(|e| format!("{:.15}", e.mean))
                    .unwrap_or_default(),
            ]
        })
        .collect()
}

/// Text report with a Bonferroni note when more than ten comparisons ran.
pub fn report(records: &[ExperimentRecord]) -> String {
    let mut s = String::new();
    for r in records {
        let t = r.time.map(|t| format!(" t={t}")).unwrap_or_default();
        s.push_str(&format!(
            "{:<22} {:<28}{} est={:.6} [{:.6}, {:.6}] se={:.2e} formula={:.6} z={:+.2} {}\n",
            r.id,
            r.formula,
            t,
            r.estimate.mean,
            r.estimate.bracket_low,
            r.estimate.bracket_high,
            r.estimate.std_error,
            r.formula_value,
            r.z_score,
            if r.passes() { "PASS" } else { "FAIL" }
        ));
    }
    if records.len() > BONFERRONI_AFTER {
        let alpha = 0.0027 * records.len() as f64;
        s.push_str(&format!(
            "note: {} comparisons at 3 SE each; expected false-failure rate up to {:.1}% (Bonferroni)\n",
            records.len(),
            100.0 * alpha.min(1.0)
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn estimate_bracket_invariants() {
        let e = Tally {
            n: 1000,
            hits: 400,
            undecided: 50,
        }
        .estimate();
        assert!(e.bracket_low <= e.mean && e.mean <= e.bracket_high);
        assert!((e.bracket_high - e.bracket_low - 0.05).abs() < 1e-15);
        assert_eq!(e.z_score(0.43), 0.0);
        assert!(e.z_score(0.2) < -3.0);
        let all = Tally {
            n: 1000,
            hits: 1000,
            undecided: 0,
        }
        .estimate();
        assert!(all.z_score(0.999).is_finite());
    }

    #[test]
    fn shard_merge_is_exact() {
        let cfg = SimConfig {
            seed: 9,
            ..Default::default()
        };
        let p = pt(0.3, 0.8);
        let pooled = one_point_tally(p, 0..600, &cfg);
        let shards = one_point_tally(p, 0..100, &cfg)
            .merge(one_point_tally(p, 100..350, &cfg))
            .merge(one_point_tally(p, 350..600, &cfg));
        assert_eq!(pooled, shards);
        assert_eq!(pooled.estimate(), shards.estimate());
    }

    #[test]
    fn coincident_pair_joint_equals_marginal() {
        let cfg = SimConfig {
            seed: 3,
            ..Default::default()
        };
        let z = pt(0.4, 1.0);
        let c = two_point_counts(z, z, 0..2000, &cfg);
        assert_eq!(c.lr + c.rl, 0);
        assert_eq!(c.ll, one_point_tally(z, 0..2000, &cfg).hits);
        assert_eq!(c.total(), 2000);
    }

    #[test]
    fn martingale_at_time_zero_is_exact() {
        let cfg = SimConfig {
            seed: 1,
            ..Default::default()
        };
        let recs = run_martingale_test(pt(0.0, 1.0), pt(0.0, 2.0), &[0.0], 50, &cfg).unwrap();
        assert_eq!(recs[0].estimate.mean, recs[0].formula_value);
        assert_eq!(recs[0].estimate.std_error, 0.0);
    }

    #[test]
    fn sample_floor_enforced() {
        let cfg = SimConfig::default();
        assert!(run_one_point(&[pt(0.0, 1.0)], 10, &cfg).is_err());
        assert!(run_two_point(&[(pt(0.0, 1.0), pt(0.0, 2.0))], 1_000, &cfg).is_err());
    }
}
