//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;
use sle_passage::mc_harness::{
    attach_dt_halving, persist, report, run_martingale_test, run_one_point, run_two_point,
    summary_rows, ExperimentRecord, SUMMARY_HEADER,
};
use sle_passage::quadrature::{
    compare, grid_slice, integrate_first_moment, integrate_second_moment_deterministic,
    integrate_second_moment_mc, IntegralResult, Region, AIRY_RATIO, AIRY_SECOND_MOMENT,
    FIRST_MOMENT,
};
use sle_passage::verify::{format_matrix, run_suite, Tier};
use sle_passage::Error;

use crate::manifest::{resolve_out_dir, RunDir, RunManifest};
use crate::registry::{format_value, lookup, sig15, Params, REGISTRY};
use crate::{Cli, Command, EvalArgs, McCommand, Moment, SimArgs, EXIT_STAT_FAILURE, EXIT_USAGE};

/// A usage mistake the argument parser cannot catch.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Domain(_) | Error::Parse(_)) => EXIT_USAGE,
        Some(Error::NonConvergence(_)) => EXIT_STAT_FAILURE,
        _ => 1,
    }
}

pub fn run(cli: Cli, argv: Vec<String>) -> Result<u8> {
    if let Some(n) = cli.threads {
        // a second call (from `rerun`) finds the pool already built
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let out_dir = resolve_out_dir(cli.out_dir.clone());
    match cli.command {
        Command::Eval(args) => eval(&args),
        Command::List => {
            for f in REGISTRY {
                println!("{:<26} {:<22} {}", f.name, f.params.join(","), f.summary);
            }
            Ok(0)
        }
        Command::Mc { experiment } => mc(experiment, argv, out_dir),
        Command::Integrate { moment } => integrate(moment, argv, out_dir),
        Command::Verify(v) => {
            let tier = if v.quick {
                Tier::Quick
            } else if v.long {
                Tier::Long
            } else {
                Tier::Standard
            };
            let results = run_suite(tier);
            print!("{}", format_matrix(&results));
            Ok(if results.iter().all(|r| r.passed) {
                0
            } else {
                EXIT_STAT_FAILURE
            })
        }
        Command::Rerun { manifest } => {
            let m = RunManifest::load(&manifest)?;
            let mut replay = Cli::try_parse_from(&m.argv)
                .map_err(|e| UsageError(format!("manifest argv does not parse: {e}")))?;
            if cli.out_dir.is_some() {
                replay.out_dir = cli.out_dir;
            }
            if matches!(replay.command, Command::Rerun { .. }) {
                return Err(UsageError("a manifest cannot record a rerun".into()).into());
            }
            run(replay, m.argv)
        }
    }
}

fn params(a: &EvalArgs) -> Params {
    Params {
        z: a.z,
        w: a.w,
        sigma: a.sigma,
        radius: a.radius,
        eps: a.eps,
        delta: a.delta,
        r: a.r,
        x: a.x,
        a: a.a,
        b: a.b,
        c: a.c,
        t: a.t,
        h: a.h,
        tol: a.tol,
    }
}

/// `lo:hi:n` as `n` evenly spaced values including both ends.
fn axis(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || UsageError(format!("grid axis must be min:max:n, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad().into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad().into());
    }
    Ok((0..n)
        .map(|k| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect())
}

pub fn parse_grid(spec: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let (re, im) = spec.split_once(',').ok_or_else(|| {
        UsageError(format!(
            "grid must be re_min:re_max:n,im_min:im_max:n, got {spec:?}"
        ))
    })?;
    Ok((axis(re)?, axis(im)?))
}

fn eval(args: &EvalArgs) -> Result<u8> {
    let formula = lookup(&args.formula).ok_or_else(|| {
        UsageError(format!(
            "unknown formula {:?}; run `sle-passage list` for the registry",
            args.formula
        ))
    })?;
    let mut p = params(args);
    let Some(grid) = &args.grid else {
        let v = (formula.eval)(&p).with_context(|| format!("evaluating {}", formula.name))?;
        println!("{}", format_value(&v));
        return Ok(0);
    };
    let (re, im) = parse_grid(grid)?;
    let stdout = std::io::stdout();
    let mut w = csv::Writer::from_writer(stdout.lock());
    w.write_record(["re", "im", "value", "error"])?;
    for &y in &im {
        for &x in &re {
            p.z = Some(num_complex::Complex64::new(x, y));
            let (value, err) = match (formula.eval)(&p) {
                Ok(v) => (format_value(&v), String::new()),
                Err(e) => (String::new(), e.to_string()),
            };
            w.write_record([sig15(x), sig15(y), value, err])?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn write_records(dir: &mut RunDir, records: &[ExperimentRecord]) -> Result<()> {
    persist(records, &dir.output("records.jsonl"))?;
    let mut w = dir.csv("summary.csv")?;
    w.write_record(SUMMARY_HEADER)?;
    for row in summary_rows(records) {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn mc(experiment: McCommand, argv: Vec<String>, out_dir: PathBuf) -> Result<u8> {
    let (name, sim, params): (&str, &SimArgs, serde_json::Value) = match &experiment {
        McCommand::OnePoint { z, n, sim } => ("mc-one-point", sim, json!({ "z": z, "n": n })),
        McCommand::TwoPoint { z, w, n, sim } => {
            ("mc-two-point", sim, json!({ "z": z, "w": w, "n": n }))
        }
        McCommand::Martingale {
            z,
            w,
            times,
            n,
            sim,
        } => (
            "mc-martingale",
            sim,
            json!({ "z": z, "w": w, "times": times, "n": n }),
        ),
    };
    let cfg = sim.config();
    cfg.validate()?;
    let halve = sim.halve_dt;
    let parameters = json!({ "experiment": params, "config": cfg, "halve_dt": halve });
    let mut records = match &experiment {
        McCommand::OnePoint { z, n, .. } => run_one_point(z, *n, &cfg)?,
        McCommand::TwoPoint { z, w, n, .. } => {
            if z.len() != w.len() {
                return Err(UsageError(format!(
                    "two-point needs as many --w as --z (got {} and {})",
                    z.len(),
                    w.len()
                ))
                .into());
            }
            let pairs: Vec<_> = z.iter().copied().zip(w.iter().copied()).collect();
            run_two_point(&pairs, *n, &cfg)?
        }
        McCommand::Martingale { z, w, times, n, .. } => {
            run_martingale_test(*z, *w, times, *n, &cfg)?
        }
    };
    if halve {
        attach_dt_halving(&mut records);
    }
    let mut dir = RunDir::create(
        &out_dir,
        RunManifest::new(name, argv, parameters, vec![cfg.seed]),
    )?;
    write_records(&mut dir, &records)?;
    let manifest = dir.write_manifest()?;
    print!("{}", report(&records));
    println!(
        "outputs: {}",
        manifest.parent().unwrap_or(&out_dir).display()
    );
    Ok(if records.iter().all(|r| r.passes()) {
        0
    } else {
        EXIT_STAT_FAILURE
    })
}

fn write_integrals(dir: &mut RunDir, results: &[&IntegralResult]) -> Result<()> {
    let mut w = dir.csv("integrals.csv")?;
    w.write_record(["method", "value", "error", "n", "budget", "seed"])?;
    for r in results {
        w.write_record([
            r.method.as_str().to_string(),
            sig15(r.value),
            sig15(r.error_estimate),
            r.n_evaluations.to_string(),
            r.budget.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn integrate(moment: Moment, argv: Vec<String>, out_dir: PathBuf) -> Result<u8> {
    match moment {
        Moment::First { tol } => {
            let manifest = RunManifest::new("integrate-first", argv, json!({ "tol": tol }), vec![]);
            let mut dir = RunDir::create(&out_dir, manifest)?;
            let result = integrate_first_moment(tol);
            let r = match result {
                Ok(r) => r,
                Err(e) => {
                    dir.write_manifest()?;
                    return Err(e.into());
                }
            };
            write_integrals(&mut dir, &[&r])?;
            fs::write(dir.output("result.json"), serde_json::to_string_pretty(&r)?)?;
            dir.write_manifest()?;
            println!("E[A] = {} +- {}", sig15(r.value), sig15(r.error_estimate));
            println!(
                "pi/10 = {}, difference {:.3e}",
                sig15(FIRST_MOMENT),
                r.value - FIRST_MOMENT
            );
            println!("outputs: {}", dir.path.display());
            Ok(0)
        }
        Moment::Second {
            budget,
            seed,
            radius,
            slice_w,
            slice_n,
        } => {
            let region = Region::new(radius)?;
            let parameters = json!({ "budget": budget, "seed": seed, "radius": radius,
                                     "slice_w": slice_w, "slice_n": slice_n });
            let manifest = RunManifest::new("integrate-second", argv, parameters, vec![seed]);
            let mut dir = RunDir::create(&out_dir, manifest)?;
            let det = integrate_second_moment_deterministic(budget, region);
            let det = match det {
                Ok(d) => d,
                Err(e) => {
                    dir.write_manifest()?;
                    return Err(e.into());
                }
            };
            let mc = match integrate_second_moment_mc(budget, seed, region) {
                Ok(m) => m,
                Err(e) => {
                    write_integrals(&mut dir, &[&det])?;
                    dir.write_manifest()?;
                    return Err(e.into());
                }
            };
            let rep = compare(det, mc);
            write_integrals(&mut dir, &[&rep.deterministic, &rep.stratified])?;
            fs::write(
                dir.output("result.json"),
                serde_json::to_string_pretty(&rep)?,
            )?;
            if let Some(w) = slice_w {
                let rows = grid_slice((w.x(), w.y()), slice_n)?;
                let mut out = dir.csv("slice.csv")?;
                out.write_record(["x", "y", "f"])?;
                for (x, y, f) in rows {
                    out.write_record([sig15(x), sig15(y), sig15(f)])?;
                }
                out.flush()?;
            }
            dir.write_manifest()?;
            let mut o = std::io::stdout().lock();
            for r in [&rep.deterministic, &rep.stratified] {
                writeln!(
                    o,
                    "{:<14} {} +- {}  ({} evaluations, {:.1}s)",
                    r.method.as_str(),
                    sig15(r.value),
                    sig15(r.error_estimate),
                    r.n_evaluations,
                    r.wall_clock_s
                )?;
            }
            writeln!(
                o,
                "relative discrepancy {:.3e}{}",
                rep.relative_discrepancy,
                if rep.flagged {
                    "  (FLAG: beyond combined error estimates)"
                } else {
                    ""
                }
            )?;
            writeln!(o, "E[A^2] = {} over {region}", sig15(rep.value))?;
            if region == Region::UNIT {
                writeln!(
                    o,
                    "pi/30 = {}, relative difference {:+.3}%",
                    sig15(AIRY_SECOND_MOMENT),
                    100.0 * (rep.value / AIRY_SECOND_MOMENT - 1.0)
                )?;
                writeln!(
                    o,
                    "E[A^2]/(pi/10)^2 = {} vs 10/(3 pi) = {}",
                    sig15(rep.ratio_to_first_squared),
                    sig15(AIRY_RATIO)
                )?;
            }
            writeln!(o, "outputs: {}", dir.path.display())?;
            Ok(if rep.flagged { EXIT_STAT_FAILURE } else { 0 })
        }
    }
}
