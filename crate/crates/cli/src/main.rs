//! `sle-passage`: evaluate the exact SLE(8/3) formulas, run the Monte Carlo
//! checks and the area-moment integrals, and the invariant suite.
//!
//! Exit codes: 0 when every check passes, 2 on a statistical or numerical
//! failure, 3 on a domain or usage error.

mod commands;
mod manifest;
mod registry;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use sle_passage::sle_sim::{SimConfig, SplitScheme};
use sle_passage::{parse_complex, HalfPlanePoint};

use crate::manifest::OUT_DIR_ENV;

pub const EXIT_STAT_FAILURE: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sle-passage",
    version,
    about = "SLE(8/3) passage probabilities: formulas, Monte Carlo, quadrature"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Base directory for run outputs.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula at a point, or over a grid of z values.
    Eval(EvalArgs),
    /// List the formulas known to `eval`.
    List,
    /// Monte Carlo experiments against the exact formulas.
    Mc {
        #[command(subcommand)]
        experiment: McCommand,
    },
    /// First or second area moment of the radius-1 bubble.
    Integrate {
        #[command(subcommand)]
        moment: Moment,
    },
    /// Run the invariant suite and print a pass/fail matrix.
    Verify(VerifyArgs),
    /// Re-run the command recorded in a manifest.
    Rerun { manifest: PathBuf },
}

fn parse_z(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Formula name (see `sle-passage list`).
    pub formula: String,
    #[arg(long, value_parser = parse_z, allow_hyphen_values = true)]
    pub z: Option<Complex64>,
    #[arg(long, value_parser = parse_z, allow_hyphen_values = true)]
    pub w: Option<Complex64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Disk radius R.
    #[arg(long = "R", alias = "radius")]
    pub radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Radius argument of radius_cdf.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Sweep z over `re_min:re_max:n,im_min:im_max:n` and print CSV.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Adaptive step relative to |z_t|^2.
    #[arg(long, default_value_t = 1e-3)]
    pub rel_step: f64,
    /// Fixed step of the martingale driver.
    #[arg(long, default_value_t = 1e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e4)]
    pub t_max: f64,
    /// Decision threshold M on |x_t|/y_t.
    #[arg(long, default_value_t = 50.0)]
    pub threshold: f64,
    #[arg(long, default_value_t = 2_000_000)]
    pub max_steps: u64,
    #[arg(long, value_enum, default_value_t = Scheme::Symmetric)]
    pub scheme: Scheme,
    /// Also rerun with half the step and report it in the summary.
    #[arg(long)]
    pub halve_dt: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Scheme {
    Endpoint,
    Symmetric,
}

impl SimArgs {
    pub fn config(&self) -> SimConfig {
        SimConfig {
            dt: self.dt,
            rel_step: self.rel_step,
            t_max: self.t_max,
            ratio_threshold: self.threshold,
            max_steps: self.max_steps,
            scheme: match self.scheme {
                Scheme::Endpoint => SplitScheme::Endpoint,
                Scheme::Symmetric => SplitScheme::Symmetric,
            },
            seed: self.seed,
            ..SimConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum McCommand {
    /// Left frequency at each --z (repeat the flag or separate with commas).
    OnePoint {
        #[arg(
            long,
            required = true,
            value_delimiter = ',',
            allow_hyphen_values = true
        )]
        z: Vec<HalfPlanePoint>,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Joint outcomes for pairs (--z[k], --w[k]) against the two-point formula.
    TwoPoint {
        #[arg(
            long,
            required = true,
            value_delimiter = ',',
            allow_hyphen_values = true
        )]
        z: Vec<HalfPlanePoint>,
        #[arg(
            long,
            required = true,
            value_delimiter = ',',
            allow_hyphen_values = true
        )]
        w: Vec<HalfPlanePoint>,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Mean of the two-point martingale at the given times.
    Martingale {
        #[arg(long, allow_hyphen_values = true)]
        z: HalfPlanePoint,
        #[arg(long, allow_hyphen_values = true)]
        w: HalfPlanePoint,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[command(flatten)]
        sim: SimArgs,
    },
}

fn parse_count(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v < 1.0 || v.fract() != 0.0 || v > 1e15 {
        return Err(format!("expected a positive integer count, got {s}"));
    }
    Ok(v as u64)
}

#[derive(Subcommand, Debug)]
pub enum Moment {
    /// E[A] over the unit half-disk.
    First {
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// E[A^2] by the deterministic rule and stratified Monte Carlo.
    Second {
        /// Evaluation budget per method (accepts 1e7).
        #[arg(long, default_value = "1e7", value_parser = parse_count)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict both points to |z|, |w| < radius.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Also dump f(z, w) over a grid of z for this fixed w.
        #[arg(long, allow_hyphen_values = true)]
        slice_w: Option<HalfPlanePoint>,
        #[arg(long, default_value_t = 64)]
        slice_n: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Only the sub-second checks.
    #[arg(long, conflicts_with = "long")]
    pub quick: bool,
    /// Include the Monte Carlo experiments.
    #[arg(long)]
    pub long: bool,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli, argv) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code_for(&e))
        }
    }
}
