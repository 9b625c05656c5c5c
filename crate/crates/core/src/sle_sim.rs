//! Discretized chordal Loewner flow for tracked interior points.
//!
//! A tracked point is followed in the frame `z_t = g_t(z) − √κ B_t`, where
//! `dz_t = 2/z_t dt − √κ dB_t`. Over one step the driving function is held
//! constant, so the flow is the exact vertical-slit map
//! `z ↦ √(z² + 4 dt)` (root in the upper half-plane), and the driving
//! increment is applied as a shift.
//!
//! - [`SplitScheme::Endpoint`]: slit, then shift by the full increment.
//! - [`SplitScheme::Symmetric`]: shift by half an increment, slit, shift by
//!   the other half (weak order two).
//!
//! `ℑ z_t` decreases along the flow while `x_t` diffuses, so every point ends
//! up with `|x_t|/y_t → ∞`; a point is classified the first time
//! `|x_t|/y_t ≥ M`. From that state it would still reverse with probability
//! `½(1 − M/√(M² + 1)) ≈ 1/(4M²)`, i.e. `1e-4` for the default `M = 50`.
//!
//! Two drivers are available. [`DriverPath`] is a materialized fixed-step
//! path. [`classify_passage_adaptive`] draws increments on demand from a
//! per-run ChaCha stream with steps `dt_k = rel_step · min |z_k|²`; the rule
//! is scale invariant, so classifying `λz` reproduces the run for `z`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::point::HalfPlanePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitScheme {
    Endpoint,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub kappa: f64,
    /// Step of a fixed-grid [`DriverPath`].
    pub dt: f64,
    /// Adaptive step relative to `|z_t|²`.
    pub rel_step: f64,
    pub t_max: f64,
    /// Decision threshold `M` on `|x_t|/y_t`.
    pub ratio_threshold: f64,
    /// A point with `y_t < y_min` is flagged as blown up.
    pub y_min: f64,
    pub max_steps: u64,
    pub scheme: SplitScheme,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            kappa: 8.0 / 3.0,
            dt: 1e-4,
            rel_step: 1e-3,
            t_max: 1e4,
            ratio_threshold: 50.0,
            y_min: 1e-12,
            max_steps: 2_000_000,
            scheme: SplitScheme::Symmetric,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.kappa > 0.0
            && self.dt > 0.0
            && self.t_max > 0.0
            && self.rel_step > 0.0
            && self.rel_step <= 0.1
            && self.ratio_threshold >= 10.0
            && self.y_min > 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(domain(format!("invalid simulation config: {self:?}")))
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

/// RNG for one run: the config seed selects the key, the run index the stream.
pub fn run_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fixed-step driving increments, each `Normal(0, κ dt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverPath {
    pub dt: f64,
    pub increments: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl DriverPath {
    pub fn n_steps(&self) -> usize {
        self.increments.len()
    }

    /// Brownian rescaling: time by `λ²`, space by `λ`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            dt: self.dt * lambda * lambda,
            increments: self.increments.iter().map(|d| d * lambda).collect(),
            ..self.clone()
        }
    }
}

/// `ceil(t_max/dt)` increments from stream 0.
pub fn sample_driver(cfg: &SimConfig) -> Result<DriverPath> {
    sample_driver_stream(cfg, 0)
}

pub fn sample_driver_stream(cfg: &SimConfig, stream: u64) -> Result<DriverPath> {
    cfg.validate()?;
    let n = (cfg.t_max / cfg.dt).ceil() as usize;
    let sd = (cfg.kappa * cfg.dt).sqrt();
    let mut rng = run_rng(cfg.seed, stream);
    let increments = (0..n)
        .map(|_| sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect();
    Ok(DriverPath {
        dt: cfg.dt,
        increments,
        seed: cfg.seed,
        stream,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub blown_up: bool,
}

impl FlowState {
    pub fn start(p: HalfPlanePoint) -> Self {
        Self {
            x: p.x(),
            y: p.y(),
            t: 0.0,
            blown_up: false,
        }
    }

    fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn ratio(&self) -> f64 {
        self.x / self.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PassageOutcome {
    Left,
    Right,
    Undecided,
}

/// Square root of `c` lying in the closed upper half-plane.
fn sqrt_upper(c: Complex64) -> Complex64 {
    let m = c.norm();
    if m == 0.0 {
        return c;
    }
    let (re, im) = if c.re >= 0.0 {
        let re = (0.5 * (m + c.re)).sqrt();
        (re, c.im / (2.0 * re))
    } else {
        let im = (0.5 * (m - c.re)).sqrt().copysign(c.im);
        (c.im / (2.0 * im), im)
    };
    if im < 0.0 {
        Complex64::new(-re, -im)
    } else {
        Complex64::new(re, im)
    }
}

/// Exact vertical-slit flow for time `dt` with the driver held at 0.
fn slit(z: Complex64, dt: f64) -> Complex64 {
    // √(z² + 4dt) − z = 4dt / (z + √(z² + 4dt)), no cancellation for ℑz > 0
    let r = sqrt_upper(z * z + 4.0 * dt);
    z + 4.0 * dt / (z + r)
}

fn finish(z: Complex64, t: f64, y_min: f64) -> FlowState {
    let blown_up = !(z.im >= y_min) || !z.re.is_finite();
    FlowState {
        x: z.re,
        y: z.im,
        t,
        blown_up,
    }
}

/// One Endpoint step: slit for `dt`, then shift by the driving increment.
pub fn flow_step(s: FlowState, driver_increment: f64, dt: f64) -> FlowState {
    flow_step_with_floor(s, driver_increment, dt, SimConfig::default().y_min)
}

fn flow_step_with_floor(s: FlowState, increment: f64, dt: f64, y_min: f64) -> FlowState {
    if s.blown_up {
        return s;
    }
    finish(slit(s.z(), dt) - increment, s.t + dt, y_min)
}

/// One Symmetric step: shift by `pre`, slit for `dt`, shift by `post`.
pub fn flow_step_split(s: FlowState, pre: f64, post: f64, dt: f64, y_min: f64) -> FlowState {
    if s.blown_up {
        return s;
    }
    finish(slit(s.z() - pre, dt) - post, s.t + dt, y_min)
}

fn decide(s: &FlowState, threshold: f64) -> Option<PassageOutcome> {
    if s.blown_up {
        return Some(PassageOutcome::Undecided);
    }
    let r = s.ratio();
    if r >= threshold {
        Some(PassageOutcome::Left)
    } else if r <= -threshold {
        Some(PassageOutcome::Right)
    } else {
        None
    }
}

/// Classifies each point against one shared fixed-step driver (Endpoint scheme).
pub fn classify_passage(
    points: &[HalfPlanePoint],
    driver: &DriverPath,
    cfg: &SimConfig,
) -> Vec<PassageOutcome> {
    let mut states: Vec<FlowState> = points.iter().map(|&p| FlowState::start(p)).collect();
    let mut outcomes: Vec<Option<PassageOutcome>> = states
        .iter()
        .map(|s| decide(s, cfg.ratio_threshold))
        .collect();
    for &inc in &driver.increments {
        if outcomes.iter().all(Option::is_some) {
            break;
        }
        for (s, o) in states.iter_mut().zip(outcomes.iter_mut()) {
            if o.is_none() {
                *s = flow_step_with_floor(*s, inc, driver.dt, cfg.y_min);
                *o = decide(s, cfg.ratio_threshold);
            }
        }
    }
    outcomes
        .into_iter()
        .map(|o| o.unwrap_or(PassageOutcome::Undecided))
        .collect()
}

/// Result of an adaptive run.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRun {
    pub outcomes: Vec<PassageOutcome>,
    pub final_states: Vec<FlowState>,
    pub steps: u64,
}

/// Classifies each point against one shared on-demand Brownian driver drawn
/// from stream `stream` of `cfg.seed`.
pub fn classify_passage_adaptive(
    points: &[HalfPlanePoint],
    cfg: &SimConfig,
    stream: u64,
) -> AdaptiveRun {
    let mut rng = run_rng(cfg.seed, stream);
    let mut states: Vec<FlowState> = points.iter().map(|&p| FlowState::start(p)).collect();
    let mut outcomes: Vec<Option<PassageOutcome>> = states
        .iter()
        .map(|s| decide(s, cfg.ratio_threshold))
        .collect();
    let mut t = 0.0;
    let mut steps = 0u64;
    let sqrt_kappa = cfg.kappa.sqrt();
    while steps < cfg.max_steps && t < cfg.t_max {
        let scale = states
            .iter()
            .zip(&outcomes)
            .filter(|(_, o)| o.is_none())
            .map(|(s, _)| s.x * s.x + s.y * s.y)
            .fold(f64::INFINITY, f64::min);
        if !scale.is_finite() {
            break;
        }
        let dt = (cfg.rel_step * scale).min(cfg.t_max - t);
        let mut normal =
            || <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        let (pre, post) = match cfg.scheme {
            SplitScheme::Endpoint => (0.0, sqrt_kappa * dt.sqrt() * normal()),
            SplitScheme::Symmetric => {
                let sd = sqrt_kappa * (0.5 * dt).sqrt();
                (sd * normal(), sd * normal())
            }
        };
        for (s, o) in states.iter_mut().zip(outcomes.iter_mut()) {
            if o.is_none() {
                *s = flow_step_split(*s, pre, post, dt, cfg.y_min);
                *o = decide(s, cfg.ratio_threshold);
            }
        }
        t += dt;
        steps += 1;
    }
    AdaptiveRun {
        outcomes: outcomes
            .into_iter()
            .map(|o| o.unwrap_or(PassageOutcome::Undecided))
            .collect(),
        final_states: states,
        steps,
    }
}

const BRIDGE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const MAX_BRIDGE_PIECES: f64 = 4096.0;

/// Snapshots of one point's flow at the grid times nearest `sample_times`.
/// A driver step is split into Brownian-bridge pieces whenever it exceeds
/// `rel_step · min |z_t|²`; the pieces are drawn from a stream derived from
/// the driver's seed and stream, so the refined path stays reproducible.
pub fn flow_trajectory(
    point: HalfPlanePoint,
    driver: &DriverPath,
    cfg: &SimConfig,
    sample_times: &[f64],
) -> Result<Vec<FlowState>> {
    Ok(flow_trajectories(&[point], driver, cfg, sample_times)?.remove(0))
}

/// Joint version of [`flow_trajectory`]: all points share the driver.
pub fn flow_trajectories(
    points: &[HalfPlanePoint],
    driver: &DriverPath,
    cfg: &SimConfig,
    sample_times: &[f64],
) -> Result<Vec<Vec<FlowState>>> {
    if sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("sample_times must be nondecreasing"));
    }
    let horizon = driver.dt * driver.n_steps() as f64;
    if let Some(&t) = sample_times
        .iter()
        .find(|&&t| t < 0.0 || t > horizon * (1.0 + 1e-12))
    {
        return Err(domain(format!("sample time {t} outside [0, {horizon}]")));
    }
    let targets: Vec<usize> = sample_times
        .iter()
        .map(|t| ((t / driver.dt).round() as usize).min(driver.n_steps()))
        .collect();
    let mut out: Vec<Vec<FlowState>> = vec![Vec::with_capacity(targets.len()); points.len()];
    let mut states: Vec<FlowState> = points.iter().map(|&p| FlowState::start(p)).collect();
    let mut bridge = run_rng(driver.seed ^ BRIDGE_SALT, driver.stream);
    let sqrt_kappa = cfg.kappa.sqrt();
    let mut step = 0usize;
    for &target in &targets {
        while step < target {
            let scale = states
                .iter()
                .filter(|s| !s.blown_up)
                .map(|s| s.x * s.x + s.y * s.y)
                .fold(f64::INFINITY, f64::min);
            let pieces = if scale.is_finite() {
                (driver.dt / (cfg.rel_step * scale))
                    .ceil()
                    .clamp(1.0, MAX_BRIDGE_PIECES) as usize
            } else {
                1
            };
            let h = driver.dt / pieces as f64;
            let mut rest = driver.increments[step];
            for j in (1..=pieces).rev() {
                // Brownian bridge: the next piece given the remaining displacement
                let piece = if j == 1 {
                    rest
                } else {
                    let frac = 1.0 / j as f64;
                    let sd = sqrt_kappa * (h * (1.0 - frac)).sqrt();
                    rest * frac
                        + sd * <StandardNormal as Distribution<f64>>::sample(
                            &StandardNormal,
                            &mut bridge,
                        )
                };
                rest -= piece;
                for s in states.iter_mut() {
                    *s = flow_step_with_floor(*s, piece, h, cfg.y_min);
                }
            }
            step += 1;
        }
        for (o, s) in out.iter_mut().zip(&states) {
            // report grid time exactly
            o.push(FlowState {
                t: step as f64 * driver.dt,
                ..*s
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn slit_at_symmetry_point() {
        let s = flow_step(FlowState::start(pt(0.0, 1.0)), 0.0, 0.01);
        assert!(s.x.abs() < 1e-15);
        assert!((s.y - 0.96f64.sqrt()).abs() < 1e-15);
        assert!((s.t - 0.01).abs() < 1e-15);
    }

    #[test]
    fn capacity_additivity() {
        for &(x, y) in &[(0.0, 1.0), (0.7, 0.2), (-3.0, 0.05)] {
            let s = FlowState::start(pt(x, y));
            let one = flow_step(s, 0.0, 0.02);
            let two = flow_step(flow_step(s, 0.0, 0.01), 0.0, 0.01);
            assert!((one.x - two.x).abs() < 1e-12 && (one.y - two.y).abs() < 1e-12);
        }
    }

    #[test]
    fn slit_matches_direct_root() {
        let z = Complex64::new(0.3, 0.4);
        let direct = (z * z + 0.04).sqrt();
        let ours = slit(z, 0.01);
        assert!((direct - ours).norm() < 1e-15);
    }

    #[test]
    fn point_on_slit_blows_up() {
        // iy with y < 2√dt lies on the slit and maps to the real line
        let s = flow_step(FlowState::start(pt(0.0, 0.01)), 0.0, 0.01);
        assert!(s.blown_up);
    }

    #[test]
    fn same_seed_same_path() {
        let cfg = SimConfig {
            t_max: 1.0,
            seed: 42,
            ..Default::default()
        };
        assert_eq!(sample_driver(&cfg).unwrap(), sample_driver(&cfg).unwrap());
        let other = sample_driver(&cfg.with_seed(43)).unwrap();
        assert_ne!(sample_driver(&cfg).unwrap(), other);
        assert_eq!(sample_driver(&cfg).unwrap().n_steps(), 10_000);
    }

    #[test]
    fn far_left_point_goes_right() {
        let cfg = SimConfig {
            t_max: 0.01,
            ..Default::default()
        };
        let d = sample_driver(&cfg).unwrap();
        let out = classify_passage(&[pt(-1e6, 1.0), pt(1e6, 1.0)], &d, &cfg);
        assert_eq!(out, vec![PassageOutcome::Right, PassageOutcome::Left]);
    }

    #[test]
    fn short_horizon_is_undecided() {
        let cfg = SimConfig {
            t_max: 1e-3,
            ..Default::default()
        };
        let d = sample_driver(&cfg).unwrap();
        assert_eq!(
            classify_passage(&[pt(0.0, 1.0)], &d, &cfg),
            vec![PassageOutcome::Undecided]
        );
    }

    #[test]
    fn trajectory_starts_at_input_and_y_decreases() {
        let cfg = SimConfig {
            t_max: 1.0,
            seed: 7,
            ..Default::default()
        };
        let d = sample_driver(&cfg).unwrap();
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.01).collect();
        let traj = flow_trajectory(pt(0.2, 1.0), &d, &cfg, &times).unwrap();
        assert_eq!((traj[0].x, traj[0].y, traj[0].t), (0.2, 1.0, 0.0));
        assert!(traj.windows(2).all(|w| w[1].y < w[0].y));
        assert!(flow_trajectory(pt(0.2, 1.0), &d, &cfg, &[0.5, 0.1]).is_err());
        assert!(flow_trajectory(pt(0.2, 1.0), &d, &cfg, &[2.0]).is_err());
    }

    #[test]
    fn adaptive_run_is_deterministic_and_scale_invariant() {
        let cfg = SimConfig {
            seed: 5,
            ..Default::default()
        };
        let pts = [pt(-0.5, 1.0), pt(0.5, 1.0)];
        let a = classify_passage_adaptive(&pts, &cfg, 11);
        let b = classify_passage_adaptive(&pts, &cfg, 11);
        assert_eq!(a, b);
        // a power of two keeps the rescaled run bit-identical
        let lambda = 4.0;
        let scaled: Vec<_> = pts.iter().map(|p| p.scale(lambda).unwrap()).collect();
        let cfg_s = SimConfig {
            t_max: cfg.t_max * lambda * lambda,
            ..cfg.clone()
        };
        let c = classify_passage_adaptive(&scaled, &cfg_s, 11);
        assert_eq!(a.outcomes, c.outcomes);
        assert_eq!(a.steps, c.steps);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SimConfig {
            ratio_threshold: 5.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(sample_driver(&SimConfig {
            kappa: 0.0,
            ..Default::default()
        })
        .is_err());
    }
}
