//! Stochastic centre-of-mass trajectories along the cavity axis.
//!
//! Each trajectory follows the Euler–Maruyama scheme
//!
//! ```text
//! x ← x + (p/m) dt
//! p ← p + [f_p(x) + β(x) p/m] dt + √(D(x) dt) ξ,   ξ ~ N(0, 1)
//! ```
//!
//! with `D = d_dip + d_rec`. Trajectory `i` draws from the ChaCha8 stream
//! `i` of the run seed, so results are bit-identical however the ensemble is
//! scheduled.

use crate::csv::{Cell, Table};
use crate::linres::local_coefficients;
use crate::modes::ModeSet;
use crate::par::{try_map_indexed, Exec};
use crate::params::{SimulateSettings, SystemParams};
use crate::thermo::average_coefficients;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

/// Largest admissible `dt·|β|/m`.
pub const STABILITY_LIMIT: f64 = 0.01;
/// Runs colder than this multiple of the recoil temperature are flagged.
pub const RECOIL_FLOOR_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientSource {
    /// Constant friction and diffusion, no mean force.
    Frozen { beta: f64, diffusion: f64 },
    /// Closed-form coefficients evaluated at the atom's position.
    PositionResolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    /// Standard deviation of the initial momentum, in `ħk`.
    pub p0_spread: f64,
    pub source: CoefficientSource,
    /// Whether the conservative force `f_p` acts (position-resolved only).
    pub include_force: bool,
    /// Ensemble statistics are recorded every this many steps.
    pub sample_every: usize,
}

impl TrajectoryConfig {
    /// Builds a configuration from the `simulate.*` settings. Frozen runs
    /// use the wavelength-averaged coefficients around `z = 0`.
    pub fn from_settings(s: &SimulateSettings, p: &SystemParams, modes: &ModeSet) -> Result<Self> {
        let source = if s.position_resolved {
            CoefficientSource::PositionResolved
        } else {
            let avg = average_coefficients(p, modes, 0.0)?;
            CoefficientSource::Frozen {
                beta: avg.beta,
                diffusion: avg.d_dip + avg.d_rec,
            }
        };
        Ok(Self {
            dt: s.dt,
            n_steps: s.n_steps,
            n_trajectories: s.n_trajectories,
            seed: s.seed,
            p0_spread: s.p0_spread,
            source,
            include_force: s.include_force,
            sample_every: s.sample_every,
        })
    }

    fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad.push("dt must be positive".to_string());
        }
        if self.n_steps == 0 {
            bad.push("n_steps must be positive".to_string());
        }
        if self.n_trajectories < 2 {
            bad.push("n_trajectories must be at least 2".to_string());
        }
        if self.sample_every == 0 {
            bad.push("sample_every must be positive".to_string());
        }
        if !(self.p0_spread >= 0.0 && self.p0_spread.is_finite()) {
            bad.push("p0_spread must be non-negative".to_string());
        }
        if let CoefficientSource::Frozen { beta, diffusion } = self.source {
            if !beta.is_finite() || !(diffusion >= 0.0 && diffusion.is_finite()) {
                bad.push(
                    "frozen coefficients must be finite with non-negative diffusion".to_string(),
                );
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad))
        }
    }

    fn sample_steps(&self) -> Vec<usize> {
        let mut steps: Vec<usize> = (0..=self.n_steps).step_by(self.sample_every).collect();
        if *steps.last().unwrap() != self.n_steps {
            steps.push(self.n_steps);
        }
        steps
    }
}

/// Ensemble statistics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub times: Vec<f64>,
    pub p2_mean: Vec<f64>,
    /// Standard error of `p2_mean` across trajectories.
    pub p2_stderr: Vec<f64>,
    pub mass: f64,
    /// `⟨p²⟩/m` over the second half of the run, in `ħγ`.
    pub temperature: f64,
    /// Batch-means standard error of `temperature`, one batch per trajectory.
    pub temperature_stderr: f64,
    /// Set when `temperature < 10 T_rec`.
    pub below_recoil_floor: bool,
}

impl TrajectoryStats {
    /// `t, p2_mean, p2_stderr` time series.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["t", "p2_mean", "p2_stderr"]);
        for i in 0..self.times.len() {
            t.push(vec![
                Cell::from(self.times[i]),
                Cell::from(self.p2_mean[i]),
                Cell::from(self.p2_stderr[i]),
            ]);
        }
        t
    }
}

/// `max |β|` over one wavelength near the origin, used for the step guard.
fn max_friction(p: &SystemParams, modes: &ModeSet, source: CoefficientSource) -> Result<f64> {
    match source {
        CoefficientSource::Frozen { beta, .. } => Ok(beta.abs()),
        CoefficientSource::PositionResolved => {
            let mut max = 0.0f64;
            for i in 0..512 {
                let z = TAU * i as f64 / 512.0;
                max = max.max(local_coefficients(p, &modes.coupling_sums(z))?.beta.abs());
            }
            Ok(max)
        }
    }
}

struct Trajectory {
    p2: Vec<f64>,
    tail_mean: f64,
}

fn run_trajectory(
    index: usize,
    config: &TrajectoryConfig,
    p: &SystemParams,
    modes: &ModeSet,
    samples: &[usize],
    tail_from: usize,
) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let mass = p.mass();
    let dt = config.dt;
    let mut x = TAU * rng.random::<f64>();
    let mut mom = config.p0_spread * rng.sample::<f64, _>(StandardNormal);

    let mut p2 = Vec::with_capacity(samples.len());
    let mut next = 0;
    let mut step = 0;
    loop {
        if samples[next] == step {
            p2.push(mom * mom);
            next += 1;
            if next == samples.len() {
                break;
            }
        }
        let (force, beta, diffusion) = match config.source {
            CoefficientSource::Frozen { beta, diffusion } => (0.0, beta, diffusion),
            CoefficientSource::PositionResolved => {
                let c = local_coefficients(p, &modes.coupling_sums(x))?;
                let d = c.d_dip + c.d_rec;
                if d < 0.0 {
                    return Err(Error::NegativeDiffusion {
                        z: x,
                        diffusion: d,
                        delta_a: p.delta_a,
                        delta_c: p.delta_c,
                    });
                }
                let f = if config.include_force { c.f_p } else { 0.0 };
                (f, c.beta, d)
            }
        };
        let kick: f64 = rng.sample(StandardNormal);
        x += mom / mass * dt;
        mom += (force + beta * mom / mass) * dt + (diffusion * dt).sqrt() * kick;
        step += 1;
    }
    let tail = &p2[tail_from..];
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok(Trajectory { p2, tail_mean })
}

fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn simulate(
    config: &TrajectoryConfig,
    p: &SystemParams,
    modes: &ModeSet,
    exec: Exec,
) -> Result<TrajectoryStats> {
    config.validate()?;
    let p = p.validate()?;
    let mass = p.mass();
    let guard = config.dt * max_friction(&p, modes, config.source)? / mass;
    if guard >= STABILITY_LIMIT {
        return Err(Error::StepTooLarge(guard));
    }
    let samples = config.sample_steps();
    let tail_from = samples.partition_point(|&s| 2 * s < config.n_steps);
    let runs = try_map_indexed(exec, config.n_trajectories, |i| {
        run_trajectory(i, config, &p, modes, &samples, tail_from)
    })?;

    let mut p2_mean = Vec::with_capacity(samples.len());
    let mut p2_stderr = Vec::with_capacity(samples.len());
    for k in 0..samples.len() {
        let (m, e) = mean_and_stderr(runs.iter().map(|r| r.p2[k]));
        p2_mean.push(m);
        p2_stderr.push(e);
    }
    let (tail, tail_err) = mean_and_stderr(runs.iter().map(|r| r.tail_mean));
    let temperature = tail / mass;
    Ok(TrajectoryStats {
        times: samples.iter().map(|&s| s as f64 * config.dt).collect(),
        p2_mean,
        p2_stderr,
        mass,
        temperature,
        temperature_stderr: tail_err / mass,
        below_recoil_floor: temperature < RECOIL_FLOOR_FACTOR * p.recoil_temperature(),
    })
}

/// Exponential fit of the relaxation of `⟨p²⟩` towards its late-time value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingFit {
    /// Fitted decay rate of the excess `⟨p²⟩(t) − ⟨p²⟩(∞)`, in `γ`.
    pub rate: f64,
    pub points_used: usize,
}

/// Fits `log(⟨p²⟩ − ⟨p²⟩_∞)` against `t` while the excess stays above a
/// tenth of its initial value. Rejects runs without a resolvable decay and
/// excesses that grow beyond their statistical error.
pub fn cooling_curve(stats: &TrajectoryStats) -> Result<CoolingFit> {
    let stationary = stats.temperature * stats.mass;
    let noise = |k: usize| 3.0 * stats.p2_stderr[k] + 3.0 * stats.temperature_stderr * stats.mass;
    let excess0 = stats.p2_mean[0] - stationary;
    if !(excess0 > noise(0)) || excess0 <= 1e-12 * stationary.abs() {
        return Err(Error::CoolingFit(
            "no decay: initial excess not resolved".into(),
        ));
    }
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for k in 0..stats.times.len() {
        let excess = stats.p2_mean[k] - stationary;
        if excess < 0.1 * excess0 {
            break;
        }
        if let Some(&prev) = ys.last() {
            let prev_excess = f64::exp(prev);
            if excess > prev_excess + noise(k) + noise(k - 1) {
                return Err(Error::CoolingFit(format!(
                    "non-monotone relaxation at t = {}",
                    stats.times[k]
                )));
            }
        }
        ts.push(stats.times[k]);
        ys.push(excess.ln());
    }
    if ts.len() < 3 {
        return Err(Error::CoolingFit(format!(
            "only {} points above the fit threshold",
            ts.len()
        )));
    }
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let rate = -sxy / sxx;
    if !(rate > 0.0) {
        return Err(Error::CoolingFit(format!(
            "fitted rate {rate} is not a decay"
        )));
    }
    Ok(CoolingFit {
        rate,
        points_used: ts.len(),
    })
}
