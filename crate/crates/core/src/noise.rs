//! Multiplicative instantaneous-fluctuation model and the Monte Carlo
//! robustness harness.
//!
//! Each selected drive quantity G ∈ {Ω̃₀, θ̃, Δ̃} is scaled by 1 + ϖ(t)
//! with ϖ piecewise constant, resampled per channel from a uniform
//! window. Run k of a batch draws its tracks from stream (master_seed, k),
//! so batches are reproducible and runs are independent.

use crate::dynamics::{self, Grid, PropagateOpts};
use crate::numkit::{CVector, SplitMix64};
use crate::par;
use crate::pulses::PulseParams;
use crate::shortcut::{self, ModifiedDrive};
use crate::{Error, Result};

/// Which drive quantities the fluctuations act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseChannels {
    pub omega0: bool,
    pub theta: bool,
    pub delta: bool,
}

impl Default for NoiseChannels {
    fn default() -> Self {
        Self {
            omega0: true,
            theta: true,
            delta: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Half-width of the uniform fluctuation window (0.1 ⇒ ±10%).
    pub amplitude: f64,
    /// Resampling interval of the piecewise-constant tracks.
    pub resample_interval: f64,
    pub master_seed: u64,
    pub channels: NoiseChannels,
    /// Apply one shared track to all channels instead of independent ones.
    pub shared: bool,
}

impl NoiseConfig {
    pub fn new(t_total: f64, master_seed: u64) -> Self {
        Self {
            amplitude: 0.1,
            resample_interval: t_total / 512.0,
            master_seed,
            channels: NoiseChannels::default(),
            shared: false,
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.amplitude) {
            return Err(Error::InvalidParam {
                name: "noise_amplitude",
                value: self.amplitude,
                constraint: "0 <= amplitude < 1",
            });
        }
        if !(self.resample_interval > 0.0) {
            return Err(Error::InvalidParam {
                name: "noise_interval",
                value: self.resample_interval,
                constraint: "interval > 0",
            });
        }
        Ok(())
    }
}

/// Piecewise-constant fluctuation tracks for one run.
#[derive(Debug, Clone)]
pub struct NoiseTracks {
    t_start: f64,
    interval: f64,
    omega0: Vec<f64>,
    theta: Vec<f64>,
    delta: Vec<f64>,
}

impl NoiseTracks {
    /// Draw the tracks for run `run_index` over the window of `grid`.
    pub fn draw(cfg: &NoiseConfig, run_index: u64, grid: &Grid) -> Self {
        let span = grid.t1 - grid.t0;
        let segments = (span / cfg.resample_interval).ceil().max(1.0) as usize;
        let run_seed = SplitMix64::stream(cfg.master_seed, run_index).next_u64();
        let draw_channel = |channel: u64| -> Vec<f64> {
            let mut rng = SplitMix64::stream(run_seed, channel);
            (0..segments)
                .map(|_| rng.uniform_in(-cfg.amplitude, cfg.amplitude))
                .collect()
        };
        let omega0 = draw_channel(0);
        let (theta, delta) = if cfg.shared {
            (omega0.clone(), omega0.clone())
        } else {
            (draw_channel(1), draw_channel(2))
        };
        Self {
            t_start: grid.t0,
            interval: cfg.resample_interval,
            omega0,
            theta,
            delta,
        }
    }

    fn segment(&self, t: f64) -> usize {
        let k = ((t - self.t_start) / self.interval).floor();
        (k.max(0.0) as usize).min(self.omega0.len() - 1)
    }
}

/// Wrap a drive with multiplicative fluctuations. The leg amplitudes are
/// rebuilt from the noisy polar pair so the Λ structure and the leg
/// phases stay untouched; a zero amplitude leaves the drive bit-identical.
pub fn noisy_drive<'a>(
    base: impl Fn(f64) -> Result<ModifiedDrive> + 'a,
    cfg: &NoiseConfig,
    tracks: NoiseTracks,
) -> impl Fn(f64) -> Result<ModifiedDrive> + 'a {
    let channels = cfg.channels;
    let off = cfg.amplitude == 0.0;
    move |t: f64| {
        let d = base(t)?;
        if off {
            return Ok(d);
        }
        let k = tracks.segment(t);
        let f_omega0 = if channels.omega0 {
            1.0 + tracks.omega0[k]
        } else {
            1.0
        };
        let f_theta = if channels.theta {
            1.0 + tracks.theta[k]
        } else {
            1.0
        };
        let f_delta = if channels.delta {
            1.0 + tracks.delta[k]
        } else {
            1.0
        };
        let theta = d.theta * f_theta;
        let omega0 = d.omega0 * f_omega0;
        // ratio form: exact multiplicative scaling when a channel is quiet
        let (leg_p, leg_s) = if d.theta.sin() == 0.0 || d.theta.cos() == 0.0 {
            (omega0 * theta.sin(), omega0 * theta.cos())
        } else {
            (
                d.omega_p * f_omega0 * (theta.sin() / d.theta.sin()),
                d.omega_s * f_omega0 * (theta.cos() / d.theta.cos()),
            )
        };
        Ok(ModifiedDrive {
            omega_p: leg_p,
            omega_s: leg_s,
            delta: d.delta * f_delta,
            omega0,
            theta,
            ..d
        })
    }
}

/// Per-run outcome of a Monte Carlo batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub index: u64,
    pub seed: u64,
    pub p3_final: f64,
}

/// Aggregate transfer statistics of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloStats {
    pub n_runs: usize,
    pub n_failed: usize,
    pub mean_p3: f64,
    pub std_p3: f64,
    pub min_p3: f64,
    pub runs: Vec<RunRecord>,
}

fn single_noisy_run(
    p: &PulseParams,
    cfg: &NoiseConfig,
    run_index: u64,
    grid: &Grid,
) -> Result<f64> {
    let tracks = NoiseTracks::draw(cfg, run_index, grid);
    let drive = noisy_drive(
        |t| Ok(shortcut::modified_drive(&shortcut::frame_at(t, p)?)),
        cfg,
        tracks,
    );
    let h = |t: f64| match drive(t) {
        Ok(d) => shortcut::h_tilde(&d),
        Err(_) => {
            // poisoned evaluation surfaces as a NaN matrix inside the stepper
            let mut m = crate::numkit::CMatrix::zeros(3);
            m[(0, 0)] = num_complex::Complex64::new(f64::NAN, 0.0);
            m
        }
    };
    let opts = PropagateOpts {
        convergence_check: false,
        ..Default::default()
    };
    let traj = dynamics::propagate_schrodinger(h, &CVector::basis(3, 0), grid, &opts)?;
    Ok(traj.p3_final())
}

fn aggregate(records: Vec<(u64, u64, Result<f64>)>) -> MonteCarloStats {
    let n_runs = records.len();
    let mut runs = Vec::with_capacity(n_runs);
    let mut n_failed = 0;
    for (index, seed, outcome) in records {
        match outcome {
            Ok(p3_final) => runs.push(RunRecord {
                index,
                seed,
                p3_final,
            }),
            Err(_) => n_failed += 1,
        }
    }
    let n = runs.len().max(1) as f64;
    let mean = runs.iter().map(|r| r.p3_final).sum::<f64>() / n;
    let var = if runs.len() > 1 {
        runs.iter()
            .map(|r| (r.p3_final - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let min = runs
        .iter()
        .map(|r| r.p3_final)
        .fold(f64::INFINITY, f64::min);
    MonteCarloStats {
        n_runs,
        n_failed,
        mean_p3: mean,
        std_p3: var.sqrt(),
        min_p3: if runs.is_empty() { f64::NAN } else { min },
        runs,
    }
}

fn run_batch(
    p: &PulseParams,
    cfg: &NoiseConfig,
    n_runs: usize,
    grid: &Grid,
    parallel: bool,
) -> Result<MonteCarloStats> {
    cfg.validate()?;
    p.validate()?;
    let one = |k: usize| -> (u64, u64, Result<f64>) {
        let run_index = k as u64;
        let seed = SplitMix64::stream(cfg.master_seed, run_index).next_u64();
        (run_index, seed, single_noisy_run(p, cfg, run_index, grid))
    };
    let records = if parallel {
        par::map_indexed(n_runs, one)
    } else {
        par::map_indexed_seq(n_runs, one)
    };
    Ok(aggregate(records))
}

/// Monte Carlo transfer statistics under drive fluctuations; runs fan
/// out over the thread pool when the `parallel` feature is enabled.
pub fn monte_carlo(
    p: &PulseParams,
    cfg: &NoiseConfig,
    n_runs: usize,
    grid: &Grid,
) -> Result<MonteCarloStats> {
    run_batch(p, cfg, n_runs, grid, true)
}

/// Sequential Monte Carlo batch; identical results to [`monte_carlo`].
pub fn monte_carlo_seq(
    p: &PulseParams,
    cfg: &NoiseConfig,
    n_runs: usize,
    grid: &Grid,
) -> Result<MonteCarloStats> {
    run_batch(p, cfg, n_runs, grid, false)
}
