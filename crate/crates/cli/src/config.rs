//! Flat `key = value` run configuration: file parsing, `--set` overrides,
//! validation, and a deterministic echo for provenance.

use sta_core::noise::{NoiseChannels, NoiseConfig};
use sta_core::pulses::{Envelope, PulseParams};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Shortcut,
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    Constant,
    SuperGaussian,
}

/// Every knob of a run, with the reference experiment as the default.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t_total: f64,
    pub tau: f64,
    pub tau_c: f64,
    pub gamma0: f64,
    pub phi: f64,
    pub omega0_ref: f64,
    pub mode: Mode,
    pub envelope: EnvelopeKind,
    pub chi: f64,
    pub t0_env: f64,
    pub n_env: u32,
    pub steps: usize,
    pub stride: usize,
    pub seed: u64,
    pub n_runs: usize,
    pub noise_amplitude: f64,
    pub noise_interval: f64,
    pub noise_channels: NoiseChannels,
    pub noise_shared: bool,
    pub gamma1: f64,
    pub gamma3: f64,
    pub gamma_a: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t_total: 1.0,
            tau: 0.115,
            tau_c: 0.3,
            gamma0: 0.1,
            phi: PI / 5.0,
            omega0_ref: 16.0,
            mode: Mode::Shortcut,
            envelope: EnvelopeKind::Constant,
            chi: 16.0,
            t0_env: 0.4,
            n_env: 6,
            steps: 4096,
            stride: 8,
            seed: 42,
            n_runs: 100,
            noise_amplitude: 0.1,
            noise_interval: 1.0 / 512.0,
            noise_channels: NoiseChannels::default(),
            noise_shared: false,
            gamma1: 0.0,
            gamma3: 0.0,
            gamma_a: 0.5,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("{key}: expected a number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("{key}: expected an integer, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(ConfigError(format!(
            "{key}: expected true/false, got `{value}`"
        ))),
    }
}

impl RunConfig {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "T" => self.t_total = parse_f64(key, value)?,
            "tau" => self.tau = parse_f64(key, value)?,
            "tau_c" => self.tau_c = parse_f64(key, value)?,
            "gamma0" => self.gamma0 = parse_f64(key, value)?,
            "phi" => self.phi = parse_f64(key, value)?,
            "omega0_ref" => self.omega0_ref = parse_f64(key, value)?,
            "mode" => {
                self.mode = match value {
                    "shortcut" => Mode::Shortcut,
                    "original" => Mode::Original,
                    _ => {
                        return Err(ConfigError(format!(
                            "mode: expected shortcut|original, got `{value}`"
                        )))
                    }
                }
            }
            "envelope" => {
                self.envelope = match value {
                    "constant" => EnvelopeKind::Constant,
                    "supergaussian" => EnvelopeKind::SuperGaussian,
                    _ => {
                        return Err(ConfigError(format!(
                            "envelope: expected constant|supergaussian, got `{value}`"
                        )))
                    }
                }
            }
            "chi" => self.chi = parse_f64(key, value)?,
            "t0_env" => self.t0_env = parse_f64(key, value)?,
            "n_env" => self.n_env = parse_usize(key, value)? as u32,
            "steps" => self.steps = parse_usize(key, value)?,
            "stride" => self.stride = parse_usize(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| ConfigError(format!("seed: expected an integer, got `{value}`")))?
            }
            "n_runs" => self.n_runs = parse_usize(key, value)?,
            "noise_amplitude" => self.noise_amplitude = parse_f64(key, value)?,
            "noise_interval" => self.noise_interval = parse_f64(key, value)?,
            "noise_channels" => {
                let mut ch = NoiseChannels {
                    omega0: false,
                    theta: false,
                    delta: false,
                };
                for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match part {
                        "amplitude" | "omega0" => ch.omega0 = true,
                        "angle" | "theta" => ch.theta = true,
                        "detuning" | "delta" => ch.delta = true,
                        _ => {
                            return Err(ConfigError(format!(
                                "noise_channels: unknown channel `{part}`"
                            )))
                        }
                    }
                }
                self.noise_channels = ch;
            }
            "noise_shared" => self.noise_shared = parse_bool(key, value)?,
            "gamma1" => self.gamma1 = parse_f64(key, value)?,
            "gamma3" => self.gamma3 = parse_f64(key, value)?,
            "gamma_a" => self.gamma_a = parse_f64(key, value)?,
            _ => return Err(ConfigError(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            self.apply(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("--set `{assignment}`: expected key=value")))?;
        self.apply(key.trim(), value)
    }

    pub fn pulse_params(&self) -> PulseParams {
        PulseParams {
            t_total: self.t_total,
            tau: self.tau,
            tau_c: self.tau_c,
            gamma0: self.gamma0,
            phi: self.phi,
            omega0_ref: self.omega0_ref,
            envelope: match self.envelope {
                EnvelopeKind::Constant => None,
                EnvelopeKind::SuperGaussian => Some(Envelope {
                    chi: self.chi,
                    t0: self.t0_env,
                    n: self.n_env,
                }),
            },
        }
    }

    pub fn noise_config(&self) -> NoiseConfig {
        NoiseConfig {
            amplitude: self.noise_amplitude,
            resample_interval: self.noise_interval,
            master_seed: self.seed,
            channels: self.noise_channels,
            shared: self.noise_shared,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pulse_params()
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        self.noise_config()
            .validate()
            .map_err(|e| ConfigError(e.to_string()))?;
        if self.steps < 2 {
            return Err(ConfigError("steps: need at least 2".into()));
        }
        if self.stride == 0 {
            return Err(ConfigError("stride: must be positive".into()));
        }
        if self.n_runs == 0 {
            return Err(ConfigError("n_runs: must be positive".into()));
        }
        if self.gamma1 < 0.0 || self.gamma3 < 0.0 {
            return Err(ConfigError(
                "gamma1/gamma3: rates must be non-negative".into(),
            ));
        }
        if self.envelope == EnvelopeKind::SuperGaussian && !(self.t0_env > 0.0 && self.chi > 0.0) {
            return Err(ConfigError(
                "envelope: chi and t0_env must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Effective configuration as sorted `key = value` lines.
    pub fn echo(&self) -> String {
        let mut map = BTreeMap::new();
        map.insert("T", format!("{}", self.t_total));
        map.insert("tau", format!("{}", self.tau));
        map.insert("tau_c", format!("{}", self.tau_c));
        map.insert("gamma0", format!("{}", self.gamma0));
        map.insert("phi", format!("{}", self.phi));
        map.insert("omega0_ref", format!("{}", self.omega0_ref));
        map.insert(
            "mode",
            match self.mode {
                Mode::Shortcut => "shortcut".into(),
                Mode::Original => "original".into(),
            },
        );
        map.insert(
            "envelope",
            match self.envelope {
                EnvelopeKind::Constant => "constant".into(),
                EnvelopeKind::SuperGaussian => "supergaussian".into(),
            },
        );
        map.insert("chi", format!("{}", self.chi));
        map.insert("t0_env", format!("{}", self.t0_env));
        map.insert("n_env", format!("{}", self.n_env));
        map.insert("steps", format!("{}", self.steps));
        map.insert("stride", format!("{}", self.stride));
        map.insert("seed", format!("{}", self.seed));
        map.insert("n_runs", format!("{}", self.n_runs));
        map.insert("noise_amplitude", format!("{}", self.noise_amplitude));
        map.insert("noise_interval", format!("{}", self.noise_interval));
        let mut channels = Vec::new();
        if self.noise_channels.omega0 {
            channels.push("amplitude");
        }
        if self.noise_channels.theta {
            channels.push("angle");
        }
        if self.noise_channels.delta {
            channels.push("detuning");
        }
        map.insert("noise_channels", channels.join(","));
        map.insert("noise_shared", format!("{}", self.noise_shared));
        map.insert("gamma1", format!("{}", self.gamma1));
        map.insert("gamma3", format!("{}", self.gamma3));
        map.insert("gamma_a", format!("{}", self.gamma_a));
        let mut out = String::new();
        for (k, v) in map {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
