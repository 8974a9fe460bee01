//! Closed-form pulse shapes on the symmetric window [−T/2, T/2]: the
//! sigmoid mixing angle θ(t), the Gaussian dressing angle γ(t), and an
//! optional super-Gaussian reference envelope.

use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Super-Gaussian reference envelope χ·exp(−(t/T₀)^{2n}); only used for
/// adiabatic-reference runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub chi: f64,
    pub t0: f64,
    pub n: u32,
}

/// Shape parameters for one run. Times are in units of the window length
/// `t_total`; `omega0_ref` is the constant drive amplitude used by the
/// unmodified-drive comparison runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub t_total: f64,
    pub tau: f64,
    pub tau_c: f64,
    pub gamma0: f64,
    pub phi: f64,
    pub omega0_ref: f64,
    pub envelope: Option<Envelope>,
}

impl Default for PulseParams {
    /// Reference parameter set used across the bundled experiments:
    /// τ = 0.115T, τ_c = 0.3T, γ₀ = 0.1, φ = π/5, Ω₀ref = 16/T.
    fn default() -> Self {
        Self {
            t_total: 1.0,
            tau: 0.115,
            tau_c: 0.3,
            gamma0: 0.1,
            phi: PI / 5.0,
            omega0_ref: 16.0,
            envelope: None,
        }
    }
}

impl PulseParams {
    // negated comparisons so NaN parameters fail validation too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let t = self.t_total;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParam {
                name: "T",
                value: t,
                constraint: "T > 0",
            });
        }
        if !(self.tau > 0.0 && self.tau <= 0.12 * t) {
            return Err(Error::InvalidParam {
                name: "tau",
                value: self.tau,
                constraint: "0 < tau <= 0.12 T",
            });
        }
        if !(self.tau_c > 0.2 * t && self.tau_c <= 0.3 * t) {
            return Err(Error::InvalidParam {
                name: "tau_c",
                value: self.tau_c,
                constraint: "0.2 T < tau_c <= 0.3 T",
            });
        }
        if !(self.gamma0 > 0.0 && self.gamma0 < 0.5) {
            return Err(Error::InvalidParam {
                name: "gamma0",
                value: self.gamma0,
                constraint: "0 < gamma0 < 0.5",
            });
        }
        if !(self.phi > 0.0 && self.phi <= std::f64::consts::FRAC_PI_4) {
            return Err(Error::InvalidParam {
                name: "phi",
                value: self.phi,
                constraint: "0 < phi <= pi/4",
            });
        }
        if !(self.omega0_ref > 0.0) {
            return Err(Error::InvalidParam {
                name: "omega0_ref",
                value: self.omega0_ref,
                constraint: "omega0_ref > 0",
            });
        }
        Ok(())
    }

    pub fn window_start(&self) -> f64 {
        -self.t_total / 2.0
    }

    pub fn window_end(&self) -> f64 {
        self.t_total / 2.0
    }
}

/// Mixing angle θ(t) = (π/2)/(1 + e^{−t/τ}); monotone 0 → π/2.
pub fn theta(t: f64, p: &PulseParams) -> f64 {
    FRAC_PI_2 / (1.0 + (-t / p.tau).exp())
}

/// dθ/dt, written through cosh to stay finite far outside the window.
pub fn theta_dot(t: f64, p: &PulseParams) -> f64 {
    let ch = (t / (2.0 * p.tau)).cosh();
    PI / (8.0 * p.tau * ch * ch)
}

/// Dressing angle γ(t) = πγ₀·exp(−t²/τ_c²).
pub fn gamma(t: f64, p: &PulseParams) -> f64 {
    PI * p.gamma0 * (-t * t / (p.tau_c * p.tau_c)).exp()
}

/// dγ/dt
pub fn gamma_dot(t: f64, p: &PulseParams) -> f64 {
    -2.0 * PI * p.gamma0 * t / (p.tau_c * p.tau_c) * (-t * t / (p.tau_c * p.tau_c)).exp()
}

/// Reference envelope Ω₀(t) = χ·exp(−(t/T₀)^{2n}).
pub fn omega0_envelope(t: f64, p: &PulseParams) -> Result<f64> {
    let env = p
        .envelope
        .ok_or(Error::ConfigMissing("envelope (chi, T0, n)"))?;
    let x = t / env.t0;
    Ok(env.chi * (-x.powi(2 * env.n as i32)).exp())
}
