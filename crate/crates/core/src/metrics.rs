//! Scalar figures of merit: pulse area, average excited-state
//! population, the decoherence-exposure product, and peak amplitude.

use crate::pulses::PulseParams;
use crate::shortcut::{frame_at, modified_drive};
use std::f64::consts::PI;

pub const OMEGA_MAX_GRID: usize = 4096;

/// Trapezoid of the drive amplitude over a uniform grid, in radians.
pub fn pulse_area(omega0_samples: &[f64], dt: f64) -> f64 {
    trapezoid(omega0_samples, dt)
}

/// Area via the two leg amplitudes, √(Ωₚ² + Ωₛ²) pointwise; equal to
/// [`pulse_area`] on the same samples up to rounding.
pub fn pulse_area_components(omega_p: &[f64], omega_s: &[f64], dt: f64) -> f64 {
    let combined: Vec<f64> = omega_p
        .iter()
        .zip(omega_s)
        .map(|(p, s)| p.hypot(*s))
        .collect();
    trapezoid(&combined, dt)
}

fn trapezoid(samples: &[f64], dt: f64) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let inner: f64 = samples[1..samples.len() - 1].iter().sum();
    dt * (0.5 * (samples[0] + samples[samples.len() - 1]) + inner)
}

/// Average excited-state population over one dressing-angle excursion,
/// closed form: 1/2 − sin(2πγ₀)/(4πγ₀).
pub fn p2_bar(gamma0: f64) -> f64 {
    0.5 - (2.0 * gamma0 * PI).sin() / (4.0 * gamma0 * PI)
}

/// The same average by composite-Simpson quadrature of sin²γ over
/// [gamma_min, gamma_max]; the independent cross-check of the closed form.
pub fn p2_bar_integral(gamma_min: f64, gamma_max: f64, panels: usize) -> f64 {
    assert!(gamma_max > gamma_min && panels >= 2);
    let n = panels + panels % 2;
    let h = (gamma_max - gamma_min) / n as f64;
    let f = |g: f64| g.sin().powi(2);
    let mut acc = f(gamma_min) + f(gamma_max);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(gamma_min + h * k as f64);
    }
    acc * h / 3.0 / (gamma_max - gamma_min)
}

/// Decoherence-exposure product: loss rate × excited-state exposure ×
/// dimensionless run length. Not bounded by 1.
pub fn epsilon(gamma_a: f64, p2_bar: f64, t_omega_max: f64) -> f64 {
    gamma_a * p2_bar * t_omega_max
}

/// Peak drive amplitude: the numeric grid maximum alongside the verbatim
/// closed-form estimate (π/τ)·√(cot²(πγ₀) + 4cot²2φ/cos²(πγ₀)). The two
/// disagree by construction (the closed form carries a π/τ prefactor
/// where the grid maximum derives from π/(4τ)); both are reported so the
/// discrepancy stays visible in every summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaMax {
    pub numeric: f64,
    pub t_at_max: f64,
    pub closed_form: f64,
    /// Drive amplitude at the window center, where the maximum sits for
    /// the reference parameters.
    pub at_center: f64,
}

pub fn omega_max(p: &PulseParams) -> OmegaMax {
    let mut numeric = f64::NEG_INFINITY;
    let mut t_at_max = 0.0;
    for k in 0..=OMEGA_MAX_GRID {
        let t = -p.t_total / 2.0 + p.t_total * k as f64 / OMEGA_MAX_GRID as f64;
        if let Ok(f) = frame_at(t, p) {
            let o = modified_drive(&f).omega0;
            if o > numeric {
                numeric = o;
                t_at_max = t;
            }
        }
    }
    let g = PI * p.gamma0;
    let cot = |x: f64| x.cos() / x.sin();
    let closed_form =
        PI / p.tau * (cot(g).powi(2) + 4.0 * cot(2.0 * p.phi).powi(2) / (g.cos() * g.cos())).sqrt();
    let at_center = frame_at(0.0, p)
        .map(|f| modified_drive(&f).omega0)
        .unwrap_or(f64::NAN);
    OmegaMax {
        numeric,
        t_at_max,
        closed_form,
        at_center,
    }
}

/// One point of an exposure sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonPoint {
    pub gamma0: f64,
    pub phi: f64,
    pub p2_bar: f64,
    pub t_omega_max: f64,
    pub epsilon: f64,
}

/// Exposure over a (γ₀, φ) grid at fixed pulse widths.
pub fn epsilon_sweep(
    base: &PulseParams,
    gamma0s: &[f64],
    phis: &[f64],
    gamma_a: f64,
) -> Vec<EpsilonPoint> {
    let mut out = Vec::with_capacity(gamma0s.len() * phis.len());
    for &g0 in gamma0s {
        for &phi in phis {
            let p = PulseParams {
                gamma0: g0,
                phi,
                ..*base
            };
            let t_omega_max = p.t_total * omega_max(&p).numeric;
            let pb = p2_bar(g0);
            out.push(EpsilonPoint {
                gamma0: g0,
                phi,
                p2_bar: pb,
                t_omega_max,
                epsilon: epsilon(gamma_a, pb, t_omega_max),
            });
        }
    }
    out
}

/// Scalar summary of one transfer run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub area_over_pi: f64,
    pub t_omega_max_numeric: f64,
    pub t_omega_max_closed_form: f64,
    pub p2_bar: f64,
    pub epsilon: f64,
    pub p3_final: f64,
    pub fidelity_sq: f64,
    pub deviation: f64,
    pub norm_drift: f64,
}

impl RunSummary {
    pub fn from_parts(
        area_rad: f64,
        omax: &OmegaMax,
        p: &PulseParams,
        gamma_a: f64,
        p3_final: f64,
        norm_drift: f64,
    ) -> Self {
        let pb = p2_bar(p.gamma0);
        let t_omega = p.t_total * omax.numeric;
        Self {
            area_over_pi: area_rad / PI,
            t_omega_max_numeric: t_omega,
            t_omega_max_closed_form: p.t_total * omax.closed_form,
            p2_bar: pb,
            epsilon: epsilon(gamma_a, pb, t_omega),
            p3_final,
            fidelity_sq: p3_final * p3_final,
            deviation: 1.0 - p3_final,
            norm_drift,
        }
    }
}
