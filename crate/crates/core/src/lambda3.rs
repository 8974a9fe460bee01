//! The off-resonant three-level Λ system: bare Hamiltonian, analytic
//! spectrum, counterdiabatic term, and the adiabaticity diagnostic.
//!
//! Basis ordering is |1⟩, |2⟩, |3⟩ (excited state in the middle); ħ = 1.

use crate::numkit::{CMatrix, CVector};
use crate::pulses::{self, PulseParams};
use num_complex::Complex64 as C64;

/// Instantaneous drive: pump and Stokes Rabi frequencies and detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaDrive {
    pub omega_p: f64,
    pub omega_s: f64,
    pub delta: f64,
}

/// Mixing angles: tanθ = Ωₚ/Ωₛ, tan2φ = Ω₀/Δ, Ξ₀ = √(Ω₀² + Δ²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngles {
    pub theta: f64,
    pub phi: f64,
    pub xi0: f64,
}

impl MixingAngles {
    pub fn from_drive(d: &LambdaDrive) -> Self {
        let omega0 = d.omega_p.hypot(d.omega_s);
        Self {
            theta: d.omega_p.atan2(d.omega_s),
            phi: 0.5 * omega0.atan2(d.delta),
            xi0: omega0.hypot(d.delta),
        }
    }

    pub fn to_drive(&self) -> LambdaDrive {
        let omega0 = self.xi0 * (2.0 * self.phi).sin();
        LambdaDrive {
            omega_p: omega0 * self.theta.sin(),
            omega_s: omega0 * self.theta.cos(),
            delta: self.xi0 * (2.0 * self.phi).cos(),
        }
    }
}

/// Bare Λ Hamiltonian (1/2)·[[0, Ωₚ, 0], [Ωₚ, 2Δ, Ωₛ], [0, Ωₛ, 0]].
pub fn h0(d: &LambdaDrive) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let p = C64::new(d.omega_p / 2.0, 0.0);
    let s = C64::new(d.omega_s / 2.0, 0.0);
    let dd = C64::new(d.delta, 0.0);
    CMatrix::from_rows(&[&[z, p, z], &[p, dd, s], &[z, s, z]])
}

/// Analytic spectrum of the Λ Hamiltonian, ordered (dark, upper, lower):
/// E₀ = 0, E₊ = Ξ₀cos²φ, E₋ = −Ξ₀sin²φ with real eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum3 {
    pub e0: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub dark: CVector,
    pub upper: CVector,
    pub lower: CVector,
}

impl Spectrum3 {
    /// Energies and vectors in the fixed order (dark, upper, lower).
    pub fn levels(&self) -> [(f64, &CVector); 3] {
        [
            (self.e0, &self.dark),
            (self.e_plus, &self.upper),
            (self.e_minus, &self.lower),
        ]
    }
}

pub fn spectrum_h0(a: &MixingAngles) -> Spectrum3 {
    let (st, ct) = a.theta.sin_cos();
    let (sp, cp) = a.phi.sin_cos();
    Spectrum3 {
        e0: 0.0,
        e_plus: a.xi0 * cp * cp,
        e_minus: -a.xi0 * sp * sp,
        dark: CVector::from_reals(&[ct, 0.0, -st]),
        upper: CVector::from_reals(&[st * sp, cp, ct * sp]),
        lower: CVector::from_reals(&[st * cp, -sp, ct * cp]),
    }
}

/// Counterdiabatic term for the Λ system:
/// i·[[0, φ̇sinθ, θ̇], [−φ̇sinθ, 0, −φ̇cosθ], [−θ̇, φ̇cosθ, 0]].
pub fn h_cd(theta_dot: f64, phi_dot: f64, theta: f64) -> CMatrix {
    let (st, ct) = theta.sin_cos();
    let i = |x: f64| C64::new(0.0, x);
    CMatrix::from_rows(&[
        &[i(0.0), i(phi_dot * st), i(theta_dot)],
        &[i(-phi_dot * st), i(0.0), i(-phi_dot * ct)],
        &[i(-theta_dot), i(phi_dot * ct), i(0.0)],
    ])
}

/// Adiabaticity margin of the dark state against the lower bright state
/// at time `t`, for a constant drive amplitude `omega0` and the mixing
/// angle φ fixed by `p`. Values ≥ 5 are treated as safely adiabatic; the
/// margin scales linearly with the drive amplitude.
pub fn adiabaticity_ratio(t: f64, p: &PulseParams, omega0: f64) -> f64 {
    let (sp, cp) = p.phi.sin_cos();
    let xi0 = omega0 / (2.0 * p.phi).sin();
    let td = pulses::theta_dot(t, p);
    2.0 * xi0 * sp * sp / (td * cp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{hermitian_eig, SplitMix64};

    #[test]
    fn h0_zero_drive_is_zero() {
        let m = h0(&LambdaDrive {
            omega_p: 0.0,
            omega_s: 0.0,
            delta: 0.0,
        });
        assert_eq!(m.max_abs(), 0.0);
    }

    #[test]
    fn h0_resonant_eigenvalues() {
        let m = h0(&LambdaDrive {
            omega_p: 1.0,
            omega_s: 1.0,
            delta: 0.0,
        });
        let e = hermitian_eig(&m, 1e-12).unwrap();
        let r = std::f64::consts::SQRT_2 / 2.0;
        assert!((e.values[0] + r).abs() < 1e-12);
        assert!(e.values[1].abs() < 1e-12);
        assert!((e.values[2] - r).abs() < 1e-12);
    }

    #[test]
    fn h0_keeps_one_three_closed() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let d = LambdaDrive {
                omega_p: rng.next_f64() * 10.0,
                omega_s: rng.next_f64() * 10.0,
                delta: rng.uniform_pm1() * 10.0,
            };
            let m = h0(&d);
            assert_eq!(m[(0, 2)], C64::new(0.0, 0.0));
            assert_eq!(m[(2, 0)], C64::new(0.0, 0.0));
            assert!(m.is_hermitian(0.0));
        }
    }

    #[test]
    fn spectrum_matches_numeric_eigensolver() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let a = MixingAngles {
                theta: rng.uniform_in(0.05, std::f64::consts::FRAC_PI_2 - 0.05),
                phi: rng.uniform_in(0.1, std::f64::consts::FRAC_PI_4),
                xi0: rng.uniform_in(0.5, 30.0),
            };
            let m = h0(&a.to_drive());
            let num = hermitian_eig(&m, 1e-10).unwrap();
            let an = spectrum_h0(&a);
            // numeric order is ascending: lower, dark, upper
            let pairs = [
                (num.values[0], &num.vectors[0], an.e_minus, &an.lower),
                (num.values[1], &num.vectors[1], an.e0, &an.dark),
                (num.values[2], &num.vectors[2], an.e_plus, &an.upper),
            ];
            for (ev_num, v_num, ev_an, v_an) in pairs {
                assert!(
                    (ev_num - ev_an).abs() <= 1e-10 * a.xi0.max(1.0),
                    "eigenvalue mismatch {ev_num} vs {ev_an}"
                );
                let ov = v_num.dot(v_an).norm();
                assert!(ov >= 1.0 - 1e-10, "eigenvector overlap {ov}");
            }
        }
    }

    #[test]
    fn spectrum_resonant_and_boundary_limits() {
        let a = MixingAngles {
            theta: 0.3,
            phi: std::f64::consts::FRAC_PI_4,
            xi0: 2.0,
        };
        let s = spectrum_h0(&a);
        assert!((s.e_plus - 1.0).abs() < 1e-14);
        assert!((s.e_minus + 1.0).abs() < 1e-14);
        let b = spectrum_h0(&MixingAngles {
            theta: 0.0,
            phi: 0.4,
            xi0: 1.0,
        });
        assert!((b.dark[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(b.dark[1].norm() < 1e-15 && b.dark[2].norm() < 1e-15);
    }

    #[test]
    fn dark_state_is_annihilated() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..50 {
            let a = MixingAngles {
                theta: rng.uniform_in(0.0, std::f64::consts::FRAC_PI_2),
                phi: rng.uniform_in(0.05, std::f64::consts::FRAC_PI_4),
                xi0: rng.uniform_in(0.1, 20.0),
            };
            let m = h0(&a.to_drive());
            let s = spectrum_h0(&a);
            assert!(m.matvec(&s.dark).norm() < 1e-12 * a.xi0.max(1.0));
        }
    }

    #[test]
    fn middle_eigenvalue_is_exactly_dark() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..100 {
            let d = LambdaDrive {
                omega_p: rng.next_f64() * 8.0,
                omega_s: rng.next_f64() * 8.0,
                delta: rng.uniform_pm1() * 8.0,
            };
            let e = hermitian_eig(&h0(&d), 1e-12).unwrap();
            let scale = h0(&d).frobenius_norm().max(1.0);
            assert!(e.values[0] <= 1e-12 * scale);
            assert!(e.values[2] >= -1e-12 * scale);
            assert!(e.values[1].abs() <= 1e-10 * scale, "dark level drifted");
        }
    }

    #[test]
    fn cd_term_structure() {
        let m = h_cd(0.7, 0.0, 0.3);
        // resonant reduction: i·θ̇(|1⟩⟨3| − |3⟩⟨1|)
        assert!((m[(0, 2)] - C64::new(0.0, 0.7)).norm() < 1e-15);
        assert!((m[(2, 0)] - C64::new(0.0, -0.7)).norm() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15);
        assert_eq!(h_cd(0.0, 0.0, 1.0).max_abs(), 0.0);
        // zero diagonal, purely imaginary entries, Hermitian
        let g = h_cd(1.3, -0.4, 1.1);
        assert!(g.is_hermitian(1e-15));
        for i in 0..3 {
            assert_eq!(g[(i, i)], C64::new(0.0, 0.0));
            for j in 0..3 {
                assert_eq!(g[(i, j)].re, 0.0);
            }
        }
    }

    #[test]
    fn adiabaticity_margin_thresholds() {
        let p = PulseParams {
            tau: 0.115,
            ..PulseParams::default()
        };
        let min_ratio = |omega0: f64| -> f64 {
            (0..=400)
                .map(|k| adiabaticity_ratio(-0.5 + k as f64 / 400.0, &p, omega0))
                .fold(f64::INFINITY, f64::min)
        };
        let at30 = min_ratio(30.0);
        let at15 = min_ratio(15.0);
        assert!(at30 >= 5.0, "margin at 30/T: {at30}");
        assert!(at15 < 5.0, "margin at 15/T: {at15}");
        // linear in the drive amplitude
        let r1 = adiabaticity_ratio(0.1, &p, 10.0);
        let r2 = adiabaticity_ratio(0.1, &p, 20.0);
        assert!((r2 - 2.0 * r1).abs() < 1e-12 * r2);
    }
}
