//! Fixed-step fourth-order propagation of the Schrödinger equation for
//! state vectors and of the Lindblad equation for density matrices, with
//! trajectory recording and convergence diagnostics.

use crate::numkit::{hermitian_eig, CMatrix, CVector};
use crate::{Error, Result};
use num_complex::Complex64 as C64;

pub const DEFAULT_STEPS: usize = 4096;
pub const DEFAULT_RECORD_STRIDE: usize = 8;
pub const CONVERGENCE_TOL: f64 = 1e-7;

/// Uniform time grid over [t0, t1] with `steps` integration steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Self {
        assert!(steps >= 2 && t1 > t0, "degenerate grid");
        Self { t0, t1, steps }
    }

    /// Symmetric window [−T/2, T/2] at the default resolution.
    pub fn symmetric(t_total: f64, steps: usize) -> Self {
        Self::new(-t_total / 2.0, t_total / 2.0, steps)
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + self.dt() * k as f64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PropagateOpts {
    /// Record every n-th step (the first and last points are always kept).
    pub record_stride: usize,
    /// Re-run at half the step and attach a warning when the final
    /// populations move by more than [`CONVERGENCE_TOL`].
    pub convergence_check: bool,
    /// Keep the state at every recorded time, not just populations.
    pub record_states: bool,
}

impl Default for PropagateOpts {
    fn default() -> Self {
        Self {
            record_stride: DEFAULT_RECORD_STRIDE,
            convergence_check: true,
            record_states: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// Largest final-population change under step halving.
    pub final_population_delta: f64,
    pub warning: bool,
}

#[derive(Debug, Clone)]
pub enum FinalState {
    Pure(CVector),
    Mixed(CMatrix),
}

/// Recorded time series of a propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Level populations at each recorded time.
    pub populations: Vec<Vec<f64>>,
    pub states: Option<Vec<CVector>>,
    pub final_state: FinalState,
    /// max |‖ψ‖ − 1| over all steps (pure runs) or max |tr ρ − 1|.
    pub norm_drift: f64,
    /// Smallest density-matrix eigenvalue seen at recorded times
    /// (dissipative runs only).
    pub min_rho_eigenvalue: Option<f64>,
    pub convergence: Option<Convergence>,
}

impl Trajectory {
    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().expect("trajectory never empty")
    }

    /// Population of the last level (the transfer target for Λ runs).
    pub fn p3_final(&self) -> f64 {
        *self.final_populations().last().unwrap()
    }
}

/// Spontaneous-emission rates out of the excited level into the two
/// ground levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladParams {
    pub gamma1: f64,
    pub gamma3: f64,
}

impl LindbladParams {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("gamma1", self.gamma1), ("gamma3", self.gamma3)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParam {
                    name,
                    value,
                    constraint: "rate >= 0",
                });
            }
        }
        Ok(())
    }
}

fn eval_h(h_fn: &impl Fn(f64) -> CMatrix, t: f64) -> Result<CMatrix> {
    let m = h_fn(t);
    if !m.is_finite() {
        return Err(Error::HamiltonianEvaluation { t });
    }
    Ok(m)
}

/// Integrate i·dψ/dt = H(t)ψ. The state is never renormalized: the norm
/// drift doubles as an integration-quality diagnostic.
pub fn propagate_schrodinger(
    h_fn: impl Fn(f64) -> CMatrix,
    psi0: &CVector,
    grid: &Grid,
    opts: &PropagateOpts,
) -> Result<Trajectory> {
    let mut t = run_schrodinger(&h_fn, psi0, grid, opts)?;
    if opts.convergence_check {
        let fine = Grid::new(grid.t0, grid.t1, grid.steps * 2);
        let opts_fine = PropagateOpts {
            convergence_check: false,
            record_states: false,
            record_stride: fine.steps,
        };
        let refd = run_schrodinger(&h_fn, psi0, &fine, &opts_fine)?;
        let delta = t
            .final_populations()
            .iter()
            .zip(refd.final_populations())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        t.convergence = Some(Convergence {
            final_population_delta: delta,
            warning: delta >= CONVERGENCE_TOL,
        });
    }
    Ok(t)
}

fn run_schrodinger(
    h_fn: &impl Fn(f64) -> CMatrix,
    psi0: &CVector,
    grid: &Grid,
    opts: &PropagateOpts,
) -> Result<Trajectory> {
    let dim = psi0.dim();
    let minus_i = C64::new(0.0, -1.0);
    let dt = grid.dt();
    let mut psi = *psi0;
    let mut times = Vec::new();
    let mut pops = Vec::new();
    let mut states = opts.record_states.then(Vec::new);
    let mut drift: f64 = 0.0;

    let record = |k: usize| k.is_multiple_of(opts.record_stride) || k == grid.steps;
    #[allow(clippy::type_complexity)]
    let push = |t: f64,
                psi: &CVector,
                times: &mut Vec<f64>,
                pops: &mut Vec<Vec<f64>>,
                states: &mut Option<Vec<CVector>>| {
        times.push(t);
        pops.push((0..dim).map(|i| psi[i].norm_sqr()).collect());
        if let Some(s) = states {
            s.push(*psi);
        }
    };

    push(grid.t0, &psi, &mut times, &mut pops, &mut states);
    for k in 0..grid.steps {
        let t = grid.time(k);
        let h1 = eval_h(h_fn, t)?;
        let h2 = eval_h(h_fn, t + dt / 2.0)?;
        let h3 = eval_h(h_fn, t + dt)?;
        let k1 = h1.matvec(&psi).scale(minus_i);
        let k2 = h2
            .matvec(&psi.add(&k1.scale(C64::new(dt / 2.0, 0.0))))
            .scale(minus_i);
        let k3 = h2
            .matvec(&psi.add(&k2.scale(C64::new(dt / 2.0, 0.0))))
            .scale(minus_i);
        let k4 = h3
            .matvec(&psi.add(&k3.scale(C64::new(dt, 0.0))))
            .scale(minus_i);
        let incr = k1
            .add(&k2.scale(C64::new(2.0, 0.0)))
            .add(&k3.scale(C64::new(2.0, 0.0)))
            .add(&k4)
            .scale(C64::new(dt / 6.0, 0.0));
        psi = psi.add(&incr);
        drift = drift.max((psi.norm() - 1.0).abs());
        if record(k + 1) {
            push(grid.time(k + 1), &psi, &mut times, &mut pops, &mut states);
        }
    }

    Ok(Trajectory {
        times,
        populations: pops,
        states,
        final_state: FinalState::Pure(psi),
        norm_drift: drift,
        min_rho_eigenvalue: None,
        convergence: None,
    })
}

fn lindblad_rhs(h: &CMatrix, rho: &CMatrix, lp: &LindbladParams) -> CMatrix {
    // dρ/dt = −i[H,ρ] + Σ_{n∈{1,3}} Γₙ (Sₙ⁻ ρ Sₙ⁺ − ½{Sₙ⁺Sₙ⁻, ρ}),
    // Sₙ⁻ = |n⟩⟨2|: feeding terms land on the ground diagonals, the
    // anticommutator drains the excited row and column.
    let mut out = h.commutator(rho).scale(C64::new(0.0, -1.0));
    let p_exc = rho[(1, 1)];
    let gsum = lp.gamma1 + lp.gamma3;
    out[(0, 0)] += p_exc * lp.gamma1;
    out[(2, 2)] += p_exc * lp.gamma3;
    // {P₁,ρ} counts the (1,1) entry from both sides
    for j in 0..3 {
        out[(1, j)] -= rho[(1, j)] * (gsum / 2.0);
        out[(j, 1)] -= rho[(j, 1)] * (gsum / 2.0);
    }
    out
}

/// Integrate the Lindblad equation for the Λ system. The density matrix
/// is re-symmetrized every step; the trace is monitored, and positivity
/// is checked at each recorded time.
pub fn propagate_lindblad(
    h_fn: impl Fn(f64) -> CMatrix,
    rho0: &CMatrix,
    lp: &LindbladParams,
    grid: &Grid,
    opts: &PropagateOpts,
) -> Result<Trajectory> {
    let mut out = run_lindblad(&h_fn, rho0, lp, grid, opts)?;
    if opts.convergence_check {
        let fine = Grid::new(grid.t0, grid.t1, grid.steps * 2);
        let opts_fine = PropagateOpts {
            convergence_check: false,
            record_states: false,
            record_stride: fine.steps,
        };
        let refd = run_lindblad(&h_fn, rho0, lp, &fine, &opts_fine)?;
        let delta = out
            .final_populations()
            .iter()
            .zip(refd.final_populations())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.convergence = Some(Convergence {
            final_population_delta: delta,
            warning: delta >= CONVERGENCE_TOL,
        });
    }
    Ok(out)
}

fn run_lindblad(
    h_fn: &impl Fn(f64) -> CMatrix,
    rho0: &CMatrix,
    lp: &LindbladParams,
    grid: &Grid,
    opts: &PropagateOpts,
) -> Result<Trajectory> {
    lp.validate()?;
    if rho0.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: rho0.dim(),
        });
    }
    let dev = rho0.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(Error::HermiticityViolation {
            max_dev: dev,
            tol: 1e-10,
        });
    }
    if (rho0.trace().re - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParam {
            name: "rho0",
            value: rho0.trace().re,
            constraint: "unit trace",
        });
    }
    let init_eig = hermitian_eig(rho0, 1e-10)?;
    if init_eig.values[0] < -1e-9 {
        return Err(Error::PositivityViolation {
            t: grid.t0,
            min_eig: init_eig.values[0],
        });
    }

    let dt = grid.dt();
    let mut rho = rho0.hermitian_part();
    let mut times = Vec::new();
    let mut pops = Vec::new();
    let mut drift: f64 = 0.0;
    let mut min_eig = f64::INFINITY;

    let check_and_record = |t: f64,
                            rho: &CMatrix,
                            times: &mut Vec<f64>,
                            pops: &mut Vec<Vec<f64>>,
                            min_eig: &mut f64|
     -> Result<()> {
        let eig = hermitian_eig(rho, 1e-8)?;
        if eig.values[0] < -1e-6 {
            return Err(Error::PositivityViolation {
                t,
                min_eig: eig.values[0],
            });
        }
        *min_eig = min_eig.min(eig.values[0]);
        times.push(t);
        pops.push((0..3).map(|i| rho[(i, i)].re).collect());
        Ok(())
    };

    check_and_record(grid.t0, &rho, &mut times, &mut pops, &mut min_eig)?;
    for k in 0..grid.steps {
        let t = grid.time(k);
        let h1 = eval_h(h_fn, t)?;
        let h2 = eval_h(h_fn, t + dt / 2.0)?;
        let h3 = eval_h(h_fn, t + dt)?;
        let k1 = lindblad_rhs(&h1, &rho, lp);
        let k2 = lindblad_rhs(&h2, &rho.add(&k1.scale(C64::new(dt / 2.0, 0.0))), lp);
        let k3 = lindblad_rhs(&h2, &rho.add(&k2.scale(C64::new(dt / 2.0, 0.0))), lp);
        let k4 = lindblad_rhs(&h3, &rho.add(&k3.scale(C64::new(dt, 0.0))), lp);
        let incr = k1
            .add(&k2.scale(C64::new(2.0, 0.0)))
            .add(&k3.scale(C64::new(2.0, 0.0)))
            .add(&k4)
            .scale(C64::new(dt / 6.0, 0.0));
        rho = rho.add(&incr).hermitian_part();
        drift = drift.max((rho.trace().re - 1.0).abs());
        if (k + 1).is_multiple_of(opts.record_stride) || k + 1 == grid.steps {
            check_and_record(grid.time(k + 1), &rho, &mut times, &mut pops, &mut min_eig)?;
        }
    }

    Ok(Trajectory {
        times,
        populations: pops,
        states: None,
        final_state: FinalState::Mixed(rho),
        norm_drift: drift,
        min_rho_eigenvalue: Some(min_eig),
        convergence: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseParams;
    use crate::shortcut;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn free_evolution_is_identity() {
        let psi0 = CVector::basis(3, 0);
        let grid = Grid::symmetric(1.0, 256);
        let t = propagate_schrodinger(|_| CMatrix::zeros(3), &psi0, &grid, &Default::default())
            .unwrap();
        assert_eq!(t.p3_final(), 0.0);
        assert_eq!(t.final_populations()[0], 1.0);
        assert_eq!(t.norm_drift, 0.0);
    }

    #[test]
    fn rabi_oscillation_analytic() {
        let omega = 3.0;
        let h = CMatrix::from_rows(&[
            &[c(0.0, 0.0), c(omega / 2.0, 0.0)],
            &[c(omega / 2.0, 0.0), c(0.0, 0.0)],
        ]);
        let grid = Grid::new(0.0, 1.0, 4096);
        let opts = PropagateOpts {
            record_stride: 64,
            ..Default::default()
        };
        let t = propagate_schrodinger(|_| h, &CVector::basis(2, 0), &grid, &opts).unwrap();
        for (tk, pk) in t.times.iter().zip(&t.populations) {
            let expect = (omega * tk / 2.0).sin().powi(2);
            assert!((pk[1] - expect).abs() < 1e-8, "P1 mismatch at t={tk}");
        }
        assert!(t.norm_drift < 1e-12);
        assert!(!t.convergence.unwrap().warning);
    }

    #[test]
    fn shortcut_drive_transfers_population() {
        let p = PulseParams::default();
        let h = |t: f64| shortcut::h_tilde_at(t, &p).unwrap();
        let grid = Grid::symmetric(1.0, DEFAULT_STEPS);
        let t =
            propagate_schrodinger(h, &CVector::basis(3, 0), &grid, &Default::default()).unwrap();
        let p3 = t.p3_final();
        assert!((0.99..=1.0).contains(&p3), "P3 = {p3}");
        assert!(t.norm_drift <= 1e-7);
        assert!(!t.convergence.unwrap().warning);
    }

    #[test]
    fn populations_are_normalized_along_the_way() {
        let p = PulseParams::default();
        let h = |t: f64| shortcut::h_tilde_at(t, &p).unwrap();
        let grid = Grid::symmetric(1.0, 2048);
        let t =
            propagate_schrodinger(h, &CVector::basis(3, 0), &grid, &Default::default()).unwrap();
        for pk in &t.populations {
            let sum: f64 = pk.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
            assert!(pk.iter().all(|&x| (-1e-9..=1.0 + 1e-9).contains(&x)));
        }
    }

    #[test]
    fn nan_hamiltonian_is_reported() {
        let h = |t: f64| {
            let x = if t > 0.2 { f64::NAN } else { 0.0 };
            CMatrix::diag_reals(&[x, 0.0, 0.0])
        };
        let grid = Grid::symmetric(1.0, 64);
        let r = propagate_schrodinger(h, &CVector::basis(3, 0), &grid, &Default::default());
        assert!(matches!(r, Err(Error::HamiltonianEvaluation { .. })));
    }

    #[test]
    fn closed_system_limit_matches_schrodinger() {
        let p = PulseParams::default();
        let h = |t: f64| shortcut::h_tilde_at(t, &p).unwrap();
        let grid = Grid::symmetric(1.0, 2048);
        let opts = PropagateOpts {
            convergence_check: false,
            ..Default::default()
        };
        let pure = propagate_schrodinger(h, &CVector::basis(3, 0), &grid, &opts).unwrap();
        let rho0 = CVector::basis(3, 0).outer(&CVector::basis(3, 0));
        let lp = LindbladParams {
            gamma1: 0.0,
            gamma3: 0.0,
        };
        let mixed = propagate_lindblad(h, &rho0, &lp, &grid, &opts).unwrap();
        for (a, b) in pure.populations.iter().zip(&mixed.populations) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn bare_decay_is_exponential() {
        let rho0 = CVector::basis(3, 1).outer(&CVector::basis(3, 1));
        let lp = LindbladParams {
            gamma1: 0.8,
            gamma3: 1.4,
        };
        let grid = Grid::new(0.0, 1.0, 2048);
        let opts = PropagateOpts {
            convergence_check: false,
            ..Default::default()
        };
        let t = propagate_lindblad(|_| CMatrix::zeros(3), &rho0, &lp, &grid, &opts).unwrap();
        for (tk, pk) in t.times.iter().zip(&t.populations) {
            let expect = (-(lp.gamma1 + lp.gamma3) * tk).exp();
            assert!((pk[1] - expect).abs() < 1e-6, "decay mismatch at t={tk}");
        }
        // branching ratio fixes the final ground populations
        let last = t.final_populations();
        assert!((last[0] - 0.8 / 2.2 * (1.0 - (-2.2_f64).exp())).abs() < 1e-6);
        assert!(t.norm_drift < 1e-12);
    }

    #[test]
    fn lindblad_guards_inputs() {
        let grid = Grid::new(0.0, 1.0, 64);
        let lp = LindbladParams {
            gamma1: -1.0,
            gamma3: 0.0,
        };
        let rho0 = CVector::basis(3, 0).outer(&CVector::basis(3, 0));
        assert!(propagate_lindblad(
            |_| CMatrix::zeros(3),
            &rho0,
            &lp,
            &grid,
            &Default::default()
        )
        .is_err());
        let lp = LindbladParams {
            gamma1: 0.0,
            gamma3: 0.0,
        };
        let bad_trace = rho0.scale(c(0.5, 0.0));
        assert!(matches!(
            propagate_lindblad(
                |_| CMatrix::zeros(3),
                &bad_trace,
                &lp,
                &grid,
                &Default::default()
            ),
            Err(Error::InvalidParam { .. })
        ));
    }

    #[test]
    fn step_halving_converges_monotonically() {
        let p = PulseParams::default();
        let h = |t: f64| shortcut::h_tilde_at(t, &p).unwrap();
        let opts = PropagateOpts {
            convergence_check: false,
            ..Default::default()
        };
        let run = |steps: usize| {
            let grid = Grid::symmetric(1.0, steps);
            propagate_schrodinger(h, &CVector::basis(3, 0), &grid, &opts)
                .unwrap()
                .p3_final()
        };
        let reference = run(16384);
        let coarse = (run(2048) - reference).abs();
        let fine = (run(4096) - reference).abs();
        assert!(
            fine <= coarse,
            "halving the step must not worsen the result"
        );
    }
}
