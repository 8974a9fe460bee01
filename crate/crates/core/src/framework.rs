//! General machinery for driving a system exactly along an arbitrary
//! orthonormal moving basis: elementwise coefficient masks combining a
//! bare Hamiltonian with its counterdiabatic term, numerical construction
//! of the transitionless generator from the basis itself, and boundary
//! coincidence checks.

use crate::numkit::{CMatrix, CVector, MAX_DIM};
use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// Elementwise multipliers: entry (l,r) of the combined operator is
/// λ_{l,r}·H₀_{l,r} − κ_{l,r}·Hcd_{l,r}. Both masks must be symmetric so
/// the result stays Hermitian.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientMask {
    dim: usize,
    lambda: [[f64; MAX_DIM]; MAX_DIM],
    kappa: [[f64; MAX_DIM]; MAX_DIM],
}

impl CoefficientMask {
    pub fn new(lambda: &[&[f64]], kappa: &[&[f64]]) -> Result<Self> {
        let dim = lambda.len();
        if kappa.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: kappa.len(),
            });
        }
        let mut out = Self {
            dim,
            lambda: [[0.0; MAX_DIM]; MAX_DIM],
            kappa: [[0.0; MAX_DIM]; MAX_DIM],
        };
        for i in 0..dim {
            if lambda[i].len() != dim || kappa[i].len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: lambda[i].len(),
                });
            }
            out.lambda[i][..dim].copy_from_slice(lambda[i]);
            out.kappa[i][..dim].copy_from_slice(kappa[i]);
        }
        for i in 0..dim {
            for j in 0..dim {
                if out.lambda[i][j] != out.lambda[j][i] || out.kappa[i][j] != out.kappa[j][i] {
                    return Err(Error::MaskAsymmetry);
                }
            }
        }
        Ok(out)
    }

    pub fn ones_zeros(dim: usize) -> Self {
        let mut lambda = [[0.0; MAX_DIM]; MAX_DIM];
        for row in lambda.iter_mut().take(dim) {
            for x in row.iter_mut().take(dim) {
                *x = 1.0;
            }
        }
        Self {
            dim,
            lambda,
            kappa: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Combine a bare Hamiltonian and its counterdiabatic term entrywise:
/// out_{l,r} = λ_{l,r}·H₀_{l,r} − κ_{l,r}·Hcd_{l,r}.
pub fn intermediate_h(h0: &CMatrix, hcd: &CMatrix, mask: &CoefficientMask) -> Result<CMatrix> {
    let dim = h0.dim();
    if hcd.dim() != dim || mask.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: hcd.dim().min(mask.dim()),
        });
    }
    let mut out = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = h0[(i, j)] * mask.lambda[i][j] - hcd[(i, j)] * mask.kappa[i][j];
        }
    }
    Ok(out)
}

/// One sample of a moving orthonormal basis: level energies and the
/// matching eigenvectors, in a fixed level order.
#[derive(Debug, Clone)]
pub struct BasisFrame {
    pub energies: Vec<f64>,
    pub vectors: Vec<CVector>,
}

impl BasisFrame {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g = self.vectors[i].dot(&self.vectors[j]);
                let expect = C64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
                worst = worst.max((g - expect).norm());
            }
        }
        worst
    }
}

/// Phase handling when differentiating a moving basis.
///
/// `Literal` trusts the basis callable to produce smoothly varying phases
/// and differentiates its output as-is; required when the basis phases
/// themselves carry physics (the dressed Λ basis does). `ParallelTransport`
/// re-phases the neighbours so ⟨v(t)|v(t±h)⟩ is real-positive, which wipes
/// any phase convention the callable may have and enforces ⟨v|v̇⟩ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    Literal,
    ParallelTransport,
}

pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Transitionless generator for the moving basis at time `t`:
/// Σₙ Eₙ|vₙ⟩⟨vₙ| + i Σₙ |v̇ₙ⟩⟨vₙ| with v̇ by central difference of step
/// `h`. Returns the generator and a Richardson error estimate from a
/// second pass at 2h.
pub fn numeric_transitionless(
    basis: impl Fn(f64) -> BasisFrame,
    t: f64,
    h: f64,
    gauge: Gauge,
) -> Result<(CMatrix, f64)> {
    let fine = transitionless_once(&basis, t, h, gauge)?;
    let coarse = transitionless_once(&basis, t, 2.0 * h, gauge)?;
    // central differences are O(h²): the h-result error is ~|fine−coarse|/3
    let err = fine.sub(&coarse).max_abs() / 3.0;
    Ok((fine, err))
}

fn transitionless_once(
    basis: &impl Fn(f64) -> BasisFrame,
    t: f64,
    h: f64,
    gauge: Gauge,
) -> Result<CMatrix> {
    let here = basis(t);
    let fwd = basis(t + h);
    let bwd = basis(t - h);
    let n = here.dim();
    if fwd.dim() != n || bwd.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: fwd.dim().min(bwd.dim()),
        });
    }
    let mut out = CMatrix::zeros(here.vectors[0].dim());
    for k in 0..n {
        let v = &here.vectors[k];
        let mut vf = fwd.vectors[k];
        let mut vb = bwd.vectors[k];
        for (w, label) in [(&mut vf, t + h), (&mut vb, t - h)] {
            let ov = v.dot(w);
            let mag = ov.norm();
            if mag < 0.9 {
                return Err(Error::BasisJump {
                    t: label,
                    level: k,
                    overlap: mag,
                });
            }
            if gauge == Gauge::ParallelTransport {
                *w = w.scale(ov.conj() / C64::new(mag, 0.0));
            }
        }
        let vdot = vf.sub(&vb).scale(C64::new(1.0 / (2.0 * h), 0.0));
        out = out.add(&v.outer(v).scale(C64::new(here.energies[k], 0.0)));
        out = out.add(&vdot.outer(v).scale(C64::new(0.0, 1.0)));
    }
    Ok(out)
}

/// Matrix elements of a generator in the bare basis. The generator is
/// already stored in that basis, so this is a named view that exists to
/// make zero-coupling conditions first-class in tests and diagnostics.
pub fn f_matrix(h_tilde: &CMatrix) -> CMatrix {
    *h_tilde
}

/// True when each basis vector of `a` coincides with its counterpart in
/// `b` up to phase: |⟨aₙ|bₙ⟩| ≥ 1 − tol for every level.
pub fn boundary_check(a: &BasisFrame, b: &BasisFrame, tol: f64) -> bool {
    a.vectors
        .iter()
        .zip(&b.vectors)
        .all(|(u, v)| u.dot(v).norm() >= 1.0 - tol)
}
