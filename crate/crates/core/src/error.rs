use thiserror::Error;

/// Errors surfaced by the numerics and drive-synthesis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix not Hermitian within tolerance: max deviation {max_dev:e}, tol {tol:e}")]
    HermiticityViolation { max_dev: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("coefficient mask not symmetric")]
    MaskAsymmetry,

    #[error("moving basis discontinuous at t = {t}: |overlap| = {overlap} for level {level}")]
    BasisJump { t: f64, level: usize, overlap: f64 },

    #[error("spectrum nearly degenerate: gap {gap:e} below tolerance {tol:e}")]
    NearDegeneracy { gap: f64, tol: f64 },

    #[error("dressing angle underflow at t = {t} (gamma = {gamma:e})")]
    GammaUnderflow { t: f64, gamma: f64 },

    #[error("cotangent singularity at theta = {theta}")]
    CotangentSingularity { theta: f64 },

    #[error("hamiltonian evaluated to a non-finite value at t = {t}")]
    HamiltonianEvaluation { t: f64 },

    #[error("density matrix lost positivity at t = {t}: min eigenvalue {min_eig:e}")]
    PositivityViolation { t: f64, min_eig: f64 },

    #[error("missing configuration: {0}")]
    ConfigMissing(&'static str),

    #[error("invalid parameter {name} = {value}: must satisfy {constraint}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
}
