//! Minimal dense complex linear algebra for dimensions up to 4, plus a
//! splittable counter-based RNG for reproducible sampling.
//!
//! Everything is stack-allocated and `Copy`; the eigensolver uses closed
//! forms for N ≤ 3 (trigonometric solution of the cubic) and cyclic
//! complex Jacobi sweeps for N = 4.

use crate::{Error, Result};
use num_complex::Complex64 as C64;

pub const MAX_DIM: usize = 4;

/// Complex column vector, N ≤ 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVector {
    dim: usize,
    v: [C64; MAX_DIM],
}

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension out of range");
        Self {
            dim,
            v: [C64::new(0.0, 0.0); MAX_DIM],
        }
    }

    pub fn from_slice(entries: &[C64]) -> Self {
        let mut out = Self::zeros(entries.len());
        out.v[..entries.len()].copy_from_slice(entries);
        out
    }

    pub fn from_reals(entries: &[f64]) -> Self {
        let mut out = Self::zeros(entries.len());
        for (slot, &x) in out.v.iter_mut().zip(entries) {
            *slot = C64::new(x, 0.0);
        }
        out
    }

    /// k-th bare basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut out = Self::zeros(dim);
        out.v[k] = C64::new(1.0, 0.0);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn dot(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim, other.dim);
        (0..self.dim).map(|i| self.v[i].conj() * other.v[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).re.sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize a zero vector");
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = *self;
        for x in out.v.iter_mut().take(self.dim) {
            *x *= c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim {
            out.v[i] += other.v[i];
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim {
            out.v[i] -= other.v[i];
        }
        out
    }

    /// |self⟩⟨other|
    pub fn outer(&self, other: &Self) -> CMatrix {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] = self.v[i] * other.v[j].conj();
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.v[..self.dim]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Multiply by a global phase so the largest-magnitude component is
    /// real and positive. Deterministic: first index attaining the max.
    pub fn phase_fixed(&self) -> Self {
        let mut k = 0;
        let mut best = 0.0;
        for i in 0..self.dim {
            let a = self.v[i].norm();
            if a > best {
                best = a;
                k = i;
            }
        }
        if best == 0.0 {
            return *self;
        }
        self.scale(self.v[k].conj() / C64::new(best, 0.0))
    }
}

impl std::ops::Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        debug_assert!(i < self.dim);
        &self.v[i]
    }
}

impl std::ops::IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        debug_assert!(i < self.dim);
        &mut self.v[i]
    }
}

/// Complex square matrix, N ≤ 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix {
    dim: usize,
    m: [[C64; MAX_DIM]; MAX_DIM],
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension out of range");
        Self {
            dim,
            m: [[C64::new(0.0, 0.0); MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.m[i][i] = C64::new(1.0, 0.0);
        }
        out
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        let mut out = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged rows");
            out.m[i][..dim].copy_from_slice(row);
        }
        out
    }

    pub fn diag_reals(entries: &[f64]) -> Self {
        let mut out = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            out.m[i][i] = C64::new(x, 0.0);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] += other.m[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] -= other.m[i][j];
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.m[i][j] *= c;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.m[i][k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..self.dim {
                    out.m[i][j] += a * other.m[k][j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &CVector) -> CVector {
        debug_assert_eq!(self.dim, v.dim());
        let mut out = CVector::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.m[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.m[i][j].norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                best = best.max(self.m[i][j].norm());
            }
        }
        best
    }

    /// Largest elementwise |M − M†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                best = best.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        best / 2.0
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| self.m[i][j].re.is_finite() && self.m[i][j].im.is_finite())
        })
    }

    pub fn column(&self, j: usize) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for i in 0..self.dim {
            out[i] = self.m[i][j];
        }
        out
    }

    fn row(&self, i: usize) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for j in 0..self.dim {
            out[j] = self.m[i][j];
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.m[i][j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.m[i][j]
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues ascending,
/// orthonormal column eigenvectors with a fixed phase convention (largest
/// component of each vector real and positive).
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

impl HermitianEig {
    /// Σ λᵢ |vᵢ⟩⟨vᵢ|
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.vectors[0].dim();
        let mut out = CMatrix::zeros(dim);
        for (val, vec) in self.values.iter().zip(&self.vectors) {
            out = out.add(&vec.outer(vec).scale(C64::new(*val, 0.0)));
        }
        out
    }
}

/// Bilinear cross product of complex 3-vectors (no conjugation); the
/// result annihilates both arguments under the plain dot product, which
/// is what a null vector of a rank-2 matrix must do against its rows.
fn cross3(a: &CVector, b: &CVector) -> CVector {
    CVector::from_slice(&[
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

fn conj3(a: &CVector) -> CVector {
    CVector::from_slice(&[a[0].conj(), a[1].conj(), a[2].conj()])
}

fn det3(m: &CMatrix) -> C64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// Eigenvalues of a 3×3 Hermitian matrix by the trigonometric solution
/// of the characteristic cubic, ascending.
fn eigvals3(a: &CMatrix) -> [f64; 3] {
    let q = a.trace().re / 3.0;
    let p1 = a[(0, 1)].norm_sqr() + a[(0, 2)].norm_sqr() + a[(1, 2)].norm_sqr();
    let d0 = a[(0, 0)].re - q;
    let d1 = a[(1, 1)].re - q;
    let d2 = a[(2, 2)].re - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q, q, q];
    }
    let mut b = *a;
    for i in 0..3 {
        b[(i, i)] -= C64::new(q, 0.0);
    }
    let b = b.scale(C64::new(1.0 / p, 0.0));
    let r = (det3(&b).re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Null vector of (A − λI) via the largest row cross product. Returns
/// `None` when the matrix is rank-deficient beyond the expected one
/// dimension (degenerate eigenvalue).
fn eigvec3(a: &CMatrix, lambda: f64, scale: f64) -> Option<CVector> {
    let mut b = *a;
    for i in 0..3 {
        b[(i, i)] -= C64::new(lambda, 0.0);
    }
    let r0 = b.row(0);
    let r1 = b.row(1);
    let r2 = b.row(2);
    let mut best: Option<CVector> = None;
    let mut best_norm = 0.0;
    for c in [cross3(&r0, &r1), cross3(&r0, &r2), cross3(&r1, &r2)] {
        let n = c.norm();
        if n > best_norm {
            best_norm = n;
            best = Some(c);
        }
    }
    let floor = 1e-12 * scale * scale;
    match best {
        Some(c) if best_norm > floor => Some(c.scale(C64::new(1.0 / best_norm, 0.0))),
        _ => None,
    }
}

/// Any unit vector orthogonal to `w` (Hermitian inner product).
fn complement_of(w: &CVector) -> CVector {
    let mut k = 0;
    let mut best = f64::INFINITY;
    for i in 0..3 {
        let a = w[i].norm();
        if a < best {
            best = a;
            k = i;
        }
    }
    let e = CVector::basis(3, k);
    let proj = w.dot(&e);
    e.sub(&w.scale(proj)).normalized()
}

fn eig3(a: &CMatrix, scale: f64) -> HermitianEig {
    let vals = eigvals3(a);
    let [lo, mid, hi] = vals;
    // the trig solution of the cubic loses ~sqrt(eps) accuracy when two
    // roots coincide, so pairs inside that floor are routed through the
    // subspace construction and every value is Rayleigh-polished below
    let deg_tol = 1e-7 * scale.max(1.0);
    let g_lo = mid - lo;
    let g_hi = hi - mid;

    let (v_lo, v_mid, v_hi);
    if g_lo <= deg_tol && g_hi <= deg_tol {
        v_lo = CVector::basis(3, 0);
        v_mid = CVector::basis(3, 1);
        v_hi = CVector::basis(3, 2);
    } else if g_lo <= deg_tol {
        // lower pair degenerate: fix the isolated top vector first
        let top = eigvec3(a, hi, scale).unwrap_or_else(|| CVector::basis(3, 2));
        let u = complement_of(&top);
        let w = cross3(&conj3(&top), &conj3(&u)).normalized();
        v_hi = top;
        v_lo = u;
        v_mid = w;
    } else if g_hi <= deg_tol {
        let bot = eigvec3(a, lo, scale).unwrap_or_else(|| CVector::basis(3, 0));
        let u = complement_of(&bot);
        let w = cross3(&conj3(&bot), &conj3(&u)).normalized();
        v_lo = bot;
        v_mid = u;
        v_hi = w;
    } else {
        // generically the two extreme eigenvalues are the best conditioned;
        // the middle vector is their Hermitian-orthogonal complement
        let bot = eigvec3(a, lo, scale).unwrap_or_else(|| CVector::basis(3, 0));
        let top = eigvec3(a, hi, scale).unwrap_or_else(|| CVector::basis(3, 2));
        let midv = cross3(&conj3(&top), &conj3(&bot)).normalized();
        v_lo = bot;
        v_mid = midv;
        v_hi = top;
    }

    // Rayleigh quotients are second order in the vector error and exact
    // on invariant subspaces, so they repair the near-degenerate values
    let mut pairs: Vec<(f64, CVector)> = [v_lo, v_mid, v_hi]
        .into_iter()
        .map(|v| (v.dot(&a.matvec(&v)).re, v.phase_fixed()))
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    HermitianEig {
        values: pairs.iter().map(|p| p.0).collect(),
        vectors: pairs.into_iter().map(|p| p.1).collect(),
    }
}

fn eig2(a: &CMatrix) -> HermitianEig {
    let p = a[(0, 0)].re;
    let q = a[(1, 1)].re;
    let b = a[(0, 1)];
    let half_sum = 0.5 * (p + q);
    let half_diff = 0.5 * (p - q);
    let rad = (half_diff * half_diff + b.norm_sqr()).sqrt();
    let lo = half_sum - rad;
    let hi = half_sum + rad;
    let vec_for = |lambda: f64| -> CVector {
        // null vector of [[p-λ, b], [b*, q-λ]]
        let c1 = CVector::from_slice(&[-b, C64::new(p - lambda, 0.0)]);
        let c2 = CVector::from_slice(&[C64::new(lambda - q, 0.0), b.conj()]);
        let v = if c1.norm() >= c2.norm() { c1 } else { c2 };
        if v.norm() == 0.0 {
            CVector::basis(2, if lambda == lo { 0 } else { 1 })
        } else {
            v.normalized()
        }
    };
    let (v_lo, v_hi) = if rad == 0.0 {
        (CVector::basis(2, 0), CVector::basis(2, 1))
    } else {
        (vec_for(lo), vec_for(hi))
    };
    HermitianEig {
        values: vec![lo, hi],
        vectors: vec![v_lo.phase_fixed(), v_hi.phase_fixed()],
    }
}

/// Cyclic complex Jacobi sweeps; only used for N = 4.
fn eig_jacobi(a: &CMatrix) -> HermitianEig {
    let n = a.dim();
    let mut m = *a;
    let mut vecs = CMatrix::identity(n);
    let scale = m.max_abs().max(1.0);
    for _ in 0..60 {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m[(i, j)].norm());
            }
        }
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / C64::new(apq.norm(), 0.0);
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G: identity except G[p][p]=c, G[p][q]=s·phase, G[q][p]=-s·phase*, G[q][q]=c
                let mut g = CMatrix::identity(n);
                g[(p, p)] = C64::new(c, 0.0);
                g[(p, q)] = phase * s;
                g[(q, p)] = -phase.conj() * s;
                g[(q, q)] = C64::new(c, 0.0);
                m = g.adjoint().matmul(&m).matmul(&g);
                vecs = vecs.matmul(&g);
            }
        }
    }
    let mut pairs: Vec<(f64, CVector)> = (0..n).map(|j| (m[(j, j)].re, vecs.column(j))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    HermitianEig {
        values: pairs.iter().map(|p| p.0).collect(),
        vectors: pairs.iter().map(|p| p.1.phase_fixed()).collect(),
    }
}

/// Eigendecomposition of a Hermitian matrix (N ≤ 4).
///
/// `tol` bounds the accepted elementwise deviation from Hermiticity;
/// the decomposition itself is performed on (M + M†)/2.
pub fn hermitian_eig(m: &CMatrix, tol: f64) -> Result<HermitianEig> {
    let dev = m.hermiticity_deviation();
    if dev > tol {
        return Err(Error::HermiticityViolation { max_dev: dev, tol });
    }
    let a = m.hermitian_part();
    let scale = a.max_abs();
    let out = match a.dim() {
        1 => HermitianEig {
            values: vec![a[(0, 0)].re],
            vectors: vec![CVector::basis(1, 0)],
        },
        2 => eig2(&a),
        3 => eig3(&a, scale),
        _ => eig_jacobi(&a),
    };
    Ok(out)
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Counter-based splittable generator.
///
/// Stream `k` of a master seed is derived arithmetically, so run `k` of a
/// Monte Carlo batch owns a reproducible sequence independent of every
/// other run; no state is ever shared between threads.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Generator for sub-stream `stream` of `master`.
    pub fn stream(master: u64, stream: u64) -> Self {
        Self::new(mix64(
            master ^ mix64(stream.wrapping_mul(GOLDEN).wrapping_add(GOLDEN)),
        ))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform on [−1, 1).
    pub fn uniform_pm1(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Uniform on [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
