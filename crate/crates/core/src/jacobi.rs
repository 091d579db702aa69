//! Cyclic Jacobi routines for small dense complex matrices.
//!
//! Rotations are skipped for off-diagonal entries that are exactly zero, so
//! block structure in the input (the X-shaped two-qubit matrices that the
//! closed forms produce, for instance) survives the decomposition exactly.
//! The stopping test is relative, `|a_pq| <= eps * sqrt(|a_pp a_qq|)`, which
//! keeps small eigenvalues of graded positive matrices accurate to working
//! precision relative to themselves rather than to the largest one.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

pub type CMatrix<const N: usize> = SMatrix<Complex64, N, N>;

const MAX_SWEEPS: usize = 80;

/// `A = V diag(eigenvalues) V†`, eigenvalues in no particular order.
#[derive(Debug, Clone)]
pub struct HermitianEigen<const N: usize> {
    pub eigenvalues: SVector<f64, N>,
    pub eigenvectors: CMatrix<N>,
}

/// A 2×2 unitary acting on the `(p, q)` plane.
#[derive(Debug, Clone, Copy)]
struct PlaneRotation {
    pp: Complex64,
    pq: Complex64,
    qp: Complex64,
    qq: Complex64,
    /// `tan` of the rotation angle; the eigenvalue shift is `t |a_pq|`.
    t: f64,
}

impl PlaneRotation {
    /// Rotation diagonalizing the Hermitian block `[[app, apq], [conj(apq), aqq]]`.
    fn annihilating(app: f64, aqq: f64, apq: Complex64) -> Option<Self> {
        let h = apq.norm();
        if h == 0.0 || !h.is_finite() || h <= f64::EPSILON * (app * aqq).abs().sqrt() {
            return None;
        }
        let phase = apq / h;
        let theta = (aqq - app) / (2.0 * h);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        // signum(0.0) is 1.0, so the degenerate case rotates by pi/4.
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let back = phase.conj();
        Some(Self {
            pp: Complex64::new(c, 0.0),
            pq: Complex64::new(s, 0.0),
            qp: -back * s,
            qq: back * c,
            t,
        })
    }

    fn apply_right<const N: usize>(&self, m: &mut CMatrix<N>, p: usize, q: usize) {
        for k in 0..N {
            let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
            m[(k, p)] = mkp * self.pp + mkq * self.qp;
            m[(k, q)] = mkp * self.pq + mkq * self.qq;
        }
    }

    fn apply_left_adjoint<const N: usize>(&self, m: &mut CMatrix<N>, p: usize, q: usize) {
        for k in 0..N {
            let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
            m[(p, k)] = self.pp.conj() * mpk + self.qp.conj() * mqk;
            m[(q, k)] = self.pq.conj() * mpk + self.qq.conj() * mqk;
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix. Only the upper triangle is read.
pub fn hermitian_eigen<const N: usize>(matrix: &CMatrix<N>) -> HermitianEigen<N> {
    let mut a = *matrix;
    for p in 0..N {
        a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
        for q in p + 1..N {
            a[(q, p)] = a[(p, q)].conj();
        }
    }
    let mut v = CMatrix::<N>::identity();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in p + 1..N {
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let Some(rot) = PlaneRotation::annihilating(app, aqq, a[(p, q)]) else {
                    continue;
                };
                let h = a[(p, q)].norm();
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(app - rot.t * h, 0.0);
                a[(q, q)] = Complex64::new(aqq + rot.t * h, 0.0);
                rot.apply_right(&mut v, p, q);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }
    HermitianEigen {
        eigenvalues: SVector::<f64, N>::from_fn(|k, _| a[(k, k)].re),
        eigenvectors: v,
    }
}

/// Singular values by one-sided (Hestenes) Jacobi, in descending order.
///
/// Columns are rotated until mutually orthogonal; the singular values are then
/// their norms, with absolute error of order `eps * ||m||`.
pub fn singular_values<const N: usize>(matrix: &CMatrix<N>) -> [f64; N] {
    let mut w = *matrix;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in p + 1..N {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                if let Some(rot) = PlaneRotation::annihilating(alpha, beta, gamma) {
                    rot.apply_right(&mut w, p, q);
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values = [0.0; N];
    for (k, v) in values.iter_mut().enumerate() {
        *v = w.column(k).norm();
    }
    values.sort_by(|a, b| b.total_cmp(a));
    values
}
