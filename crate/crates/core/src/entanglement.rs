//! Two-qubit concurrence.
//!
//! Matrices use the basis `{up up, up down, down up, down down}` with the
//! first qubit being the first site argument. The general route follows
//! Wootters; the closed forms for the three initial families are alongside.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::jacobi::{hermitian_eigen, singular_values, CMatrix};
use crate::magnon::{
    bessel, phi_b1, phi_unentangled, InitialState, StateKind, Time, TwoMagnonField, UMode,
};

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;
const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// A Hermitian, positive semidefinite 4×4 matrix on two sites.
///
/// [`TwoSiteDensityMatrix::new`] also requires unit trace. The closed forms that
/// set `u = 1` overshoot the trace, so [`TwoSiteDensityMatrix::unnormalized`]
/// exists for them.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteDensityMatrix {
    entries: CMatrix<4>,
}

impl TwoSiteDensityMatrix {
    pub fn new(entries: CMatrix<4>) -> Result<Self> {
        let rho = Self::unnormalized(entries)?;
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return domain(format!("density matrix trace is {trace}, expected 1"));
        }
        Ok(rho)
    }

    pub fn unnormalized(entries: CMatrix<4>) -> Result<Self> {
        for r in 0..4 {
            for c in r..4 {
                let gap = (entries[(r, c)] - entries[(c, r)].conj()).norm();
                if !gap.is_finite() || gap > HERMITIAN_TOLERANCE {
                    return domain(format!("matrix is not Hermitian at ({r}, {c}): gap {gap:e}"));
                }
            }
        }
        let lowest = hermitian_eigen(&entries).eigenvalues.min();
        if lowest < -NEGATIVE_EIGENVALUE_TOLERANCE {
            return domain(format!("matrix has negative eigenvalue {lowest:e}"));
        }
        Ok(Self { entries })
    }

    /// `|psi><psi|` for a normalized two-qubit vector.
    pub fn from_pure(psi: [Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(psi);
        Self::new(v * v.adjoint())
    }

    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Result<Self> {
        Self::new(CMatrix::<4>::from_fn(|r, c| rows[r][c]))
    }

    pub fn matrix(&self) -> &CMatrix<4> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `<psi| rho |psi>`.
    pub fn expectation(&self, psi: &[Complex64; 4]) -> f64 {
        let v = nalgebra::Vector4::from(*psi);
        (v.adjoint() * self.entries * v)[(0, 0)].re
    }

    pub fn concurrence(&self) -> f64 {
        wootters_concurrence(self)
    }
}

/// `sigma_y (x) sigma_y`, which is real.
fn spin_flip() -> CMatrix<4> {
    let mut y = CMatrix::<4>::zeros();
    y[(0, 3)] = Complex64::new(-1.0, 0.0);
    y[(1, 2)] = Complex64::new(1.0, 0.0);
    y[(2, 1)] = Complex64::new(1.0, 0.0);
    y[(3, 0)] = Complex64::new(-1.0, 0.0);
    y
}

/// Wootters concurrence `max(0, s1 - s2 - s3 - s4)` clamped to `[0, 1]`.
///
/// The `s_k` are the square roots of the eigenvalues of `rho rho~`. They are
/// obtained as the singular values of `sqrt(rho) Y conj(sqrt(rho))`, which
/// avoids squaring and re-rooting small eigenvalues.
pub fn wootters_concurrence(rho: &TwoSiteDensityMatrix) -> f64 {
    let eig = hermitian_eigen(&rho.entries);
    let v = &eig.eigenvectors;
    let roots = eig.eigenvalues.map(|x| Complex64::new(x.max(0.0).sqrt(), 0.0));
    let root = v * CMatrix::<4>::from_diagonal(&roots) * v.adjoint();
    let s = singular_values(&(root * spin_flip() * root.conjugate()));
    (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0)
}

/// `2 |phi_i| |phi_j|` for a state with at most one magnon.
pub fn concurrence_one_magnon(phi_i: Complex64, phi_j: Complex64) -> f64 {
    2.0 * phi_i.norm() * phi_j.norm()
}

/// Two-site matrix of `alpha |F> + beta |one magnon>` with coherences between
/// the vacuum and the magnon dropped. `weight` is `|beta|^2` (or 1 for a pure
/// one-magnon state).
pub fn one_magnon_rho(phi_i: Complex64, phi_j: Complex64, weight: f64) -> Result<TwoSiteDensityMatrix> {
    let mut m = CMatrix::<4>::zeros();
    let (pi, pj) = (weight * phi_i.norm_sqr(), weight * phi_j.norm_sqr());
    m[(0, 0)] = Complex64::new(1.0 - pi - pj, 0.0);
    m[(1, 1)] = Complex64::new(pj, 0.0);
    m[(2, 2)] = Complex64::new(pi, 0.0);
    m[(1, 2)] = weight * phi_j * phi_i.conj();
    m[(2, 1)] = m[(1, 2)].conj();
    TwoSiteDensityMatrix::new(m)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        domain(format!("{name} must lie in [0, 1], got {p}"))
    }
}

/// `2 |beta|^2 |J_{i-l}(T) J_{j-l}(T)|` for the unentangled family.
pub fn concurrence_unentangled(i: i64, j: i64, l: i64, t: Time, beta2: f64) -> Result<f64> {
    check_probability("beta2", beta2)?;
    Ok(2.0 * beta2 * (bessel(i - l, t) * bessel(j - l, t)).abs())
}

/// Dephased two-site matrix of the unentangled family.
pub fn rho_unentangled(i: i64, j: i64, state: &InitialState, t: Time) -> Result<TwoSiteDensityMatrix> {
    state.expect(StateKind::Unentangled)?;
    let l = state.l();
    one_magnon_rho(phi_unentangled(i, l, t), phi_unentangled(j, l, t), state.beta().norm_sqr())
}

/// Two-site matrix of the B1 family, which stays in the one-magnon sector.
pub fn rho_b1(i: i64, j: i64, state: &InitialState, t: Time) -> Result<TwoSiteDensityMatrix> {
    one_magnon_rho(phi_b1(i, state, t)?, phi_b1(j, state, t)?, 1.0)
}

/// `2 |phi_i phi_j|` with the B1 wavefunction.
pub fn concurrence_b1(i: i64, j: i64, state: &InitialState, t: Time) -> Result<f64> {
    Ok(concurrence_one_magnon(phi_b1(i, state, t)?, phi_b1(j, state, t)?))
}

/// Concurrence of the code pair itself for a maximally entangled B1 start,
/// `|J_0 + i^s J_s|^2` with `s = l - m`.
pub fn concurrence_b1_code_pair(s: i64, t: Time) -> f64 {
    let (j0, js) = (bessel(0, t), bessel(s, t));
    if s.rem_euclid(2) == 0 {
        let sign = if (s / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        (j0 + sign * js).powi(2)
    } else {
        j0 * j0 + js * js
    }
}

/// Two-site matrix of the B2 family at `(i, j)`, `i > j`.
///
/// With [`UMode::Exact`] this is the reduced density matrix of the evolved
/// state. With [`UMode::PaperApprox`] the `(up, up)` population uses `u = 1`
/// and the result is only checked for Hermiticity and positivity.
pub fn build_rho_b2(i: i64, j: i64, state: &InitialState, t: Time, u_mode: UMode) -> Result<TwoSiteDensityMatrix> {
    let e = TwoMagnonField::for_state(state, t)?.elements(i, j, u_mode)?;
    let (alpha, beta) = (state.alpha(), state.beta());
    let b2 = beta.norm_sqr();
    let mut m = CMatrix::<4>::zeros();
    m[(0, 0)] = Complex64::new(alpha.norm_sqr() + b2 * e.u, 0.0);
    m[(1, 1)] = Complex64::new(b2 * e.w2, 0.0);
    m[(2, 2)] = Complex64::new(b2 * e.w1, 0.0);
    m[(3, 3)] = Complex64::new(b2 * e.v, 0.0);
    m[(1, 2)] = b2 * e.z;
    m[(2, 1)] = b2 * e.z.conj();
    m[(0, 3)] = alpha * beta.conj() * e.phi.conj();
    m[(3, 0)] = m[(0, 3)].conj();
    match u_mode {
        UMode::Exact => TwoSiteDensityMatrix::new(m),
        UMode::PaperApprox => TwoSiteDensityMatrix::unnormalized(m),
    }
}

/// Closed-form B2 concurrence at `(i, j)`, `i > j`: the larger of the two
/// X-matrix branches
/// `2|beta|^2 |z| - 2|beta||phi| sqrt(|alpha|^2 + |beta|^2 u)` and
/// `2|alpha beta phi| - 2|beta|^2 sqrt(w1 w2)`, floored at zero.
pub fn concurrence_b2(i: i64, j: i64, state: &InitialState, t: Time, u_mode: UMode) -> Result<f64> {
    let e = TwoMagnonField::for_state(state, t)?.elements(i, j, u_mode)?;
    let (a, b) = (state.alpha().norm(), state.beta().norm());
    let phi = e.phi.norm();
    let hopping = 2.0 * b * b * e.z.norm() - 2.0 * b * phi * (a * a + b * b * e.u).max(0.0).sqrt();
    let pairing = 2.0 * a * b * phi - 2.0 * b * b * (e.w1 * e.w2).max(0.0).sqrt();
    Ok(hopping.max(pairing).max(0.0))
}
