//! State-recovery fidelities, their Bloch-sphere averages and the time of
//! first arrival.
//!
//! Transport distances are measured from the code: `r` sites from `l` for the
//! unentangled family, and the pair `(l + r, m + r)` (or the single site
//! `m + r`) for the Bell families, with `s = l - m`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::magnon::{bessel, i_pow, InitialState, StateKind, Time, TwoMagnonField, UMode};
use crate::quadrature::gauss_legendre_on;

/// Reduced Planck constant in eV s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

const BLOCH_NODES: usize = 64;
const BLOCH_TOLERANCE: f64 = 1e-8;
const PEAK_TOLERANCE: f64 = 1e-4;

/// Whether coherences between sectors with different magnon numbers are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Coherence {
    /// The exact reduced state.
    #[default]
    Full,
    /// Sector coherences dropped.
    Dephased,
}

fn check_probability(alpha2: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha2) {
        Ok(())
    } else {
        domain(format!("alpha2 must lie in [0, 1], got {alpha2}"))
    }
}

fn parity(r: i64) -> f64 {
    if r.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fidelity of recovering `alpha|up> + beta|down>` at `l + r` for the
/// unentangled family, `|alpha|^2 = alpha2`.
pub fn fid_site_unentangled(r: i64, t: Time, alpha2: f64, coherence: Coherence) -> Result<f64> {
    check_probability(alpha2)?;
    let (a, b) = (alpha2, 1.0 - alpha2);
    let jr = bessel(r, t);
    let dephased = a + b * (b - a) * jr * jr;
    Ok(match coherence {
        Coherence::Dephased => dephased,
        Coherence::Full => dephased + 2.0 * a * b * (i_pow(r) * jr).re,
    })
}

/// Bloch average of [`fid_site_unentangled`] in dephased form: `1/2 + J_r^2 / 6`.
pub fn fid_avg_unentangled(r: i64, t: Time) -> f64 {
    0.5 + bessel(r, t).powi(2) / 6.0
}

/// Bloch average of the exact single-site fidelity, which adds `Re(i^r J_r) / 3`.
pub fn fid_avg_unentangled_full(r: i64, t: Time) -> f64 {
    fid_avg_unentangled(r, t) + (i_pow(r) * bessel(r, t)).re / 3.0
}

/// Single-site fidelity at `m + r` for a B1 state:
/// `|alpha|^2 + (|beta|^2 - |alpha|^2) |phi_{m+r}|^2`.
pub fn fid_site_b1(r: i64, state: &InitialState, t: Time) -> Result<f64> {
    let p = crate::magnon::phi_b1(state.m() + r, state, t)?.norm_sqr();
    let (a, b) = (state.alpha().norm_sqr(), state.beta().norm_sqr());
    Ok(a + (b - a) * p)
}

/// `1/2 + (J_{r-s}^2 - J_r^2) / 6`.
pub fn fid_avg_b1(r: i64, s: i64, t: Time) -> f64 {
    0.5 + (bessel(r - s, t).powi(2) - bessel(r, t).powi(2)) / 6.0
}

/// Two-site fidelity for the B1 family against the conjugate code,
/// `|2 alpha beta J_r + alpha^2 i^s J_{r+s} + beta^2 i^{-s} J_{r-s}|^2`.
///
/// This is `|alpha phi_{l+r} + beta phi_{m+r}|^2`, the overlap with
/// `beta*|up down> + alpha*|down up>` on `(l + r, m + r)`. It coincides with
/// [`pairfid_b1_code`] only when `alpha = beta` up to a real factor.
pub fn pairfid_b1(r: i64, s: i64, t: Time, alpha: Complex64, beta: Complex64) -> f64 {
    let amplitude = 2.0 * alpha * beta * bessel(r, t)
        + alpha * alpha * i_pow(s) * bessel(r + s, t)
        + beta * beta * i_pow(-s) * bessel(r - s, t);
    amplitude.norm_sqr()
}

/// `(J_{r-s}^2 + J_{r+s}^2) / 3 + 2 J_r^2 / 3`.
pub fn pairfid_avg_b1(r: i64, s: i64, t: Time) -> f64 {
    (bessel(r - s, t).powi(2) + bessel(r + s, t).powi(2)) / 3.0 + 2.0 * bessel(r, t).powi(2) / 3.0
}

/// Overlap of the pair `(l + r, m + r)` with the translated code
/// `alpha|up down> + beta|down up>`:
/// `|J_r + conj(alpha) beta i^{-s} J_{r-s} + alpha conj(beta) i^s J_{r+s}|^2`.
pub fn pairfid_b1_code(r: i64, s: i64, t: Time, alpha: Complex64, beta: Complex64) -> f64 {
    let amplitude = Complex64::new(bessel(r, t), 0.0)
        + alpha.conj() * beta * i_pow(-s) * bessel(r - s, t)
        + alpha * beta.conj() * i_pow(s) * bessel(r + s, t);
    amplitude.norm_sqr()
}

/// `J_r^2 + (J_{r-s}^2 + J_{r+s}^2) / 6`.
pub fn pairfid_avg_b1_code(r: i64, s: i64, t: Time) -> f64 {
    bessel(r, t).powi(2) + (bessel(r - s, t).powi(2) + bessel(r + s, t).powi(2)) / 6.0
}

/// Single-site fidelity at `m + r` for a B2 state:
/// `|alpha|^2 + |beta|^2 (|beta|^2 - |alpha|^2) eta_ii`.
pub fn fid_site_b2(r: i64, state: &InitialState, t: Time) -> Result<f64> {
    let field = TwoMagnonField::for_state(state, t)?;
    let occupation = field.occupation(state.m() + r);
    let (a, b) = (state.alpha().norm_sqr(), state.beta().norm_sqr());
    Ok(a + b * (b - a) * occupation)
}

/// `1/2 + (J_{r-s}^2 + J_r^2) / 6`.
pub fn fid_avg_b2(r: i64, s: i64, t: Time) -> f64 {
    0.5 + (bessel(r - s, t).powi(2) + bessel(r, t).powi(2)) / 6.0
}

/// `X = J_r^2 - J_{r-s} J_{r+s}`, so that `phi_{l+r, m+r} = (-1)^r X`.
fn pair_overlap(r: i64, s: i64, t: Time) -> f64 {
    bessel(r, t).powi(2) - bessel(r - s, t) * bessel(r + s, t)
}

/// Two-site fidelity of the B2 family on `(l + r, m + r)`:
/// `|alpha|^2 c + |beta|^4 X^2 + 2 |alpha beta|^2 (-1)^r X`, where `c = 1`
/// for [`UMode::PaperApprox`] and `c = |alpha|^2 + |beta|^2 u` for [`UMode::Exact`].
pub fn pairfid_b2(r: i64, s: i64, t: Time, alpha: Complex64, beta: Complex64, u_mode: UMode) -> f64 {
    let (a, b) = (alpha.norm_sqr(), beta.norm_sqr());
    let x = pair_overlap(r, s, t);
    let vacuum = match u_mode {
        UMode::PaperApprox => 1.0,
        UMode::Exact => a + b * pair_vacuum(r, s, t),
    };
    a * vacuum + b * b * x * x + 2.0 * a * b * parity(r) * x
}

/// `u` on `(l + r, m + r)`: `1 - 2 J_r^2 - J_{r+s}^2 - J_{r-s}^2 + X^2`.
fn pair_vacuum(r: i64, s: i64, t: Time) -> f64 {
    let x = pair_overlap(r, s, t);
    1.0 - 2.0 * bessel(r, t).powi(2) - bessel(r + s, t).powi(2) - bessel(r - s, t).powi(2) + x * x
}

/// Bloch average of [`pairfid_b2`]. With `u = 1` this is
/// `1/2 + X (X + (-1)^r) / 3`, which exceeds 1 near `r = 0, T = 0`; the exact
/// form is `1/3 + u/6 + X^2/3 + (-1)^r X / 3`.
pub fn pairfid_avg_b2(r: i64, s: i64, t: Time, u_mode: UMode) -> f64 {
    let x = pair_overlap(r, s, t);
    match u_mode {
        UMode::PaperApprox => 0.5 + x * (x + parity(r)) / 3.0,
        UMode::Exact => 1.0 / 3.0 + pair_vacuum(r, s, t) / 6.0 + x * x / 3.0 + parity(r) * x / 3.0,
    }
}

fn bloch_rule(f: &(dyn Fn(Complex64, Complex64) -> f64 + Sync), n: usize) -> f64 {
    let (xs, wx) = gauss_legendre_on(n, -1.0, 1.0);
    let (phis, wphi) = gauss_legendre_on(n, 0.0, std::f64::consts::TAU);
    let total: f64 = xs
        .par_iter()
        .zip(&wx)
        .map(|(&x, &w)| {
            let a = ((1.0 + x) / 2.0).sqrt();
            let b = ((1.0 - x) / 2.0).sqrt();
            let ring: f64 = phis
                .iter()
                .zip(&wphi)
                .map(|(&phi, &v)| v * f(Complex64::new(a, 0.0), Complex64::from_polar(b, phi)))
                .sum();
            w * ring
        })
        .sum();
    total / (4.0 * std::f64::consts::PI)
}

/// Uniform average over codes `alpha = cos(theta/2)`, `beta = sin(theta/2) e^{i phi}`.
///
/// Tensor Gauss-Legendre in `cos(theta)` and `phi`, 64 nodes each. A second
/// pass with twice the nodes must agree within `1e-8`.
pub fn bloch_average<F>(f: F) -> Result<f64>
where
    F: Fn(Complex64, Complex64) -> f64 + Sync,
{
    let coarse = bloch_rule(&f, BLOCH_NODES);
    let fine = bloch_rule(&f, 2 * BLOCH_NODES);
    if !coarse.is_finite() || (coarse - fine).abs() > BLOCH_TOLERANCE * fine.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "Bloch average did not converge: {coarse} with {BLOCH_NODES} nodes, {fine} with {}",
            2 * BLOCH_NODES
        )));
    }
    Ok(coarse)
}

/// `hbar / K` in seconds for a coupling `K` in eV.
pub fn timescale_seconds(coupling_ev: f64) -> Result<f64> {
    if coupling_ev > 0.0 && coupling_ev.is_finite() {
        Ok(HBAR_EV_S / coupling_ev)
    } else {
        domain(format!("coupling must be positive, got {coupling_ev}"))
    }
}

/// Evenly spaced times `0, T_max / steps, ..., T_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return domain(format!("T_max must be positive, got {t_max}"));
        }
        if steps < 2 {
            return domain(format!("a grid needs at least 2 steps, got {steps}"));
        }
        Ok(Self { t_max, steps })
    }

    /// `[0, 120]` in steps of 0.2.
    pub fn standard() -> Self {
        Self { t_max: 120.0, steps: 600 }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn times(&self) -> Vec<Time> {
        (0..=self.steps)
            .map(|k| Time::new(self.t_max * k as f64 / self.steps as f64).expect("grid point"))
            .collect()
    }
}

/// The Bloch-averaged quantities that can be sampled as curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Average {
    SiteUnentangled(Coherence),
    SiteB1,
    SiteB2,
    PairB1,
    PairB1Code,
    PairB2(UMode),
}

impl Average {
    pub fn family(&self) -> StateKind {
        match self {
            Average::SiteUnentangled(_) => StateKind::Unentangled,
            Average::SiteB1 | Average::PairB1 | Average::PairB1Code => StateKind::BellB1,
            Average::SiteB2 | Average::PairB2(_) => StateKind::BellB2,
        }
    }

    /// Averaged fidelity at distance `r`; `s` is ignored for the unentangled family.
    pub fn evaluate(&self, r: i64, s: i64, t: Time) -> f64 {
        match *self {
            Average::SiteUnentangled(Coherence::Dephased) => fid_avg_unentangled(r, t),
            Average::SiteUnentangled(Coherence::Full) => fid_avg_unentangled_full(r, t),
            Average::SiteB1 => fid_avg_b1(r, s, t),
            Average::SiteB2 => fid_avg_b2(r, s, t),
            Average::PairB1 => pairfid_avg_b1(r, s, t),
            Average::PairB1Code => pairfid_avg_b1_code(r, s, t),
            Average::PairB2(u_mode) => pairfid_avg_b2(r, s, t, u_mode),
        }
    }
}

/// Samples `(T, value)` of a fidelity against time.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    r: i64,
    s: i64,
    family: StateKind,
    samples: Vec<(f64, f64)>,
    source: Option<Average>,
}

impl FidelityCurve {
    /// A curve from arbitrary samples; times must increase strictly.
    pub fn from_samples(r: i64, s: i64, family: StateKind, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.windows(2).any(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater)) {
            return domain("curve times must increase strictly");
        }
        Ok(Self { r, s, family, samples, source: None })
    }

    /// Samples an averaged fidelity over `grid`, evaluating points in parallel.
    pub fn averaged(kind: Average, r: i64, s: i64, grid: &TimeGrid) -> Self {
        let s = if kind.family() == StateKind::Unentangled { 0 } else { s };
        let samples = grid
            .times()
            .into_par_iter()
            .map(|t| (t.get(), kind.evaluate(r, s, t)))
            .collect();
        Self { r, s, family: kind.family(), samples, source: Some(kind) }
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn family(&self) -> StateKind {
        self.family
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }
}

/// Location and height of a local maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
}

/// First interior local maximum of the curve.
///
/// The bracketing sample triple is found with a three-point test (a run of
/// equal samples counts as one point); the peak is
/// then refined by golden-section search to `1e-4` in `T` when the curve came
/// from a closed form, or by a parabola through the triple otherwise.
pub fn first_maximum(curve: &FidelityCurve) -> Option<Peak> {
    let v = &curve.samples;
    let (k, end) = first_rise_then_fall(v)?;
    let (lo, mid, hi) = (v[k - 1], v[(k + end) / 2], v[end + 1]);
    match curve.source {
        Some(kind) => {
            let f = |t: f64| kind.evaluate(curve.r, curve.s, Time::new(t).expect("bracket time"));
            Some(golden_section(f, lo.0, hi.0))
        }
        None => Some(parabola_vertex(lo, mid, hi)),
    }
}

/// Indices `(k, end)` of the first run `v[k..=end]` of equal values that is
/// strictly above both neighbours. Runs matter because flat stretches of a
/// curve round to the same double.
fn first_rise_then_fall(v: &[(f64, f64)]) -> Option<(usize, usize)> {
    let mut k = 1;
    while k + 1 < v.len() {
        if v[k].1 > v[k - 1].1 {
            let mut end = k;
            while end + 1 < v.len() && v[end + 1].1 == v[k].1 {
                end += 1;
            }
            if end + 1 < v.len() && v[end + 1].1 < v[k].1 {
                return Some((k, end));
            }
            k = end + 1;
        } else {
            k += 1;
        }
    }
    None
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Peak {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > PEAK_TOLERANCE {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let t = (a + b) / 2.0;
    Peak { t, value: f(t) }
}

fn parabola_vertex(lo: (f64, f64), mid: (f64, f64), hi: (f64, f64)) -> Peak {
    let (d1, d2) = (mid.0 - lo.0, hi.0 - mid.0);
    let (s1, s2) = ((mid.1 - lo.1) / d1, (hi.1 - mid.1) / d2);
    let curvature = (s2 - s1) / ((d1 + d2) / 2.0);
    if curvature >= 0.0 {
        return Peak { t: mid.0, value: mid.1 };
    }
    // Slope at the midpoint of each interval, extrapolated to zero.
    let t = (lo.0 + mid.0) / 2.0 - s1 / curvature;
    let t = t.clamp(lo.0, hi.0);
    let value = mid.1 + (s1 * d2 + s2 * d1) / (d1 + d2) * (t - mid.0) + curvature / 2.0 * (t - mid.0).powi(2);
    Peak { t, value }
}
