//! Closed-form magnon amplitudes on the infinite XY chain.
//!
//! With `K_z = 0` the down spins are free fermions and every amplitude is a
//! product of `e^{i pi k / 2} J_k(T)` factors. The magnetic field only adds a
//! phase per magnon, which is dropped here. Sites are plain integers; sums
//! over the lattice are cut at `|offset| <= T + max(40, 15 (T/2)^{1/3})`, past
//! which `J_k(T)` is below `1e-16`.

use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::bessel::{bessel_j, bessel_row, BesselRow};
use crate::error::{domain, usage, Result};

/// Minimum number of orders kept beyond `T` when truncating lattice sums.
pub const WINDOW_MARGIN: f64 = 40.0;

const NORM_TOLERANCE: f64 = 1e-12;

/// Dimensionless time `T = t K / hbar`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Time(f64);

impl Time {
    pub const ZERO: Time = Time(0.0);

    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t >= 0.0 {
            Ok(Self(t))
        } else {
            domain(format!("time must be finite and non-negative, got {t}"))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Half-width of the lattice window that carries the amplitude at this time.
    ///
    /// The turning-point region of `J_k(T)` widens like `T^{1/3}`, so a fixed
    /// margin stops being enough near `T = 50`.
    pub fn reach(self) -> i64 {
        let margin = WINDOW_MARGIN.max(15.0 * (self.0 / 2.0).cbrt());
        (self.0 + margin).ceil() as i64
    }
}

/// Which of the three initial families a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// `alpha|up> + beta|down>` on site `l`, every other spin up.
    Unentangled,
    /// `alpha|up,down> + beta|down,up>` on the pair `(l, m)`: one magnon.
    BellB1,
    /// `alpha|up,up> + beta|down,down>` on the pair `(l, m)`: vacuum plus two magnons.
    BellB2,
}

/// Treatment of the `u_ij` occupation in the B2 two-site matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum UMode {
    /// `u = 1`: accurate while both magnons are far from the pair.
    #[default]
    PaperApprox,
    /// `u = 1 - eta_ii - eta_jj + v`, the probability that both sites are up.
    Exact,
}

/// A coded initial state.
///
/// For the B1 family the magnon starts on `l` with amplitude `beta` and on `m`
/// with amplitude `alpha`. For B2 the pair is unordered physically, but the
/// antisymmetric amplitude needs an orientation: `l > m` is required, so that
/// `phi_lm(0) = 1` is the amplitude of the configuration with both spins down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    kind: StateKind,
    alpha: Complex64,
    beta: Complex64,
    l: i64,
    m: i64,
}

impl InitialState {
    pub fn new(kind: StateKind, alpha: Complex64, beta: Complex64, l: i64, m: i64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return domain(format!("|alpha|^2 + |beta|^2 = {norm}, expected 1"));
        }
        match kind {
            StateKind::Unentangled => {}
            StateKind::BellB1 if l == m => return domain("B1 pair sites must differ"),
            StateKind::BellB2 if l <= m => {
                return domain(format!("B2 pair needs l > m, got l = {l}, m = {m}"))
            }
            _ => {}
        }
        let m = if kind == StateKind::Unentangled { l } else { m };
        Ok(Self { kind, alpha, beta, l, m })
    }

    pub fn unentangled(alpha: Complex64, beta: Complex64, l: i64) -> Result<Self> {
        Self::new(StateKind::Unentangled, alpha, beta, l, l)
    }

    pub fn bell_b1(alpha: Complex64, beta: Complex64, l: i64, m: i64) -> Result<Self> {
        Self::new(StateKind::BellB1, alpha, beta, l, m)
    }

    pub fn bell_b2(alpha: Complex64, beta: Complex64, l: i64, m: i64) -> Result<Self> {
        Self::new(StateKind::BellB2, alpha, beta, l, m)
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    /// Second code site; equals `l` for the unentangled family.
    pub fn m(&self) -> i64 {
        self.m
    }

    /// `s = l - m`.
    pub fn separation(&self) -> i64 {
        self.l - self.m
    }

    pub(crate) fn expect(&self, kind: StateKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            usage(format!("expected a {kind:?} state, got {:?}", self.kind))
        }
    }
}

/// Amplitudes `(alpha, beta)` with `|alpha|^2 = alpha2` and `arg(beta) = phase`.
pub fn code_amplitudes(alpha2: f64, phase: f64) -> Result<(Complex64, Complex64)> {
    if !(0.0..=1.0).contains(&alpha2) || !phase.is_finite() {
        return domain(format!("alpha2 must lie in [0, 1], got {alpha2}"));
    }
    Ok((
        Complex64::new(alpha2.sqrt(), 0.0),
        Complex64::from_polar((1.0 - alpha2).sqrt(), phase),
    ))
}

/// `i^k` without going through floating-point trigonometry.
pub(crate) fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `J_n(T)`; orders past the supported range are zero to double precision for
/// any realistic `T`.
pub(crate) fn bessel(n: i64, t: Time) -> f64 {
    bessel_j(n, t.get()).unwrap_or(0.0)
}

/// `e^{i pi (n-l)/2} J_{n-l}(T)`: a single magnon released from site `l`.
pub fn phi_unentangled(n: i64, l: i64, t: Time) -> Complex64 {
    i_pow(n - l) * bessel(n - l, t)
}

/// One-magnon amplitude of the B1 family,
/// `beta e^{i pi (n-l)/2} J_{n-l}(T) + alpha e^{i pi (n-m)/2} J_{n-m}(T)`.
pub fn phi_b1(n: i64, state: &InitialState, t: Time) -> Result<Complex64> {
    state.expect(StateKind::BellB1)?;
    Ok(state.beta * phi_unentangled(n, state.l, t) + state.alpha * phi_unentangled(n, state.m, t))
}

/// Antisymmetric two-magnon amplitude of the B2 family,
/// `e^{i pi (i+j-l-m)/2} (J_{i-l} J_{j-m} - J_{i-m} J_{j-l})`.
pub fn phi_b2(i: i64, j: i64, state: &InitialState, t: Time) -> Result<Complex64> {
    state.expect(StateKind::BellB2)?;
    if i == j {
        return domain("two-magnon amplitude needs distinct sites");
    }
    let (l, m) = (state.l, state.m);
    let det = bessel(i - l, t) * bessel(j - m, t) - bessel(i - m, t) * bessel(j - l, t);
    Ok(i_pow(i + j - l - m) * det)
}

/// `eta_ij = sum_n conj(phi_in) phi_jn`, summed in closed form with the
/// addition theorem: `e^{i pi (j-i)/2} (J_{i-l} J_{j-l} + J_{i-m} J_{j-m})`.
pub fn eta(i: i64, j: i64, l: i64, m: i64, t: Time) -> Complex64 {
    let orders = [i - l, j - l, i - m, j - m];
    let n_max = orders.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0) as usize;
    match bessel_row(n_max, t.get()) {
        Ok(row) => eta_from_row(&row, i, j, l, m),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

fn eta_from_row(row: &BesselRow, i: i64, j: i64, l: i64, m: i64) -> Complex64 {
    let jb = |k| row.get_or_zero(k);
    i_pow(j - i) * (jb(i - l) * jb(j - l) + jb(i - m) * jb(j - m))
}

/// `zeta_ij = sum_{n=j+1}^{i-1} conj(phi_in) phi_jn` for `i > j`.
pub fn zeta(i: i64, j: i64, field: &TwoMagnonField) -> Result<Complex64> {
    field.zeta(i, j)
}

/// `z_ij = <s_j^+ s_i^-> = eta_ij - 2 zeta_ij` for `i > j`.
pub fn z_offdiag(i: i64, j: i64, l: i64, m: i64, t: Time) -> Result<Complex64> {
    if l <= m {
        return domain(format!("two-magnon pair needs l > m, got l = {l}, m = {m}"));
    }
    TwoMagnonField::new(l, m, t)?.z(i, j)
}

/// Entries of the B2 two-site density matrix at `(i, j)`, `i > j`.
pub fn b2_elements(i: i64, j: i64, state: &InitialState, t: Time, u_mode: UMode) -> Result<B2MatrixElements> {
    state.expect(StateKind::BellB2)?;
    TwoMagnonField::new(state.l, state.m, t)?.elements(i, j, u_mode)
}

/// One-magnon wavefunction `phi_n(T)` over the integer lattice.
#[derive(Debug, Clone)]
pub struct OneMagnonField {
    t: Time,
    sources: Vec<(i64, Complex64)>,
    row: BesselRow,
    sites: RangeInclusive<i64>,
}

impl OneMagnonField {
    /// The bare propagator from `l` (no `beta` factor).
    pub fn unentangled(l: i64, t: Time) -> Result<Self> {
        Self::from_sources(vec![(l, Complex64::new(1.0, 0.0))], t)
    }

    /// The B1 wavefunction of `state`.
    pub fn bell_b1(state: &InitialState, t: Time) -> Result<Self> {
        state.expect(StateKind::BellB1)?;
        Self::from_sources(vec![(state.l, state.beta), (state.m, state.alpha)], t)
    }

    fn from_sources(sources: Vec<(i64, Complex64)>, t: Time) -> Result<Self> {
        let lo = sources.iter().map(|s| s.0).min().unwrap_or(0);
        let hi = sources.iter().map(|s| s.0).max().unwrap_or(0);
        let reach = t.reach();
        let n_max = (reach + hi - lo) as usize;
        Ok(Self {
            t,
            row: bessel_row(n_max, t.get())?,
            sources,
            sites: lo - reach..=hi + reach,
        })
    }

    pub fn time(&self) -> Time {
        self.t
    }

    pub fn amplitude(&self, n: i64) -> Complex64 {
        self.sources
            .iter()
            .map(|&(site, weight)| weight * i_pow(n - site) * self.row.get_or_zero(n - site))
            .sum()
    }

    /// Sites outside this range carry less than `1e-16` amplitude.
    pub fn sites(&self) -> RangeInclusive<i64> {
        self.sites.clone()
    }

    /// `sum_n |phi_n|^2` over the window.
    pub fn norm_sqr(&self) -> f64 {
        self.sites().map(|n| self.amplitude(n).norm_sqr()).sum()
    }
}

/// Two-magnon wavefunction `phi_ij(T)` released from the pair `(l, m)`, `l > m`.
#[derive(Debug, Clone)]
pub struct TwoMagnonField {
    l: i64,
    m: i64,
    t: Time,
    row: BesselRow,
    sites: RangeInclusive<i64>,
}

impl TwoMagnonField {
    pub fn new(l: i64, m: i64, t: Time) -> Result<Self> {
        if l <= m {
            return domain(format!("two-magnon pair needs l > m, got l = {l}, m = {m}"));
        }
        let reach = t.reach();
        Ok(Self {
            l,
            m,
            t,
            row: bessel_row((reach + l - m) as usize, t.get())?,
            sites: m - reach..=l + reach,
        })
    }

    pub fn for_state(state: &InitialState, t: Time) -> Result<Self> {
        state.expect(StateKind::BellB2)?;
        Self::new(state.l, state.m, t)
    }

    pub fn time(&self) -> Time {
        self.t
    }

    pub fn sites(&self) -> RangeInclusive<i64> {
        self.sites.clone()
    }

    fn j(&self, k: i64) -> f64 {
        self.row.get_or_zero(k)
    }

    /// `phi_ij`; zero on the diagonal.
    pub fn amplitude(&self, i: i64, j: i64) -> Complex64 {
        let (l, m) = (self.l, self.m);
        let det = self.j(i - l) * self.j(j - m) - self.j(i - m) * self.j(j - l);
        i_pow(i + j - l - m) * det
    }

    /// `sum_{i<j} |phi_ij|^2` over the window.
    pub fn norm_sqr(&self) -> f64 {
        let sites = self.sites();
        sites
            .clone()
            .flat_map(|i| (i + 1..=*sites.end()).map(move |j| (i, j)))
            .map(|(i, j)| self.amplitude(i, j).norm_sqr())
            .sum()
    }

    pub fn eta(&self, i: i64, j: i64) -> Complex64 {
        eta_from_row(&self.row, i, j, self.l, self.m)
    }

    /// `eta_ii = J_{i-l}^2 + J_{i-m}^2`, the probability that site `i` is down.
    pub fn occupation(&self, i: i64) -> f64 {
        self.j(i - self.l).powi(2) + self.j(i - self.m).powi(2)
    }

    pub fn zeta(&self, i: i64, j: i64) -> Result<Complex64> {
        if i <= j {
            return domain(format!("zeta_ij needs i > j, got i = {i}, j = {j}"));
        }
        let lo = (j + 1).max(*self.sites.start());
        let hi = (i - 1).min(*self.sites.end());
        Ok((lo..=hi)
            .map(|n| self.amplitude(i, n).conj() * self.amplitude(j, n))
            .sum())
    }

    pub fn z(&self, i: i64, j: i64) -> Result<Complex64> {
        Ok(self.eta(i, j) - 2.0 * self.zeta(i, j)?)
    }

    pub fn elements(&self, i: i64, j: i64, u_mode: UMode) -> Result<B2MatrixElements> {
        let z = self.z(i, j)?;
        let phi = self.amplitude(i, j);
        let v = phi.norm_sqr();
        let (eta_ii, eta_jj) = (self.occupation(i), self.occupation(j));
        let u = match u_mode {
            UMode::PaperApprox => 1.0,
            UMode::Exact => 1.0 - eta_ii - eta_jj + v,
        };
        Ok(B2MatrixElements {
            u,
            v,
            w1: eta_ii - v,
            w2: eta_jj - v,
            z,
            phi,
            u_mode,
        })
    }
}

/// Two-site expectation values in the two-magnon part of a B2 state.
///
/// `u`, `v`, `w1`, `w2` are the probabilities of (up, up), (down, down),
/// (down at `i`, up at `j`) and (up at `i`, down at `j`); `z = <s_j^+ s_i^->`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B2MatrixElements {
    pub u: f64,
    pub v: f64,
    pub w1: f64,
    pub w2: f64,
    pub z: Complex64,
    /// `phi_ij`, which sets the vacuum/two-magnon coherence.
    pub phi: Complex64,
    pub u_mode: UMode,
}

#[cfg(test)]
mod tests {
    use super::*;

    const J0_1: f64 = 0.765_197_686_557_966_6;
    const J1_1: f64 = 0.440_050_585_744_933_5;
    const J2_1: f64 = 0.114_903_484_931_900_5;

    fn t(x: f64) -> Time {
        Time::new(x).unwrap()
    }

    fn half() -> Complex64 {
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }

    #[test]
    fn time_validation() {
        assert!(Time::new(-0.1).is_err());
        assert!(Time::new(f64::NAN).is_err());
        assert_eq!(Time::new(2.5).unwrap().get(), 2.5);
    }

    #[test]
    fn state_validation() {
        let (a, b) = (half(), half());
        assert!(InitialState::bell_b1(a, b, 3, 3).is_err());
        assert!(InitialState::bell_b2(a, b, 2, 3).is_err());
        assert!(InitialState::bell_b1(a, a * 2.0, 3, 1).is_err());
        let s = InitialState::unentangled(a, b, 4).unwrap();
        assert_eq!((s.l(), s.m(), s.separation()), (4, 4, 0));
    }

    #[test]
    fn unentangled_examples() {
        assert_eq!(phi_unentangled(7, 7, Time::ZERO), Complex64::new(1.0, 0.0));
        assert_eq!(phi_unentangled(9, 7, Time::ZERO), Complex64::new(0.0, 0.0));
        let v = phi_unentangled(8, 7, t(1.0));
        assert!(v.re.abs() < 1e-16 && (v.im - J1_1).abs() < 1e-15);
    }

    #[test]
    fn b1_examples() {
        let s = InitialState::bell_b1(half(), half(), 5, 4).unwrap();
        assert!((phi_b1(5, &s, Time::ZERO).unwrap() - half()).norm() < 1e-16);
        assert!((phi_b1(4, &s, Time::ZERO).unwrap() - half()).norm() < 1e-16);
        let want = half() * Complex64::new(-J2_1, J1_1);
        assert!((phi_b1(6, &s, t(1.0)).unwrap() - want).norm() < 1e-15);
        let u = InitialState::unentangled(half(), half(), 5).unwrap();
        assert!(matches!(phi_b1(5, &u, t(1.0)), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn b2_examples() {
        let s = InitialState::bell_b2(half(), half(), 9, 4).unwrap();
        assert_eq!(phi_b2(9, 4, &s, Time::ZERO).unwrap(), Complex64::new(1.0, 0.0));
        let a = phi_b2(11, 6, &s, t(1.3)).unwrap();
        let b = phi_b2(6, 11, &s, t(1.3)).unwrap();
        assert_eq!(a, -b);
        assert!(phi_b2(4, 4, &s, t(1.0)).is_err());
        // (l+1, m) with l = m + 5 at T = 1: i (J1 J0 - J6 J_{-5}).
        let j5 = 0.000_249_757_730_211_234_4;
        let j6 = 0.000_020_938_338_002_389_27;
        let want = Complex64::new(0.0, J1_1 * J0_1 + j6 * j5);
        assert!((phi_b2(10, 4, &s, t(1.0)).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(3, 3, 3, 0, Time::ZERO), Complex64::new(1.0, 0.0));
        let e = eta(5, 5, 3, 1, t(2.0));
        let want = bessel(2, t(2.0)).powi(2) + bessel(4, t(2.0)).powi(2);
        assert!((e - Complex64::new(want, 0.0)).norm() < 1e-15);
        // (l+1, l, l, l-3) at T = 1: e^{-i pi/2} (J1 J0 + J4 J3).
        let j3 = 0.019_563_353_982_668_406;
        let j4 = 0.002_476_638_964_109_955;
        let want = Complex64::new(0.0, -(J1_1 * J0_1 + j4 * j3));
        assert!((eta(8, 7, 7, 4, t(1.0)) - want).norm() < 1e-15);
    }

    #[test]
    fn zeta_examples() {
        let field = TwoMagnonField::new(6, 5, t(2.0)).unwrap();
        assert_eq!(field.zeta(3, 2).unwrap(), Complex64::new(0.0, 0.0));
        assert!(field.zeta(2, 2).is_err());
        let start = TwoMagnonField::new(8, 5, Time::ZERO).unwrap();
        assert_eq!(start.zeta(8, 5).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn z_for_adjacent_pair_vanishes() {
        assert_eq!(z_offdiag(6, 5, 6, 5, Time::ZERO).unwrap(), Complex64::new(0.0, 0.0));
        for &tt in &[0.3, 1.0, 2.7, 6.0] {
            for d in [1, 3, 5] {
                let z = z_offdiag(10 + d, 10, 10 + d, 10, t(tt)).unwrap();
                assert!(z.norm() < 1e-10, "d = {d}, T = {tt}: {z}");
            }
        }
    }

    #[test]
    fn z_for_separation_two() {
        // eta - 2 zeta expands to -2 J0 J2 + 2 J1^2 (J0 + J2)^2. The look-alike
        // 2 J0 J2 + J1^2 (J0 + J2)^2 disagrees with exact evolution.
        let z = z_offdiag(7, 5, 7, 5, t(1.0)).unwrap();
        let want = -2.0 * J0_1 * J2_1 + 2.0 * J1_1.powi(2) * (J0_1 + J2_1).powi(2);
        assert!((z - Complex64::new(want, 0.0)).norm() < 1e-15);
        let look_alike = 2.0 * J0_1 * J2_1 + J1_1.powi(2) * (J0_1 + J2_1).powi(2);
        assert!((z.norm() - look_alike).abs() > 0.1);
    }

    #[test]
    fn elements_at_start() {
        let s = InitialState::bell_b2(half(), half(), 7, 3).unwrap();
        let e = b2_elements(7, 3, &s, Time::ZERO, UMode::Exact).unwrap();
        assert_eq!((e.u, e.v, e.w1, e.w2), (0.0, 1.0, 0.0, 0.0));
        assert_eq!(e.z, Complex64::new(0.0, 0.0));
        let e = b2_elements(7, 3, &s, Time::ZERO, UMode::PaperApprox).unwrap();
        assert_eq!((e.u, e.v), (1.0, 1.0));
        assert!(b2_elements(3, 7, &s, Time::ZERO, UMode::Exact).is_err());
    }

    #[test]
    fn phase_powers() {
        assert_eq!(i_pow(-1), Complex64::new(0.0, -1.0));
        assert_eq!(i_pow(6), Complex64::new(-1.0, 0.0));
        assert_eq!(i_pow(-8), Complex64::new(1.0, 0.0));
    }
}
