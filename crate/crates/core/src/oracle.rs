//! Exact evolution of a finite chain in the sectors with at most two down
//! spins.
//!
//! `H = K_z sum s^z_i s^z_{i+1} - (K/2) sum (s^+_i s^-_{i+1} + h.c.) - B sum s^z_i`,
//! shifted so that the all-up state has energy zero. Each sector is
//! diagonalized once, on first use, and states are evolved spectrally.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use crate::entanglement::{wootters_concurrence, TwoSiteDensityMatrix};
use crate::error::{domain, usage, Result};
use crate::fidelity::Coherence;
use crate::jacobi::CMatrix;
use crate::magnon::{InitialState, StateKind, Time};

/// Largest chain the bitmask basis supports.
pub const MAX_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Parameters of a finite chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    n: usize,
    k: f64,
    kz: f64,
    b: f64,
    boundary: Boundary,
}

impl ChainConfig {
    pub fn new(n: usize, k: f64, kz: f64, b: f64, boundary: Boundary) -> Result<Self> {
        if !(4..=MAX_SITES).contains(&n) {
            return domain(format!("chain length must lie in [4, {MAX_SITES}], got {n}"));
        }
        if !(k.is_finite() && kz.is_finite() && b.is_finite()) {
            return domain("couplings must be finite");
        }
        Ok(Self { n, k, kz, b, boundary })
    }

    /// Periodic XY ring with `K = 1`, `K_z = B = 0`.
    pub fn xy(n: usize) -> Result<Self> {
        Self::new(n, 1.0, 0.0, 0.0, Boundary::Periodic)
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn coupling(&self) -> f64 {
        self.k
    }

    pub fn coupling_z(&self) -> f64 {
        self.kz
    }

    pub fn field(&self) -> f64 {
        self.b
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let last = match self.boundary {
            Boundary::Periodic => self.n,
            Boundary::Open => self.n - 1,
        };
        (0..last).map(move |i| (i, (i + 1) % self.n))
    }

    /// Diagonal energy of a configuration (bit set = spin down), relative to all up.
    fn diagonal(&self, config: u64) -> f64 {
        let sz = |i: usize| if config >> i & 1 == 1 { -0.5 } else { 0.5 };
        let bonds: f64 = self.bonds().map(|(i, j)| sz(i) * sz(j) - 0.25).sum();
        let flipped = config.count_ones() as f64;
        self.kz * bonds + self.b * flipped
    }
}

/// Configurations with a fixed number of down spins, as bitmasks, ordered
/// lexicographically by their sorted down positions.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_down: usize,
    configs: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl SectorBasis {
    pub fn new(n_sites: usize, n_down: usize) -> Result<Self> {
        if n_sites > MAX_SITES {
            return domain(format!("at most {MAX_SITES} sites are supported"));
        }
        let configs: Vec<u64> = match n_down {
            0 => vec![0],
            1 => (0..n_sites).map(|p| 1 << p).collect(),
            2 => (0..n_sites)
                .flat_map(|p| (p + 1..n_sites).map(move |q| (1u64 << p) | (1u64 << q)))
                .collect(),
            _ => return usage(format!("only sectors with 0, 1 or 2 down spins exist, got {n_down}")),
        };
        let index = configs.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        Ok(Self { n_down, configs, index })
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn configs(&self) -> &[u64] {
        &self.configs
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn position(&self, config: u64) -> Option<usize> {
        self.index.get(&config).copied()
    }
}

/// Real symmetric Hamiltonian of one sector.
pub fn build_sector_hamiltonian(config: &ChainConfig, n_down: usize) -> Result<DMatrix<f64>> {
    let basis = SectorBasis::new(config.n, n_down)?;
    Ok(hamiltonian_in(config, &basis))
}

fn hamiltonian_in(config: &ChainConfig, basis: &SectorBasis) -> DMatrix<f64> {
    let dim = basis.len();
    let mut h = DMatrix::zeros(dim, dim);
    for (a, &c) in basis.configs.iter().enumerate() {
        h[(a, a)] = config.diagonal(c);
        for (i, j) in config.bonds() {
            if (c >> i & 1) != (c >> j & 1) {
                let b = basis.index[&(c ^ (1 << i) ^ (1 << j))];
                h[(a, b)] += -config.k / 2.0;
            }
        }
    }
    h
}

#[derive(Debug)]
struct SectorSystem {
    basis: Arc<SectorBasis>,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SectorSystem {
    fn new(config: &ChainConfig, n_down: usize) -> Result<Self> {
        let basis = SectorBasis::new(config.n, n_down)?;
        let eig = SymmetricEigen::new(hamiltonian_in(config, &basis));
        Ok(Self {
            basis: Arc::new(basis),
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    fn evolve(&self, initial: &[Complex64], phase_rate: f64) -> Vec<Complex64> {
        let dim = self.basis.len();
        let v = &self.vectors;
        let mut modes = vec![Complex64::new(0.0, 0.0); dim];
        for (k, mode) in modes.iter_mut().enumerate() {
            let overlap: Complex64 = (0..dim).map(|a| v[(a, k)] * initial[a]).sum();
            *mode = overlap * Complex64::from_polar(1.0, -self.energies[k] * phase_rate);
        }
        (0..dim)
            .map(|a| (0..dim).map(|k| v[(a, k)] * modes[k]).sum())
            .collect()
    }
}

/// Amplitudes of one sector.
#[derive(Debug, Clone)]
pub struct SectorState {
    basis: Arc<SectorBasis>,
    amplitudes: Vec<Complex64>,
}

impl SectorState {
    pub fn n_down(&self) -> usize {
        self.basis.n_down
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn population(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn entries(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.basis.configs.iter().copied().zip(self.amplitudes.iter().copied())
    }
}

/// A chain state supported on the sectors with at most two down spins.
#[derive(Debug, Clone)]
pub struct EvolvedState {
    n_sites: usize,
    sectors: Vec<SectorState>,
}

impl EvolvedState {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sectors(&self) -> &[SectorState] {
        &self.sectors
    }

    pub fn sector(&self, n_down: usize) -> Option<&SectorState> {
        self.sectors.iter().find(|s| s.n_down() == n_down)
    }

    /// Amplitude of the all-up state.
    pub fn vacuum(&self) -> Complex64 {
        self.amplitude(0)
    }

    /// Amplitude of a configuration given as a down-spin bitmask.
    pub fn amplitude(&self, config: u64) -> Complex64 {
        self.sector(config.count_ones() as usize)
            .and_then(|s| s.basis.position(config).map(|k| s.amplitudes[k]))
            .unwrap_or_default()
    }

    /// Amplitude with one down spin at `site`.
    pub fn one_magnon(&self, site: usize) -> Complex64 {
        self.amplitude(1 << site)
    }

    /// Amplitude with down spins at `a` and `b`.
    pub fn two_magnon(&self, a: usize, b: usize) -> Complex64 {
        if a == b {
            return Complex64::default();
        }
        self.amplitude((1 << a) | (1 << b))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors.iter().map(SectorState::population).sum()
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites {
            Ok(())
        } else {
            domain(format!("site {site} is outside a chain of {} sites", self.n_sites))
        }
    }

    /// Density matrix of `sites.len()` qubits, `dim = 2^len`; the first site is
    /// the most significant bit of the local index and bit value 1 means down.
    fn reduced(&self, sites: &[usize], coherence: Coherence) -> Vec<Vec<Complex64>> {
        let dim = 1 << sites.len();
        let mask: u64 = sites.iter().map(|&s| 1u64 << s).sum();
        let local = |c: u64| {
            sites
                .iter()
                .fold(0usize, |acc, &s| (acc << 1) | (c >> s & 1) as usize)
        };
        let mut rho = vec![vec![Complex64::default(); dim]; dim];
        let mut accumulate = |groups: HashMap<u64, Vec<(usize, Complex64)>>| {
            for members in groups.values() {
                for &(a, x) in members {
                    for &(b, y) in members {
                        rho[a][b] += x * y.conj();
                    }
                }
            }
        };
        let mut shared: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
        for sector in &self.sectors {
            let mut own: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
            let groups = match coherence {
                Coherence::Full => &mut shared,
                Coherence::Dephased => &mut own,
            };
            for (c, amp) in sector.entries() {
                groups.entry(c & !mask).or_default().push((local(c), amp));
            }
            accumulate(own);
        }
        accumulate(shared);
        rho
    }

    /// Reduced state of one site in the basis `{up, down}`.
    pub fn reduced_rho_1(&self, site: usize, coherence: Coherence) -> Result<Matrix2<Complex64>> {
        self.check_site(site)?;
        let r = self.reduced(&[site], coherence);
        Ok(Matrix2::new(r[0][0], r[0][1], r[1][0], r[1][1]))
    }

    /// Reduced state of the pair `(i, j)`, with `i` as the first qubit.
    pub fn reduced_rho_2(&self, i: usize, j: usize, coherence: Coherence) -> Result<TwoSiteDensityMatrix> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return domain("pair sites must differ");
        }
        let r = self.reduced(&[i, j], coherence);
        TwoSiteDensityMatrix::new(CMatrix::<4>::from_fn(|a, b| r[a][b]))
    }

    /// `<target| rho_site |target>` with `target = alpha|up> + beta|down>`.
    pub fn site_fidelity(&self, site: usize, target: [Complex64; 2], coherence: Coherence) -> Result<f64> {
        let rho = self.reduced_rho_1(site, coherence)?;
        let v = nalgebra::Vector2::from(target);
        Ok((v.adjoint() * rho * v)[(0, 0)].re)
    }

    /// `<target| rho_ij |target>` for a two-qubit target on `(i, j)`.
    pub fn pair_fidelity(&self, i: usize, j: usize, target: [Complex64; 4], coherence: Coherence) -> Result<f64> {
        Ok(self.reduced_rho_2(i, j, coherence)?.expectation(&target))
    }

    pub fn concurrence(&self, i: usize, j: usize, coherence: Coherence) -> Result<f64> {
        Ok(wootters_concurrence(&self.reduced_rho_2(i, j, coherence)?))
    }
}

/// A finite chain with lazily diagonalized sectors.
#[derive(Debug)]
pub struct ChainOracle {
    config: ChainConfig,
    sectors: [OnceLock<SectorSystem>; 3],
}

impl ChainOracle {
    pub fn new(config: ChainConfig) -> Self {
        Self { config, sectors: Default::default() }
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    fn system(&self, n_down: usize) -> &SectorSystem {
        self.sectors[n_down].get_or_init(|| SectorSystem::new(&self.config, n_down).expect("sector within 0..=2"))
    }

    pub fn basis(&self, n_down: usize) -> Result<&SectorBasis> {
        if n_down > 2 {
            return usage(format!("only sectors with 0, 1 or 2 down spins exist, got {n_down}"));
        }
        Ok(&self.system(n_down).basis)
    }

    /// Energies of a sector, ascending.
    pub fn spectrum(&self, n_down: usize) -> Result<Vec<f64>> {
        self.basis(n_down)?;
        let mut e = self.system(n_down).energies.clone();
        e.sort_by(f64::total_cmp);
        Ok(e)
    }

    fn site(&self, s: i64) -> Result<usize> {
        if (0..self.config.n as i64).contains(&s) {
            Ok(s as usize)
        } else {
            domain(format!("site {s} is outside a chain of {} sites", self.config.n))
        }
    }

    /// Initial chain state of a coded state; sites must lie in `[0, N)`.
    pub fn prepare(&self, state: &InitialState) -> Result<Vec<(u64, Complex64)>> {
        let l = self.site(state.l())?;
        let m = self.site(state.m())?;
        let (alpha, beta) = (state.alpha(), state.beta());
        Ok(match state.kind() {
            StateKind::Unentangled => vec![(0, alpha), (1 << l, beta)],
            StateKind::BellB1 => vec![(1 << m, alpha), (1 << l, beta)],
            StateKind::BellB2 => vec![(0, alpha), ((1 << l) | (1 << m), beta)],
        })
    }

    /// State at dimensionless time `T = t K / hbar`.
    pub fn evolve(&self, state: &InitialState, t: Time) -> Result<EvolvedState> {
        if self.config.k == 0.0 {
            return domain("dimensionless time needs a nonzero coupling K");
        }
        self.evolve_for(state, t.get() / self.config.k)
    }

    /// State after time `t` in units with `hbar = 1`.
    pub fn evolve_for(&self, state: &InitialState, t: f64) -> Result<EvolvedState> {
        if !(t.is_finite() && t >= 0.0) {
            return domain(format!("time must be finite and non-negative, got {t}"));
        }
        let initial = self.prepare(state)?;
        let mut sectors = Vec::new();
        for n_down in 0..=2 {
            let parts: Vec<_> = initial.iter().filter(|(c, _)| c.count_ones() as usize == n_down).collect();
            if parts.is_empty() {
                continue;
            }
            let system = self.system(n_down);
            let mut psi = vec![Complex64::default(); system.basis.len()];
            for &&(c, amp) in &parts {
                psi[system.basis.index[&c]] += amp;
            }
            sectors.push(SectorState {
                basis: Arc::clone(&system.basis),
                amplitudes: system.evolve(&psi, t),
            });
        }
        Ok(EvolvedState { n_sites: self.config.n, sectors })
    }
}
