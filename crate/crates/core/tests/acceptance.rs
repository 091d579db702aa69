//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{code, exact_bessel_at, time};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use spinchain::bessel::{bessel_j, bessel_row};
use spinchain::entanglement::{concurrence_b1_code_pair, concurrence_b2, concurrence_unentangled};
use spinchain::fidelity::*;
use spinchain::magnon::{InitialState, Time, UMode};
use spinchain::oracle::{ChainConfig, ChainOracle};
use spinchain::validation::{compare_family, exact_columns};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(name: &str, budget: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = check();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed <= budget;
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("{verdict} {name}: {} [{:.2} s, budget {} s]", out.detail, elapsed.as_secs_f64(), budget.as_secs());
    pass
}

fn bessel_kernel() -> Outcome {
    let xs = [0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 120.0];
    let reference: Vec<Vec<f64>> = xs.iter().map(|&x| (0..=200).map(|n| exact_bessel_at(n, x)).collect()).collect();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (x, row) in xs.iter().zip(&reference) {
        for (n, want) in row.iter().enumerate() {
            worst = worst.max((bessel_j(n as i64, *x).unwrap() - want).abs());
        }
    }
    let mut norm = 0.0f64;
    for &x in &xs {
        let row = bessel_row((x + 40.0).ceil() as usize, x).unwrap();
        let v = row.values();
        let sum = v[0] * v[0] + 2.0 * v[1..].iter().map(|j| j * j).sum::<f64>();
        norm = norm.max((sum - 1.0).abs());
    }
    let mut addition = 0.0f64;
    for &(x, y) in &[(0.5, 1.0), (2.0, 5.0), (10.0, 50.0), (50.0, 70.0)] {
        let m = (f64::max(x, y) + 80.0).ceil() as usize;
        let (rx, ry) = (bessel_row(m + 60, x).unwrap(), bessel_row(m + 60, y).unwrap());
        for n in [0i64, 1, 7, 40, 150] {
            let m = m as i64;
            let sum: f64 = (-m..=m).map(|k| rx.get_or_zero(k) * ry.get_or_zero(n - k)).sum();
            addition = addition.max((sum - bessel_j(n, x + y).unwrap()).abs());
        }
    }
    let kernel_time = start.elapsed();
    outcome(
        worst <= 1e-12 && norm <= 1e-10 && addition <= 1e-10 && kernel_time < Duration::from_secs(1),
        format!(
            "max |J - series| {worst:.2e} over 1407 points, normalization {norm:.2e}, addition {addition:.2e}, kernel {:.3} s",
            kernel_time.as_secs_f64()
        ),
    )
}

fn half_steps(t_max: f64) -> Vec<Time> {
    (0..=(2.0 * t_max) as usize).map(|k| time(k as f64 * 0.5)).collect()
}

fn one_magnon_equivalence() -> Outcome {
    let oracle = ChainOracle::new(ChainConfig::xy(41).unwrap());
    let times = half_steps(8.0);
    let (alpha, beta) = code(0.35, 0.4, 2.1);
    let states = [
        InitialState::unentangled(alpha, beta, 20).unwrap(),
        InitialState::bell_b1(alpha, beta, 21, 19).unwrap(),
        InitialState::bell_b1(beta, alpha, 22, 19).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut sites = usize::MAX;
    for state in &states {
        let table = compare_family(&oracle, state, &times).unwrap();
        worst = worst.max(table.max_over(exact_columns(state.kind())));
        sites = sites.min(table.interior.len());
    }
    outcome(worst <= 1e-8, format!("N = 41, T = 0..8: max deviation {worst:.2e} over >= {sites} interior sites"))
}

fn two_magnon_equivalence() -> Outcome {
    let oracle = ChainOracle::new(ChainConfig::xy(31).unwrap());
    let times = half_steps(4.0);
    let (alpha, beta) = code(0.35, 0.4, 2.1);
    let mut worst = 0.0f64;
    let mut approx_gap = 0.0f64;
    let mut sites = usize::MAX;
    // The u = 1 forms are checked against Wootters on their own matrix; the
    // oracle is compared with the exact-u forms.
    let gated = exact_columns(spinchain::magnon::StateKind::BellB2);
    for (l, m) in [(16, 14), (16, 15), (17, 14)] {
        let state = InitialState::bell_b2(alpha, beta, l, m).unwrap();
        let table = compare_family(&oracle, &state, &times).unwrap();
        worst = worst.max(table.max_over(gated));
        approx_gap = approx_gap.max(table.max_over(&["concurrence_paper_vs_oracle", "pair_fidelity_paper_vs_oracle"]));
        sites = sites.min(table.interior.len());
    }
    outcome(
        worst <= 1e-8,
        format!(
            "N = 31, T = 0..4: max deviation {worst:.2e} over >= {sites} interior sites; u = 1 forms differ from the oracle by up to {approx_gap:.3}"
        ),
    )
}

fn figure_locations() -> Outcome {
    let grid = TimeGrid::standard();
    let peak = |kind, s| first_maximum(&FidelityCurve::averaged(kind, 100, s, &grid)).map(|p| p.t);
    let unentangled = peak(Average::SiteUnentangled(Coherence::Dephased), 0);
    let b1 = peak(Average::SiteB1, 25);
    let b2 = peak(Average::SiteB2, 25);
    let within = |p: Option<f64>, lo, hi| p.is_some_and(|t| (lo..=hi).contains(&t));
    let dominated = grid.times().iter().all(|&t| fid_avg_b2(100, 25, t) >= fid_avg_unentangled(100, t));
    outcome(
        within(unentangled, 96.0, 104.0) && within(b1, 71.0, 79.0) && within(b2, 71.0, 79.0) && dominated,
        format!(
            "first maxima at T = {:.3} (unentangled), {:.3} (B1), {:.3} (B2); B2 >= unentangled on all {} grid points: {dominated}",
            unentangled.unwrap_or(f64::NAN),
            b1.unwrap_or(f64::NAN),
            b2.unwrap_or(f64::NAN),
            grid.times().len()
        ),
    )
}

/// Least-squares slope and intercept of log(envelope) against log(T), the
/// envelope being the maximum over consecutive windows of `width`.
fn envelope_fit(f: impl Fn(f64) -> f64, t0: f64, t1: f64, width: f64) -> (f64, f64) {
    let step = 0.01;
    let mut points = Vec::new();
    let mut start = t0;
    while start + width <= t1 {
        let n = (width / step) as usize;
        let (tm, fm) = (0..=n)
            .map(|k| start + k as f64 * step)
            .map(|t| (t, f(t)))
            .fold((start, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        points.push((tm.ln(), fm.ln()));
        start += width;
    }
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = num / den;
    (slope, (my - slope * mx).exp())
}

fn asymptotics() -> Outcome {
    let t = time(0.01);
    let mut ratios = (f64::MAX, f64::MIN);
    for beta2 in [0.2, 0.5, 0.9] {
        for r in 1..=4 {
            let c = concurrence_unentangled(10 + r, 10, 10, t, beta2).unwrap();
            let factorial: f64 = (1..=r).map(|k| k as f64).product();
            let ratio = c * factorial / (2.0 * beta2 * 0.005f64.powi(r as i32));
            ratios = (ratios.0.min(ratio), ratios.1.max(ratio));
        }
    }
    let width = std::f64::consts::TAU;
    let beta2 = 0.5;
    let (slope, prefactor) =
        envelope_fit(|t| concurrence_unentangled(11, 10, 10, time(t), beta2).unwrap(), 50.0, 200.0, width);
    let expected_prefactor = 2.0 * beta2 / std::f64::consts::PI;
    let (b1_slope, _) = envelope_fit(|t| concurrence_b1_code_pair(1, time(t)), 50.0, 200.0, width);
    let b2 = InitialState::bell_b2(common::half(), common::half(), 12, 10).unwrap();
    let (b2_slope, _) =
        envelope_fit(|t| concurrence_b2(12, 10, &b2, time(t), UMode::Exact).unwrap(), 50.0, 200.0, width);
    let pass = ratios.0 >= 0.99 && ratios.1 <= 1.01 && (-1.1..=-0.9).contains(&slope);
    outcome(
        pass,
        format!(
            "small-T ratios in [{:.5}, {:.5}]; unentangled pair envelope ~ {prefactor:.4} T^{slope:.3} (1/(pi T) form: {expected_prefactor:.4} T^-1); B1 code pair exponent {b1_slope:.3}, B2 code pair exponent {b2_slope:.3}",
            ratios.0, ratios.1
        ),
    )
}

fn bloch_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut record = |q: Result<f64, spinchain::Error>, closed: f64| {
        worst = worst.max((q.unwrap() - closed).abs());
    };
    for _ in 0..20 {
        let r = rng.gen_range(-6i64..=30);
        let s = rng.gen_range(1i64..=8);
        let t = time(rng.gen_range(0.0..25.0));
        record(
            bloch_average(|a, _| fid_site_unentangled(r, t, a.norm_sqr(), Coherence::Dephased).unwrap()),
            fid_avg_unentangled(r, t),
        );
        record(
            bloch_average(|a, b| fid_site_b1(r, &InitialState::bell_b1(a, b, s, 0).unwrap(), t).unwrap()),
            fid_avg_b1(r, s, t),
        );
        record(bloch_average(|a, b| pairfid_b1(r, s, t, a, b)), pairfid_avg_b1(r, s, t));
        record(
            bloch_average(|a, b| fid_site_b2(r, &InitialState::bell_b2(a, b, s, 0).unwrap(), t).unwrap()),
            fid_avg_b2(r, s, t),
        );
        for u_mode in [UMode::PaperApprox, UMode::Exact] {
            record(bloch_average(|a, b| pairfid_b2(r, s, t, a, b, u_mode)), pairfid_avg_b2(r, s, t, u_mode));
        }
    }
    outcome(worst <= 1e-8, format!("20 draws, 6 averages each: max |quadrature - closed form| {worst:.2e}"))
}

fn unit_vacuum_artifact() -> Outcome {
    let unit_vacuum = pairfid_avg_b2(0, 2, Time::ZERO, UMode::PaperApprox);
    let exact = pairfid_avg_b2(0, 2, Time::ZERO, UMode::Exact);
    let oracle = ChainOracle::new(ChainConfig::xy(8).unwrap());
    let prepared = InitialState::bell_b2(common::half(), common::half(), 5, 3).unwrap();
    oracle.prepare(&prepared).unwrap();
    let evolved = bloch_average(|a: Complex64, b: Complex64| {
        let state = InitialState::bell_b2(a, b, 5, 3).unwrap();
        let psi = oracle.evolve(&state, Time::ZERO).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        psi.pair_fidelity(5, 3, [a, zero, zero, b], Coherence::Full).unwrap()
    })
    .unwrap();
    outcome(
        (unit_vacuum - 7.0 / 6.0).abs() < 1e-12 && (exact - 1.0).abs() < 1e-10 && (evolved - 1.0).abs() < 1e-10,
        format!("averaged B2 pair fidelity at r = 0, T = 0, s = 2: u = 1 form {unit_vacuum:.12}, exact-u {exact:.12}, oracle {evolved:.12}"),
    )
}

fn timescale() -> Outcome {
    let tau = timescale_seconds(0.01).unwrap();
    let leading = (tau / 1e-13).round();
    outcome(leading == 1.0, format!("hbar / (0.01 eV) = {tau:.3e} s"))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run("1 bessel kernel", secs(1), bessel_kernel),
        run("2 one-magnon oracle equivalence", secs(5), one_magnon_equivalence),
        run("3 two-magnon oracle equivalence", secs(60), two_magnon_equivalence),
        run("4 figure locations and dominance", secs(2), figure_locations),
        run("5 asymptotics", secs(60), asymptotics),
        run("6 Bloch-average identities", secs(60), bloch_identities),
        run("7 averaged pair-fidelity artifact", secs(60), unit_vacuum_artifact),
        run("note timescale", secs(1), timescale),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
