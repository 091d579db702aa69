#![allow(dead_code)]

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use spinchain::magnon::{InitialState, Time};

/// `J_n(p/q)` from the power series summed exactly in rational arithmetic,
/// rounded once at the end. Terms are kept until the next one is below 1e-40.
pub fn exact_bessel(n: u32, p: u64, q: u64) -> f64 {
    if p == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let a = p as f64 / (2 * q) as f64;
    let terms = series_terms(n, a);
    // With y = (p / 2q)^2, J_n = (p / 2q)^n / n! * sum_k (-y)^k / (k! (n+1)_k).
    // Nested form: 1 - y/(1 (n+1)) (1 - y/(2 (n+2)) (1 - ...)), evaluated from the inside.
    let (yp, yq) = (BigInt::from(p) * p, BigInt::from(2 * q) * (2 * q));
    let (mut num, mut den) = (BigInt::one(), BigInt::one());
    for k in (1..=terms).rev() {
        let kk = BigInt::from(k) * (k + n as u64);
        // 1 - y / (k (n + k)) * num / den
        let step_den = &yq * &kk * &den;
        num = &step_den - &yp * &num;
        den = step_den;
    }
    let prefactor_num = BigInt::from(p).pow(n);
    let prefactor_den = BigInt::from(2 * q).pow(n) * factorial(n);
    ratio_to_f64(&(num * prefactor_num), &(den * prefactor_den))
}

fn series_terms(n: u32, a: f64) -> u64 {
    let mut log_term = 0.0f64;
    let mut k = 0u64;
    loop {
        k += 1;
        log_term += 2.0 * a.ln() - (k as f64).ln() - ((k + n as u64) as f64).ln();
        if k as f64 > a && log_term < -95.0 {
            return k;
        }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let (num, den) = (num.abs(), den.abs());
    let shift = 80 - (num.bits() as i64 - den.bits() as i64);
    let scaled = if shift >= 0 { (num << shift as usize) / den } else { num / (den << (-shift) as usize) };
    let value = scaled.to_f64().expect("finite quotient") * 2f64.powi(-shift as i32);
    if negative {
        -value
    } else {
        value
    }
}

pub fn time(t: f64) -> Time {
    Time::new(t).expect("valid time")
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn half() -> Complex64 {
    c(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

pub fn max_b1(l: i64, m: i64) -> InitialState {
    InitialState::bell_b1(half(), half(), l, m).expect("valid pair")
}

pub fn max_b2(l: i64, m: i64) -> InitialState {
    InitialState::bell_b2(half(), half(), l, m).expect("valid pair")
}

/// Normalized `(alpha, beta)` from `|alpha|^2` and two phases.
pub fn code(alpha2: f64, phase_a: f64, phase_b: f64) -> (Complex64, Complex64) {
    (
        Complex64::from_polar(alpha2.sqrt(), phase_a),
        Complex64::from_polar((1.0 - alpha2).sqrt(), phase_b),
    )
}

/// `J_n(x)` through the nalgebra-free exact series for `x` given as a decimal with at most 3 places.
pub fn exact_bessel_at(n: i64, x: f64) -> f64 {
    let q = 1000u64;
    let p = (x * q as f64).round() as u64;
    assert!(((p as f64 / q as f64) - x).abs() < 1e-12, "{x} is not a 3-place decimal");
    let v = exact_bessel(n.unsigned_abs() as u32, p, q);
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}
