//! Integer-order Bessel functions of the first kind.
//!
//! Every propagator in this crate reduces to products of `J_n(T)`, so this is
//! the one numeric kernel the rest of the library leans on. Values come from
//! Miller's downward recurrence,
//!
//! ```text
//! J_{k-1}(x) = (2k / x) J_k(x) - J_{k+1}(x),
//! ```
//!
//! started well above both the highest requested order and the argument, and
//! normalized with `J_0 + 2 (J_2 + J_4 + ...) = 1`. Arguments below `1e-6` use
//! the leading terms of the power series instead.
//!
//! Negative orders follow from `J_{-n}(x) = (-1)^n J_n(x)`, applied to the
//! value computed for `|n|`, so the parity relation holds bit-for-bit.

use crate::error::{domain, Result};

/// Largest order accepted by [`bessel_j`] and [`bessel_row`].
pub const MAX_ORDER: usize = 1_000_000;

const SERIES_CUTOFF: f64 = 1e-6;
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_0(x), J_1(x), ..., J_{n_max}(x)` at one argument, from a single
/// recurrence pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRow {
    x: f64,
    values: Vec<f64>,
}

impl BesselRow {
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Values for orders `0..=n_max`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `J_n(x)` for either sign of `n`, or `None` past the end of the row.
    pub fn get(&self, n: i64) -> Option<f64> {
        let order = usize::try_from(n.unsigned_abs()).ok()?;
        self.values.get(order).map(|&v| with_parity(n, v))
    }

    /// Like [`BesselRow::get`], with orders past the row read as zero.
    ///
    /// Callers size the row so that the dropped orders are below `1e-16`
    /// (`n_max >= x + 40` is always enough).
    pub fn get_or_zero(&self, n: i64) -> f64 {
        self.get(n).unwrap_or(0.0)
    }
}

/// `J_n(x)` for an integer order of either sign.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    check_argument(x)?;
    let order = n.unsigned_abs();
    if order > MAX_ORDER as u64 {
        return domain(format!("Bessel order {n} exceeds {MAX_ORDER}"));
    }
    let order = order as usize;
    Ok(with_parity(n, orders(order, order, x)[0]))
}

/// `J_0(x)..=J_{n_max}(x)` in one downward-recurrence pass.
pub fn bessel_row(n_max: usize, x: f64) -> Result<BesselRow> {
    check_argument(x)?;
    if n_max > MAX_ORDER {
        return domain(format!("Bessel order {n_max} exceeds {MAX_ORDER}"));
    }
    Ok(BesselRow {
        x,
        values: orders(0, n_max, x),
    })
}

fn check_argument(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        domain(format!("Bessel argument must be finite, got {x}"))
    }
}

fn with_parity(n: i64, value: f64) -> f64 {
    if n < 0 && n % 2 != 0 {
        -value
    } else {
        value
    }
}

/// `J_k(x)` for `k` in `lo..=hi`.
fn orders(lo: usize, hi: usize, x: f64) -> Vec<f64> {
    if x < 0.0 {
        let mut values = orders(lo, hi, -x);
        for (k, v) in (lo..=hi).zip(values.iter_mut()) {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
        return values;
    }
    if x < SERIES_CUTOFF {
        return (lo..=hi).map(|k| small_argument(k, x)).collect();
    }
    miller(lo, hi, x)
}

/// Two terms of the power series; the next one is below `1e-24` relative.
fn small_argument(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
        if lead == 0.0 {
            return 0.0;
        }
    }
    lead * (1.0 - half * half / (n as f64 + 1.0))
}

fn miller(lo: usize, hi: usize, x: f64) -> Vec<f64> {
    let top = hi.max(x.ceil() as usize);
    let mut start = top + (10.0 * (top as f64).sqrt()).ceil() as usize + 40;
    start += start % 2;

    let mut out = vec![0.0; hi - lo + 1];
    let mut above = 0.0;
    let mut current = 1.0;
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if (lo..=hi).contains(&k) {
            out[k - lo] = current;
        }
        if k % 2 == 0 {
            norm += if k == 0 { current } else { 2.0 * current };
        }
        if k == 0 {
            break;
        }
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        k -= 1;
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            out.iter_mut().for_each(|v| *v *= RESCALE_BY);
        }
    }
    out.iter_mut().for_each(|v| *v /= norm);
    out
}
