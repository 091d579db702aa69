use std::fmt::Write;

/// `value` as C's `%.12e`: twelve fraction digits, signed exponent of at least two digits.
pub fn sci(value: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    let rust = format!("{value:.12e}");
    let (mantissa, exponent) = rust.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exponent.unsigned_abs())
}

/// A header row `T,<name>...` followed by one row per time.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = String>) -> Self {
        let header = std::iter::once("T".to_string()).chain(columns).collect();
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) {
        debug_assert_eq!(values.len() + 1, self.header.len());
        self.rows.push(std::iter::once(t).chain(values).collect());
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{}", sci(*v)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}
