//! Sum rates of the constructed codes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::page_one::PageOneCode;
use crate::patterns::{pattern_plan, PatternSource};

/// Smallest and largest lengths covered by [`rate_report`].
pub const REPORT_RANGE: (usize, usize) = (3, 15);

// Best fixed-rate two-page codes for n = 3..=6: message count per page and rate.
const FIXED_RATE: [(usize, u64, f64); 4] =
    [(3, 4, 1.333), (4, 7, 1.4037), (5, 11, 1.384), (6, 19, 1.41)];

/// `(log2 M1 + log2 M2) / n`.
pub fn sum_rate(m1: u64, m2: u64, n: usize) -> Result<f64> {
    if m1 == 0 || m2 == 0 || n == 0 {
        return Err(Error::InvalidRate { m1, m2, n });
    }
    Ok(((m1 as f64).log2() + (m2 as f64).log2()) / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub m1: u64,
    pub m2: u64,
    pub r_sum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_rate_m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_rate_r: Option<f64>,
}

/// Builds the shipped code for each length in `n_min..=n_max` and reports its rate.
pub fn rate_report(n_min: usize, n_max: usize) -> Result<Vec<RateRow>> {
    let (lo, hi) = REPORT_RANGE;
    if n_min < lo || n_max > hi || n_min > n_max {
        return Err(Error::InvalidRange(n_min, n_max));
    }
    (n_min..=n_max)
        .map(|n| {
            let page_one = PageOneCode::build(n, &pattern_plan(n, PatternSource::Builtin)?)?;
            let m1 = page_one.message_count() as u64;
            let m2 = 1u64 << (n - 1);
            let fixed = FIXED_RATE.iter().find(|(k, _, _)| *k == n);
            Ok(RateRow {
                n,
                m1,
                m2,
                r_sum: sum_rate(m1, m2, n)?,
                fixed_rate_m: fixed.map(|f| f.1),
                fixed_rate_r: fixed.map(|f| f.2),
            })
        })
        .collect()
}

/// `x` rounded to `digits` significant figures, trailing zeros kept.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn fixed_cells(row: &RateRow) -> (String, String) {
    (
        row.fixed_rate_m
            .map_or_else(|| "-".into(), |m| m.to_string()),
        row.fixed_rate_r
            .map_or_else(|| "-".into(), |r| r.to_string()),
    )
}

pub fn rates_to_csv(rows: &[RateRow]) -> String {
    let mut out = String::from("n,M1,M2,R_sum,fixed_M,fixed_R\n");
    for row in rows {
        let (m, r) = fixed_cells(row);
        writeln!(
            out,
            "{},{},{},{},{m},{r}",
            row.n,
            row.m1,
            row.m2,
            format_significant(row.r_sum, 4)
        )
        .unwrap();
    }
    out
}

pub fn rates_to_text(rows: &[RateRow]) -> String {
    let mut out = format!(
        "{:>3} {:>5} {:>6} {:>7} {:>8} {:>8}\n",
        "n", "M1", "M2", "R_sum", "fixed_M", "fixed_R"
    );
    for row in rows {
        let (m, r) = fixed_cells(row);
        writeln!(
            out,
            "{:>3} {:>5} {:>6} {:>7} {m:>8} {r:>8}",
            row.n,
            row.m1,
            row.m2,
            format_significant(row.r_sum, 4)
        )
        .unwrap();
    }
    out
}
