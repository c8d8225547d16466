//! CSV emission and parse-back of sweep results.

use std::fs;
use std::path::Path;

use super::SweepResult;
use crate::error::{Error, Result};

pub const HEADER: &str = "axis,scheme,mean_rate_bps_hz,std_rate_bps_hz,n";

/// Decimal rendering with 9 significant digits and no exponent.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            format!("{}{}", digits, "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{body}")
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for point in &result.points {
        for stats in &point.stats {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                sig9(point.value),
                stats.scheme,
                sig9(stats.mean),
                sig9(stats.std),
                stats.n
            ));
        }
    }
    out
}

/// Writes `to_csv_string(result)` to `path`.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, to_csv_string(result))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub axis: f64,
    pub scheme: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let bad = |line: usize, what: &str| Error::InvalidConfig(format!("csv line {line}: {what}"));
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(bad(1, "unexpected header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad(i + 2, "expected 5 fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 2, "bad number"));
            Ok(CsvRow {
                axis: num(f[0])?,
                scheme: f[1].to_string(),
                mean: num(f[2])?,
                std: num(f[3])?,
                n: f[4].parse().map_err(|_| bad(i + 2, "bad count"))?,
            })
        })
        .collect()
}
