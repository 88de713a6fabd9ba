//! Exact rational rates used for coverage, thresholds and supports.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

/// A non-negative exact rational.
pub type Rate = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rate `{input}`: {reason}")]
pub struct RateParseError {
    pub input: String,
    pub reason: &'static str,
}

/// Parses `3/5`, `0.6`, `1` or `.25` into an exact rate.
pub fn parse_rate(input: &str) -> Result<Rate, RateParseError> {
    let s = input.trim();
    let err = |reason| RateParseError {
        input: input.to_string(),
        reason,
    };
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: u64 = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d == 0 {
            return Err(err("zero denominator"));
        }
        return Ok(Rate::new(n, d));
    }
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("not a decimal number"));
    }
    if frac_part.len() > 18 {
        return Err(err("too many fractional digits"));
    }
    let scale = 10u64.pow(frac_part.len() as u32);
    let int: u64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| err("integer part out of range"))?
    };
    let frac: u64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| err("fraction out of range"))?
    };
    let numer = int
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(|| err("out of range"))?;
    Ok(Rate::new(numer, scale))
}

/// Renders a rate as a decimal with exactly `digits` fractional digits,
/// rounding half up.
pub fn to_decimal(rate: Rate, digits: u32) -> String {
    let scale = 10u128.pow(digits);
    let numer = *rate.numer() as u128 * scale;
    let denom = *rate.denom() as u128;
    let (q, r) = numer.div_rem(&denom);
    let scaled = if r * 2 >= denom { q + 1 } else { q };
    let (int, frac) = scaled.div_rem(&scale);
    let mut out = int.to_string();
    if digits > 0 {
        let _ = write!(out, ".{:0width$}", frac, width = digits as usize);
    }
    out
}

pub fn to_f64(rate: Rate) -> f64 {
    *rate.numer() as f64 / *rate.denom() as f64
}

/// `count / total >= rate`, evaluated without division.
pub fn ratio_at_least(count: usize, total: usize, rate: Rate) -> bool {
    count as u128 * *rate.denom() as u128 >= *rate.numer() as u128 * total as u128
}

/// Serde adapter writing rates as `"n/d"` strings and reading any form
/// accepted by [`parse_rate`].
pub mod serde_str {
    use super::{parse_rate, Rate};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rate: &Rate, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(rate)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rate, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rate(&raw).map_err(serde::de::Error::custom)
    }
}
