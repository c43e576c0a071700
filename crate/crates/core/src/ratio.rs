//! Exact rational helpers.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Ratio = num_rational::BigRational;

pub fn int(v: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Ratio {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Ratio {
    Ratio::zero()
}

pub fn one() -> Ratio {
    Ratio::one()
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Always renders as `p/q`, including integers (`3/1`).
pub fn render(r: &Ratio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p/q`, a bare integer, or a finite decimal such as `0.25`.
pub fn parse(s: &str) -> Result<Ratio> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    if let Some((whole, fraction)) = s.split_once('.') {
        if fraction.is_empty() || !fraction.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole.is_empty() { "0" } else { whole }, fraction);
        let numer: BigInt = digits.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), fraction.len());
        let r = Ratio::new(numer, denom);
        return Ok(if negative { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Ratio::from_integer(p))
}

/// Decimal rendering with a fixed number of fractional digits, rounded half away from zero.
pub fn decimal(r: &Ratio, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.abs() * Ratio::from_integer(scale.clone());
    let rounded = (scaled + frac(1, 2)).floor().to_integer();
    let whole = &rounded / &scale;
    let rest = &rounded % &scale;
    let sign = if r.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", rest.to_string(), width = digits)
    }
}
