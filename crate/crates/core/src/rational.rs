//! Exact rational helpers on top of `num-rational`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational number used by every exact routine.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rational) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators without overflow.
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn pow(q: &Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= q;
    }
    acc
}

/// Smallest integer not below `q`.
pub fn ceil_int(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Nearest integer, ties rounded away from zero.
pub fn round_half_away(q: &Rational) -> BigInt {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if q.is_negative() {
        -((-q) + &half).floor().to_integer()
    } else {
        (q + &half).floor().to_integer()
    }
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Parses `"p/q"`, a decimal such as `"-0.125"`, or an integer.
pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidInstance(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InvalidInstance(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = Rational::new(num, den);
    Ok(if negative { -q } else { q })
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering; inverse of [`parse`].
pub fn format(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact conversion of a rational with a known denominator divisor into `i64` units.
///
/// Returns `q * scale` when it is an integer fitting in `i64`.
pub(crate) fn scaled_i64(q: &Rational, scale: &BigInt) -> Result<i64> {
    let v = q * Rational::from_integer(scale.clone());
    if !v.is_integer() {
        return Err(Error::Inconsistent(format!(
            "{} is not a multiple of 1/{}",
            format(q),
            scale
        )));
    }
    v.to_integer()
        .to_i64()
        .ok_or_else(|| Error::Unsupported("rational denominators too large for the grid lattice".into()))
}
