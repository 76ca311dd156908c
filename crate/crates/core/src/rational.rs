//! Exact rational helpers over arbitrary-precision integers.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = num_rational::BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"n/d"`, `"n"` or a finite decimal such as `"0.125"`.
pub fn parse_q(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = int_part.abs() * &scale + frac_part;
        let num = if neg { -mag } else { mag };
        return Ok(Q::new(num, scale));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Renders `x` with exactly `digits` digits after the decimal point,
/// truncating toward zero.
pub fn to_decimal(x: &Q, digits: usize) -> String {
    let neg = x.is_negative();
    let num = x.numer().abs();
    let den = x.denom().clone();
    let (int, rem) = num.div_rem(&den);
    let scale = BigInt::from(10u32).pow(digits as u32);
    let frac = (rem * scale) / den;
    let mut s = String::new();
    if neg && !(int.is_zero() && frac.is_zero()) {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        let f = frac.to_string();
        s.push('.');
        for _ in f.len()..digits {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Integer square root of `n * 10^(2*digits)`, i.e. `sqrt(n)` scaled by
/// `10^digits` and truncated.
pub fn scaled_isqrt(n: &BigUint, digits: u32) -> BigUint {
    let scale = BigUint::from(10u32).pow(2 * digits);
    (n * scale).sqrt()
}

pub fn is_probability(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

pub fn from_biguint_scaled(n: BigUint, digits: u32) -> Q {
    Q::new(
        BigInt::from_biguint(Sign::Plus, n),
        BigInt::from(10u32).pow(digits),
    )
}
