//! Exact rational helpers shared by the measure and decision layers.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `a/b`, an integer, or a plain decimal such as `0.125` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all_digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let d = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = BigRational::new(n, d);
    Ok(if neg { -r } else { r })
}

/// `3/4`, or `2` when the denominator is one.
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Always `num/den`, used where a fixed shape is expected.
pub fn format_fraction(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_biguint(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n))
}

/// log2 of a positive big integer in binary64, accurate even past the f64 range.
pub fn log2_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "log2 of zero");
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    ((n >> shift).to_u64().unwrap() as f64).log2() + shift as f64
}

/// log2 of a positive rational.
pub fn log2_ratio(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "log2 of a non-positive rational");
    log2_biguint(r.numer().magnitude()) - log2_biguint(r.denom().magnitude())
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| 2f64.powf(log2_ratio(r)))
}

/// Splits a positive rational into `(a, b)` with `q = a/b`, both positive.
pub fn positive_parts(q: &BigRational) -> Result<(BigUint, BigUint)> {
    if !q.is_positive() {
        return Err(Error::NonPositiveBound(format_ratio(q)));
    }
    Ok((q.numer().magnitude().clone(), q.denom().magnitude().clone()))
}

pub(crate) fn exponent(b: &BigUint) -> Result<u32> {
    b.to_u32()
        .ok_or_else(|| Error::Range(format!("exponent {b} does not fit in 32 bits")))
}

/// `count ≤ 2^q` for `q = a/b`, decided as `count^b ≤ 2^a`.
pub fn count_within_pow2(count: &BigUint, q: &BigRational) -> Result<bool> {
    let (a, b) = positive_parts(q)?;
    if count.is_zero() {
        return Ok(true);
    }
    // count^b ≤ 2^a  ⇔  b·log2(count) ≤ a; settle the cases a bit-length bound decides.
    let b32 = exponent(&b)?;
    let lo_bits = (count.bits() - 1) * u64::from(b32);
    let hi_bits = count.bits() * u64::from(b32);
    if BigUint::from(hi_bits) <= a {
        return Ok(true);
    }
    if BigUint::from(lo_bits) > a {
        return Ok(false);
    }
    let a_u = a
        .to_u64()
        .ok_or_else(|| Error::Range("bound numerator too large".into()))?;
    Ok(count.pow(b32) <= BigUint::one() << a_u)
}

/// Largest integer `m` with `m ≤ 2^q`, i.e. `⌊2^q⌋`, by exact search on `m^b ≤ 2^a`.
pub fn floor_pow2(q: &BigRational) -> Result<BigUint> {
    let (a, b) = positive_parts(q)?;
    let (whole, _) = a.div_rem(&b);
    let whole = whole
        .to_u64()
        .ok_or_else(|| Error::Range("bound too large".into()))?;
    // 2^whole ≤ 2^q < 2^(whole+1)
    let mut lo = BigUint::one() << whole;
    let mut hi = BigUint::one() << (whole + 1);
    while &lo + 1u32 < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if count_within_pow2(&mid, q)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
