//! Measure identifiers and measured values.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ratio::{format_ratio, log2_ratio, to_f64};

/// Precision, in bits, claimed for values computed through binary64 logarithms.
pub const FLOAT_PRECISION_BITS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureId {
    SE,
    ME,
    GE,
    BE,
    CC,
    MECC,
    GECC,
}

impl MeasureId {
    pub const ALL: [MeasureId; 7] = [
        MeasureId::SE,
        MeasureId::ME,
        MeasureId::GE,
        MeasureId::BE,
        MeasureId::CC,
        MeasureId::MECC,
        MeasureId::GECC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureId::SE => "SE",
            MeasureId::ME => "ME",
            MeasureId::GE => "GE",
            MeasureId::BE => "BE",
            MeasureId::CC => "CC",
            MeasureId::MECC => "MECC",
            MeasureId::GECC => "GECC",
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::NotApplicable(format!("unknown measure `{s}`")))
    }
}

/// An exactly known value: a rational, or the base-2 logarithm of one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exact {
    Rational(BigRational),
    Log2(BigRational),
}

fn power_of_two_exponent(n: &BigInt) -> Option<i64> {
    let m = n.magnitude();
    (n.is_positive() && m.count_ones() == 1).then(|| m.trailing_zeros().unwrap_or(0) as i64)
}

impl Exact {
    /// `log2(r)`, reduced to a rational when `r` is a power of two.
    pub fn log2(r: BigRational) -> Self {
        assert!(r.is_positive(), "log of a non-positive value");
        match (power_of_two_exponent(r.numer()), power_of_two_exponent(r.denom())) {
            (Some(a), Some(b)) => Exact::Rational(BigRational::from_integer((a - b).into())),
            _ => Exact::Log2(r),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exact::Rational(r) => to_f64(r),
            Exact::Log2(r) => log2_ratio(r),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Exact::Rational(r) => Some(r),
            Exact::Log2(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exact::Rational(r) => r.is_zero(),
            Exact::Log2(r) => r.is_one(),
        }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exact::Rational(r) => f.write_str(&format_ratio(r)),
            Exact::Log2(r) => write!(f, "log({})", format_ratio(r)),
        }
    }
}

/// A measured leakage value in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct QifValue {
    pub measure: MeasureId,
    pub bits: f64,
    pub exact: Option<Exact>,
    pub precision_bits: u32,
    pub witness_low: Option<String>,
}

impl QifValue {
    pub fn from_exact(measure: MeasureId, exact: Exact) -> Self {
        let bits = exact.to_f64();
        let precision_bits = match &exact {
            Exact::Rational(r) => certified_bits(bits, r),
            Exact::Log2(_) => FLOAT_PRECISION_BITS,
        };
        QifValue { measure, bits, exact: Some(exact), precision_bits, witness_low: None }
    }

    pub fn from_float(measure: MeasureId, bits: f64) -> Self {
        QifValue {
            measure,
            bits,
            exact: None,
            precision_bits: FLOAT_PRECISION_BITS,
            witness_low: None,
        }
    }

    pub fn with_witness(mut self, low: String) -> Self {
        self.witness_low = Some(low);
        self
    }

    pub fn with_measure(mut self, measure: MeasureId) -> Self {
        self.measure = measure;
        self
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(e) => e.is_zero(),
            None => self.bits == 0.0,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "measure": self.measure.name(),
            "bits": round_sig(self.bits),
            "exact": self.exact.as_ref().map(|e| e.to_string()),
            "precisionBits": self.precision_bits,
        });
        if let Some(w) = &self.witness_low {
            v["witnessLow"] = json!(w);
        }
        v
    }
}

impl fmt::Display for QifValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.measure, format_float(self.bits))?;
        if let Some(e) = &self.exact {
            write!(f, " (exact {e})")?;
        }
        if let Some(w) = &self.witness_low {
            write!(f, " at low input \"{w}\"")?;
        }
        Ok(())
    }
}

/// Largest `P ≤ 64` with `|value − r| < 2^−P`, from the exact difference.
fn certified_bits(value: f64, r: &BigRational) -> u32 {
    let Some(v) = BigRational::from_float(value) else { return 0 };
    let diff = (v - r).abs();
    if diff.is_zero() {
        return 64;
    }
    let mut p = 0u32;
    let mut bound = BigRational::one();
    while p < 64 && diff < &bound / BigRational::from_integer(2.into()) {
        bound /= BigRational::from_integer(2.into());
        p += 1;
    }
    p
}

/// Rounds to 12 significant digits so printed reports are byte-stable.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Text form with 12 significant digits and no trailing zeros.
pub fn format_float(x: f64) -> String {
    let r = round_sig(x);
    let s = format!("{r}");
    if s.contains('e') || s.len() <= 14 {
        s
    } else {
        format!("{r:.12}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
