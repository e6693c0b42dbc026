//! Guarded comparison of Shannon leakage under the uniform prior against a
//! rational bound.
//!
//! Under the uniform prior the leakage of a deterministic program is
//! `SE = log N − (1/M) Σ c·log c`, where `N` is the number of high inputs,
//! `M` the number of input pairs and `c` ranges over the preimage sizes of the
//! `(output, low)` classes. Deciding `SE ≤ q` first uses binary64; results
//! within `epsilon` of the bound are recomputed as rigorous fixed-point
//! intervals at increasing precision, and finally by an exact integer
//! certificate when its size fits the budget. Anything still unresolved is
//! reported as indeterminate.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::boolprog::IoTable;
use crate::error::Result;
use crate::ratio::{log2_biguint, positive_parts, to_f64};

/// Preimage-size profile of a table under the uniform prior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    n_high: u64,
    n_low: u64,
    /// class size → number of classes of that size
    sizes: BTreeMap<u64, u64>,
}

impl ClassCounts {
    pub fn from_table(table: &IoTable) -> Self {
        let mut sizes = BTreeMap::new();
        for c in table.class_sizes() {
            *sizes.entry(c).or_insert(0) += 1;
        }
        ClassCounts { n_high: table.n_high() as u64, n_low: table.n_low() as u64, sizes }
    }

    /// Builds a profile directly; class sizes must add up to `n_high · n_low`.
    pub fn new(n_high: u64, n_low: u64, classes: impl IntoIterator<Item = u64>) -> Self {
        let mut sizes = BTreeMap::new();
        for c in classes {
            *sizes.entry(c).or_insert(0) += 1;
        }
        let counts = ClassCounts { n_high, n_low, sizes };
        assert_eq!(counts.total(), n_high * n_low, "class sizes must cover the inputs");
        counts
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().map(|(c, m)| c * m).sum()
    }

    pub fn n_high(&self) -> u64 {
        self.n_high
    }

    /// `SE` in binary64, summed in ascending class-size order.
    pub fn se_f64(&self) -> f64 {
        let m = self.total() as f64;
        let s: f64 = self
            .sizes
            .iter()
            .map(|(&c, &k)| k as f64 * c as f64 * (c as f64).log2())
            .sum();
        (self.n_high as f64).log2() - s / m
    }

    /// `SE` as an exact rational, available when `N` and every class size are
    /// powers of two.
    pub fn se_exact(&self) -> Option<BigRational> {
        let exp = |n: u64| n.is_power_of_two().then(|| n.trailing_zeros() as u64);
        let log_n = exp(self.n_high)?;
        let mut s = 0u128;
        for (&c, &k) in &self.sizes {
            s += u128::from(k) * u128::from(c) * u128::from(exp(c)?);
        }
        let m = BigInt::from(self.total());
        Some(BigRational::from_integer(log_n.into()) - BigRational::new(BigInt::from(s), m))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderConfig {
    /// Binary64 results closer than this to the bound are escalated.
    pub epsilon: f64,
    /// Fixed-point precisions tried in order.
    pub rungs: Vec<u32>,
    /// Largest exact certificate, in bits, that may be built; `None` disables it.
    pub certificate_budget_bits: Option<u64>,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig { epsilon: 1e-9, rungs: vec![128, 256], certificate_budget_bits: Some(1 << 24) }
    }
}

/// The step that settled (or failed to settle) a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Float,
    Interval(u32),
    Certificate,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderOutcome {
    /// `Some(true)` when `SE ≤ q`, `Some(false)` when `SE > q`, `None` when unresolved.
    pub in_bound: Option<bool>,
    pub stage: Stage,
    /// Precisions attempted, in order: 64 for binary64, then each interval rung.
    pub tried: Vec<u32>,
    pub value: f64,
    pub margin: f64,
}

impl LadderOutcome {
    /// Precision backing the verdict: the rung that settled it, the last rung
    /// for a certificate (which is exact), and 0 when unresolved.
    pub fn precision_bits(&self) -> u32 {
        match self.stage {
            Stage::Float => 64,
            Stage::Interval(p) => p,
            Stage::Certificate => self.tried.last().copied().unwrap_or(64),
            Stage::Exhausted => 0,
        }
    }
}

/// Lower end `B` of an interval `[B, B + 2]`, in units of `2^−p`, that contains
/// `log2 n`; the width is zero (returned as `false`) when `n` is a power of two.
pub fn log2_fixed(n: u64, p: u32) -> (BigInt, bool) {
    assert!(n > 0, "log of zero");
    let k = 63 - n.leading_zeros();
    let base = BigInt::from(k) << p;
    if n.is_power_of_two() {
        return (base, false);
    }
    let w = p.max(64) as usize + 32;
    let one = BigUint::one() << w;
    let two = &one << 1;
    let mut x = BigUint::from(n) << (w - k as usize);
    let mut b = BigUint::zero();
    for i in 1..=p {
        x = (&x * &x) >> w;
        if x >= two {
            x >>= 1;
            b |= BigUint::one() << (p - i);
        }
    }
    (base + BigInt::from_biguint(Sign::Plus, b), true)
}

/// Decides `SE ≤ q` for a positive rational `q`.
pub fn compare_se(counts: &ClassCounts, q: &BigRational, config: &LadderConfig) -> Result<LadderOutcome> {
    let (a, b) = positive_parts(q)?;
    let value = counts.se_f64();
    let margin = value - to_f64(q);
    let mut out = LadderOutcome { in_bound: None, stage: Stage::Exhausted, tried: vec![64], value, margin };
    if margin.abs() > config.epsilon {
        out.in_bound = Some(margin < 0.0);
        out.stage = Stage::Float;
        return Ok(out);
    }
    let a = BigInt::from_biguint(Sign::Plus, a);
    let b = BigInt::from_biguint(Sign::Plus, b);
    let m = BigInt::from(counts.total());
    for &p in &config.rungs {
        out.tried.push(p);
        let (n_lo, n_wide) = log2_fixed(counts.n_high, p);
        let n_hi = &n_lo + if n_wide { 2 } else { 0 };
        let mut s_lo = BigInt::zero();
        let mut s_width = BigInt::zero();
        for (&c, &k) in &counts.sizes {
            let (lo, wide) = log2_fixed(c, p);
            let weight = BigInt::from(k) * BigInt::from(c);
            if wide {
                s_width += &weight * 2;
            }
            s_lo += weight * lo;
        }
        let s_hi = &s_lo + s_width;
        let x_lo = &m * &n_lo - s_hi;
        let x_hi = &m * n_hi - s_lo;
        let bound = (&a * &m) << p;
        if &b * x_hi <= bound {
            out.in_bound = Some(true);
            out.stage = Stage::Interval(p);
            return Ok(out);
        }
        if &b * x_lo > bound {
            out.in_bound = Some(false);
            out.stage = Stage::Interval(p);
            return Ok(out);
        }
    }
    if let Some(budget) = config.certificate_budget_bits {
        if let Some(verdict) = certificate(counts, &a, &b, budget) {
            out.in_bound = Some(verdict);
            out.stage = Stage::Certificate;
        }
    }
    Ok(out)
}

/// `SE ≤ a/b  ⇔  N^{bM} ≤ 2^{aM} · Π c^{bc}`, evaluated exactly when every
/// operand stays within `budget` bits.
fn certificate(counts: &ClassCounts, a: &BigInt, b: &BigInt, budget: u64) -> Option<bool> {
    let m = counts.total();
    let a = a.to_u64()?;
    let b = b.to_u64()?;
    let lhs_bits = (b as f64) * (m as f64) * log2_biguint(&BigUint::from(counts.n_high)).max(1.0);
    let shift = a.checked_mul(m)?;
    if lhs_bits > budget as f64 || shift > budget {
        return None;
    }
    let lhs = BigUint::from(counts.n_high).pow(u32::try_from(b * m).ok()?);
    let mut rhs = BigUint::one() << shift;
    for (&c, &k) in &counts.sizes {
        if c > 1 {
            rhs *= BigUint::from(c).pow(u32::try_from(b * c * k).ok()?);
        }
    }
    Some(lhs <= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::ratio;

    fn no_certificate() -> LadderConfig {
        LadderConfig { certificate_budget_bits: None, ..LadderConfig::default() }
    }

    #[test]
    fn fixed_point_log_encloses_reference() {
        for n in [3u64, 5, 7, 10, 1000, 12345, u64::MAX] {
            for p in [16u32, 53, 128] {
                let (lo, wide) = log2_fixed(n, p);
                assert!(wide);
                let scale = 2f64.powi(p as i32);
                let lo_f = lo.to_f64().unwrap() / scale;
                let reference = (n as f64).log2();
                // the interval [lo, lo + 2 ulp] contains log2 n (to binary64 accuracy)
                assert!(lo_f <= reference + 1e-12, "n={n} p={p}");
                assert!(reference <= lo_f + 2.0 / scale + 1e-12, "n={n} p={p}");
            }
        }
        assert_eq!(log2_fixed(8, 10), (BigInt::from(3 << 10), false));
    }

    #[test]
    fn fixed_point_log_of_three_matches_binary64_digits() {
        // binary64 holds log2(3)·2^32 to about 2^-20, enough to fix the floor
        let expected = (3f64.log2() * 2f64.powi(32)).floor() as u64;
        let (lo, _) = log2_fixed(3, 32);
        assert_eq!(lo, BigInt::from(expected));
    }

    #[test]
    fn dyadic_profile_is_exact() {
        // 4 high inputs, classes 2,1,1
        let c = ClassCounts::new(4, 1, [2, 1, 1]);
        assert_eq!(c.se_exact(), Some(ratio(3, 2)));
        assert!(ClassCounts::new(4, 1, [3, 1]).se_exact().is_none());
    }

    #[test]
    fn far_from_bound_settles_in_binary64() {
        let c = ClassCounts::new(4, 1, [3, 1]);
        let out = compare_se(&c, &ratio(1, 1), &LadderConfig::default()).unwrap();
        assert_eq!((out.in_bound, out.stage), (Some(true), Stage::Float));
        let out = compare_se(&c, &ratio(1, 2), &LadderConfig::default()).unwrap();
        assert_eq!((out.in_bound, out.stage), (Some(false), Stage::Float));
    }

    #[test]
    fn near_bound_escalates_and_resolves() {
        let c = ClassCounts::new(4, 1, [3, 1]);
        let q = BigRational::from_float(c.se_f64()).unwrap();
        let out = compare_se(&c, &q, &no_certificate()).unwrap();
        assert_eq!(out.stage, Stage::Interval(128));
        assert_eq!(out.tried, [64, 128]);
        assert!(out.in_bound.is_some());
    }

    #[test]
    fn dyadic_equality_is_settled_by_exact_intervals() {
        // every logarithm involved is an integer, so the first interval is exact
        let c = ClassCounts::new(4, 1, [2, 1, 1]);
        let out = compare_se(&c, &ratio(3, 2), &no_certificate()).unwrap();
        assert_eq!((out.in_bound, out.stage), (Some(true), Stage::Interval(128)));
    }

    #[test]
    fn irrational_terms_at_equality_need_the_certificate() {
        // six equally likely secrets in two classes of three: log 6 − log 3 = 1
        let c = ClassCounts::new(6, 1, [3, 3]);
        let q = ratio(1, 1);
        let out = compare_se(&c, &q, &no_certificate()).unwrap();
        assert_eq!(out.in_bound, None);
        assert_eq!(out.stage, Stage::Exhausted);
        assert_eq!(out.tried, [64, 128, 256]);
        let out = compare_se(&c, &q, &LadderConfig::default()).unwrap();
        assert_eq!((out.in_bound, out.stage), (Some(true), Stage::Certificate));
        // a bound 2^-40 away is beyond binary64's guard but settled at 128 bits
        let below = ratio(1, 1) - BigRational::new(1.into(), BigInt::one() << 40);
        let out = compare_se(&c, &below, &LadderConfig::default()).unwrap();
        assert_eq!((out.in_bound, out.stage), (Some(false), Stage::Interval(128)));
        // 2^-300 away: no rung separates it and the certificate is over budget
        let tiny = ratio(1, 1) - BigRational::new(1.into(), BigInt::one() << 300);
        let out = compare_se(&c, &tiny, &LadderConfig::default()).unwrap();
        assert_eq!((out.in_bound, out.stage), (None, Stage::Exhausted));
    }
}
