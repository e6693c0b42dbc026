//! Exact finite probability distributions over ordered sample spaces.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boolprog::{IoTable, Valuation};
use crate::error::{Error, Result};
use crate::ratio::{format_fraction, log2_ratio, parse_rational};
use crate::space::{bits_to_string, parse_bits, Space};

/// A probability distribution with exact rational weights, one per point of
/// its sample space, summing to exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dist {
    space: Space,
    weights: Vec<BigRational>,
}

impl Dist {
    /// Validates non-negativity and normalization.
    pub fn new(space: Space, weights: Vec<BigRational>) -> Result<Self> {
        if space.is_empty() {
            return Err(Error::EmptySpace);
        }
        if weights.len() != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} points",
                weights.len(),
                space.len()
            )));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::NotNormalized);
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized);
        }
        Ok(Dist { space, weights })
    }

    pub fn uniform(space: Space) -> Result<Self> {
        if space.is_empty() {
            return Err(Error::EmptySpace);
        }
        let w = BigRational::new(1.into(), space.len().into());
        let weights = vec![w; space.len()];
        Ok(Dist { space, weights })
    }

    pub fn point_mass(point: u64, space: Space) -> Result<Self> {
        let idx = space
            .index_of(point)
            .ok_or_else(|| Error::PointNotInSpace(bits_to_string(point, space.width())))?;
        let mut weights = vec![BigRational::zero(); space.len()];
        weights[idx] = BigRational::one();
        Ok(Dist { space, weights })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, index: usize) -> &BigRational {
        &self.weights[index]
    }

    /// Weight of a point given by its code; zero outside the space.
    pub fn weight_of(&self, code: u64) -> BigRational {
        self.space
            .index_of(code)
            .map_or_else(BigRational::zero, |i| self.weights[i].clone())
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(Signed::is_positive)
    }

    /// `(point, weight)` pairs in space order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigRational)> + '_ {
        self.space.codes().zip(&self.weights)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DistJson::from(self)).expect("plain data")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: DistJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Io(format!("distribution JSON: {e}")))?;
        raw.try_into()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Io(format!("distribution JSON: {e}")))?;
        Dist::from_json(&value)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json().to_string())
    }
}

#[derive(Serialize, Deserialize)]
struct DistJson {
    space: Vec<String>,
    weights: Vec<String>,
}

impl From<&Dist> for DistJson {
    fn from(d: &Dist) -> Self {
        DistJson {
            space: d.space.labels(),
            weights: d.weights.iter().map(format_fraction).collect(),
        }
    }
}

impl TryFrom<DistJson> for Dist {
    type Error = Error;

    fn try_from(raw: DistJson) -> Result<Self> {
        let width = raw.space.first().map_or(0, String::len);
        let codes = raw
            .space
            .iter()
            .map(|s| parse_bits(s, width))
            .collect::<Result<Vec<_>>>()?;
        let full = codes.len() == 1usize << width && codes.iter().enumerate().all(|(i, &c)| c == i as u64);
        let space = if full { Space::full(width) } else { Space::subset(width, codes)? };
        let weights = raw
            .weights
            .iter()
            .map(|w| parse_rational(w))
            .collect::<Result<Vec<_>>>()?;
        Dist::new(space, weights)
    }
}

/// An attacker's prior over high inputs; every point has positive weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Belief(Dist);

impl Belief {
    pub fn new(dist: Dist) -> Result<Self> {
        if !dist.has_full_support() {
            return Err(Error::NotFullSupport);
        }
        Ok(Belief(dist))
    }

    pub fn uniform(space: Space) -> Result<Self> {
        Dist::uniform(space).map(Belief)
    }

    pub fn dist(&self) -> &Dist {
        &self.0
    }
}

/// One run of a program as seen by an attacker: a belief, the actual high
/// input and the chosen low input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Experiment {
    pub belief: Belief,
    pub h: Valuation,
    pub l: Valuation,
}

impl Experiment {
    pub fn new(belief: Belief, h: Valuation, l: Valuation) -> Self {
        Experiment { belief, h, l }
    }

    /// Checks that the experiment is typed against the table's input spaces.
    pub fn check(&self, table: &IoTable) -> Result<(usize, usize)> {
        if self.belief.dist().space() != table.high_space() {
            return Err(Error::DimensionMismatch("belief is not over the high input space".into()));
        }
        let hi = table
            .high_space()
            .index_of(self.h.code())
            .filter(|_| self.h.len() == table.high_space().width())
            .ok_or_else(|| Error::PointNotInSpace(self.h.to_string()))?;
        let li = table
            .low_space()
            .index_of(self.l.code())
            .filter(|_| self.l.len() == table.low_space().width())
            .ok_or_else(|| Error::PointNotInSpace(self.l.to_string()))?;
        Ok((hi, li))
    }
}

/// `U ⊗ ℓ̇`: the joint distribution over high × low that follows `u` on the
/// column `ℓ` and is zero elsewhere.
pub fn product_with_point(u: &Dist, l: u64, low_space: &Space) -> Result<Dist> {
    let li = low_space
        .index_of(l)
        .ok_or_else(|| Error::PointNotInSpace(bits_to_string(l, low_space.width())))?;
    let mut weights = Vec::with_capacity(u.len() * low_space.len());
    for w in u.weights() {
        for j in 0..low_space.len() {
            weights.push(if j == li { w.clone() } else { BigRational::zero() });
        }
    }
    Ok(Dist { space: Space::product(u.space(), low_space), weights })
}

/// Joint distribution `μ(h, ℓ) = μ_H(h) · μ_L(ℓ)`.
pub fn product(high: &Dist, low: &Dist) -> Dist {
    let mut weights = Vec::with_capacity(high.len() * low.len());
    for a in high.weights() {
        for b in low.weights() {
            weights.push(a * b);
        }
    }
    Dist { space: Space::product(high.space(), low.space()), weights }
}

/// Preimage mass `μ_ℓ(o) = Σ_{h : M(h, ℓ) = o} μ(h)`.
pub fn output_mass(belief: &Belief, table: &IoTable, li: usize, o: u64) -> BigRational {
    table
        .column(li)
        .zip(belief.dist().weights())
        .filter(|(out, _)| *out == o)
        .map(|(_, w)| w)
        .sum()
}

/// The belief conditioned on observing `o` at low input `ℓ`.
pub fn posterior(belief: &Belief, table: &IoTable, li: usize, o: u64) -> Result<Dist> {
    if belief.dist().space() != table.high_space() {
        return Err(Error::DimensionMismatch("belief is not over the high input space".into()));
    }
    let mass = output_mass(belief, table, li, o);
    if mass.is_zero() {
        return Err(Error::UnattainedOutput(table.output_label(o)));
    }
    let weights = table
        .column(li)
        .zip(belief.dist().weights())
        .map(|(out, w)| if out == o { w / &mass } else { BigRational::zero() })
        .collect();
    Ok(Dist { space: table.high_space().clone(), weights })
}

/// `D(from → to) = Σ to(x) · log(to(x) / from(x))`, with `0 · log(0/x) = 0`.
pub fn relative_entropy(from: &Dist, to: &Dist) -> Result<f64> {
    if from.space() != to.space() {
        return Err(Error::DimensionMismatch("distributions over different spaces".into()));
    }
    let mut total = 0.0;
    for (p, q) in from.weights().iter().zip(to.weights()) {
        if q.is_zero() {
            continue;
        }
        if p.is_zero() {
            return Err(Error::SupportViolation);
        }
        total += crate::ratio::to_f64(q) * log2_ratio(&(q / p));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolprog::{io_table, parse_program, EnumConfig};
    use crate::ratio::ratio;

    fn m1() -> IoTable {
        let p = parse_program("high a, b; low o; o := !(!a && b)").unwrap();
        io_table(&p, EnumConfig::default()).unwrap()
    }

    #[test]
    fn uniform_weights_are_exact() {
        let d = Dist::uniform(Space::full(2)).unwrap();
        assert!(d.weights().iter().all(|w| *w == ratio(1, 4)));
        let d3 = Dist::uniform(Space::subset(2, vec![0, 1, 2]).unwrap()).unwrap();
        assert!(d3.weights().iter().all(|w| *w == ratio(1, 3)));
        assert_eq!(Dist::uniform(Space::full(0)).unwrap().weights(), [ratio(1, 1)]);
        assert_eq!(Dist::uniform(Space::subset(1, vec![]).unwrap()).unwrap_err(), Error::EmptySpace);
    }

    #[test]
    fn point_mass_and_errors() {
        let d = Dist::point_mass(1, Space::full(2)).unwrap();
        let w: Vec<BigRational> = vec![ratio(0, 1), ratio(1, 1), ratio(0, 1), ratio(0, 1)];
        assert_eq!(d.weights(), w.as_slice());
        assert!(matches!(Dist::point_mass(4, Space::full(2)), Err(Error::PointNotInSpace(_))));
        let u = Dist::uniform(Space::full(2)).unwrap();
        assert!((relative_entropy(&u, &d).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_cases() {
        let u = Dist::uniform(Space::full(2)).unwrap();
        assert_eq!(relative_entropy(&u, &u).unwrap(), 0.0);
        let sub = Dist::new(
            Space::full(2),
            vec![ratio(1, 3), ratio(0, 1), ratio(1, 3), ratio(1, 3)],
        )
        .unwrap();
        let direct = 3.0 * (1.0 / 3.0) * ((1.0 / 3.0) / 0.25f64).log2();
        assert!((relative_entropy(&u, &sub).unwrap() - direct).abs() < 1e-12);
        assert!((direct - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        let pm = Dist::point_mass(0, Space::full(2)).unwrap();
        assert_eq!(relative_entropy(&pm, &u).unwrap_err(), Error::SupportViolation);
    }

    #[test]
    fn posterior_of_three_preimages() {
        let t = m1();
        let b = Belief::uniform(Space::full(2)).unwrap();
        let post = posterior(&b, &t, 0, 1).unwrap();
        let w: Vec<BigRational> = vec![ratio(1, 3), ratio(0, 1), ratio(1, 3), ratio(1, 3)];
        assert_eq!(post.weights(), w.as_slice());
        let post0 = posterior(&b, &t, 0, 0).unwrap();
        assert_eq!(post0, Dist::point_mass(1, Space::full(2)).unwrap());
        let c = parse_program("high a; low o; o := true").unwrap();
        let tc = io_table(&c, EnumConfig::default()).unwrap();
        let b1 = Belief::uniform(Space::full(1)).unwrap();
        assert!(matches!(posterior(&b1, &tc, 0, 0), Err(Error::UnattainedOutput(_))));
    }

    #[test]
    fn product_with_point_concentrates_on_column() {
        let u = Dist::uniform(Space::full(2)).unwrap();
        let j = product_with_point(&u, 1, &Space::full(1)).unwrap();
        assert_eq!(j.space(), &Space::full(3));
        for (code, w) in j.iter() {
            let want = if code & 1 == 1 { ratio(1, 4) } else { ratio(0, 1) };
            assert_eq!(*w, want);
        }
        assert!(product_with_point(&u, 2, &Space::full(1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = Dist::new(Space::full(1), vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        let j = d.to_json();
        assert_eq!(j.to_string(), r#"{"space":["0","1"],"weights":["1/3","2/3"]}"#);
        assert_eq!(Dist::from_json(&j).unwrap(), d);
        let bad = r#"{"space":["0","1"],"weights":["1/3","1/3"]}"#;
        assert_eq!(Dist::from_json_str(bad).unwrap_err(), Error::NotNormalized);
        assert!(Belief::new(Dist::point_mass(0, Space::full(1)).unwrap()).is_err());
    }
}
