//! Information-theoretic quantities of exact distributions.
//!
//! Joint distributions are slices of `(x, y, weight)` triples; points may
//! repeat, in which case their weights add. Sums iterate in key order, so
//! floating-point results do not depend on input order.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dist::Dist;
use crate::ratio::{log2_ratio, to_f64};

/// `Σ w · log(1/w)` over positive weights, in the given order.
pub fn entropy_of<'a>(weights: impl IntoIterator<Item = &'a BigRational>) -> f64 {
    weights
        .into_iter()
        .filter(|w| !w.is_zero())
        .map(|w| -to_f64(w) * log2_ratio(w))
        .sum()
}

/// Shannon entropy in bits.
pub fn shannon_entropy(d: &Dist) -> f64 {
    entropy_of(d.weights())
}

fn group<X: Ord + Clone, Y: Ord + Clone>(
    joint: &[(X, Y, BigRational)],
) -> BTreeMap<Y, BTreeMap<X, BigRational>> {
    let mut by_y: BTreeMap<Y, BTreeMap<X, BigRational>> = BTreeMap::new();
    for (x, y, w) in joint {
        *by_y.entry(y.clone()).or_default().entry(x.clone()).or_insert_with(BigRational::zero) += w;
    }
    by_y
}

/// `H(X|Y) = Σ_y μ(y) · H(X | Y = y)`.
pub fn conditional_entropy<X: Ord + Clone, Y: Ord + Clone>(joint: &[(X, Y, BigRational)]) -> f64 {
    group(joint)
        .values()
        .map(|column| {
            let my: BigRational = column.values().sum();
            if my.is_zero() {
                return 0.0;
            }
            let conditional: Vec<BigRational> = column.values().map(|w| w / &my).collect();
            to_f64(&my) * entropy_of(&conditional)
        })
        .sum()
}

/// `I(X;Y|Z) = H(X|Z) − H(X|Y,Z)`.
pub fn mutual_information<X, Y, Z>(joint: &[(X, Y, Z, BigRational)]) -> f64
where
    X: Ord + Clone,
    Y: Ord + Clone,
    Z: Ord + Clone,
{
    let xz: Vec<(X, Z, BigRational)> =
        joint.iter().map(|(x, _, z, w)| (x.clone(), z.clone(), w.clone())).collect();
    let xyz: Vec<(X, (Y, Z), BigRational)> = joint
        .iter()
        .map(|(x, y, z, w)| (x.clone(), (y.clone(), z.clone()), w.clone()))
        .collect();
    conditional_entropy(&xz) - conditional_entropy(&xyz)
}

/// `𝒱(X) = max_x μ(x)`.
pub fn vulnerability(d: &Dist) -> BigRational {
    d.weights().iter().max().cloned().unwrap_or_else(BigRational::zero)
}

/// `H∞(X) = −log 𝒱(X)`.
pub fn min_entropy(d: &Dist) -> f64 {
    -log2_ratio(&vulnerability(d))
}

/// `𝒱(X|Y) = Σ_y μ(y) · max_x μ(x|y) = Σ_y max_x μ(x, y)`.
pub fn cond_vulnerability<X: Ord + Clone, Y: Ord + Clone>(
    joint: &[(X, Y, BigRational)],
) -> BigRational {
    group(joint)
        .values()
        .map(|column| column.values().max().cloned().unwrap_or_else(BigRational::zero))
        .sum()
}

/// `H∞(X|Y) = −log 𝒱(X|Y)`.
pub fn cond_min_entropy<X: Ord + Clone, Y: Ord + Clone>(joint: &[(X, Y, BigRational)]) -> f64 {
    -log2_ratio(&cond_vulnerability(joint))
}

/// A point together with its position in the optimal guessing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPoint {
    pub point: u64,
    pub rank: usize,
}

fn rank_order<X: Ord + Clone>(weights: &BTreeMap<X, BigRational>) -> Vec<(X, BigRational)> {
    let mut items: Vec<(X, BigRational)> =
        weights.iter().map(|(x, w)| (x.clone(), w.clone())).collect();
    // Stable sort keeps the key order for equal weights.
    items.sort_by(|a, b| b.1.cmp(&a.1));
    items
}

/// Points in non-increasing weight order, ties broken by code; ranks start at 1.
pub fn guess_rank(d: &Dist) -> Vec<RankedPoint> {
    let weights: BTreeMap<u64, BigRational> = d.iter().map(|(c, w)| (c, w.clone())).collect();
    rank_order(&weights)
        .into_iter()
        .enumerate()
        .map(|(i, (point, _))| RankedPoint { point, rank: i + 1 })
        .collect()
}

/// `𝒢(X) = Σ_i i · μ(x_i)` under the guessing order.
pub fn guessing_entropy(d: &Dist) -> BigRational {
    let weights: BTreeMap<u64, BigRational> = d.iter().map(|(c, w)| (c, w.clone())).collect();
    rank_sum(&weights)
}

fn rank_sum<X: Ord + Clone>(weights: &BTreeMap<X, BigRational>) -> BigRational {
    rank_order(weights)
        .into_iter()
        .enumerate()
        .map(|(i, (_, w))| w * BigRational::from_integer((i + 1).into()))
        .sum()
}

/// `𝒢(X|Y) = Σ_y μ(y) · 𝒢(X | Y = y) = Σ_y Σ_i i · μ(x_i, y)`.
pub fn cond_guessing_entropy<X: Ord + Clone, Y: Ord + Clone>(
    joint: &[(X, Y, BigRational)],
) -> BigRational {
    group(joint).values().map(rank_sum).sum()
}

/// Total weight of a joint slice.
pub fn total<X, Y>(joint: &[(X, Y, BigRational)]) -> BigRational {
    joint.iter().fold(BigRational::zero(), |acc, (_, _, w)| acc + w)
}

pub(crate) fn is_normalized<X, Y>(joint: &[(X, Y, BigRational)]) -> bool {
    total(joint).is_one()
}
