//! Leakage of a program, given its semantics table.
//!
//! Each measure has a definitional form over an arbitrary joint prior on
//! high × low inputs and, where one exists, a counting form under the uniform
//! prior. Both are exposed so that they can check each other.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::entropy::{
    cond_guessing_entropy, cond_vulnerability, conditional_entropy, is_normalized,
    mutual_information,
};
use super::ladder::ClassCounts;
use super::value::{Exact, MeasureId, QifValue};
use crate::boolprog::exec::{output_counts, preimages};
use crate::boolprog::IoTable;
use crate::dist::{output_mass, posterior, relative_entropy, Dist, Experiment};
use crate::error::{Error, Result};
use crate::space::Space;

/// The uniform prior over all input pairs of a table.
pub fn uniform_joint(table: &IoTable) -> Dist {
    Dist::uniform(Space::product(table.high_space(), table.low_space())).expect("tables are non-empty")
}

/// `(h, o, ℓ, μ(h, ℓ))` for every row, in row order.
fn rows(table: &IoTable, mu: &Dist) -> Result<Vec<(usize, u64, usize, BigRational)>> {
    let space = Space::product(table.high_space(), table.low_space());
    if mu.space() != &space {
        return Err(Error::DimensionMismatch(
            "prior is not over the table's high × low input space".into(),
        ));
    }
    let nl = table.n_low();
    Ok((0..table.len())
        .map(|row| (row / nl, table.outputs()[row], row % nl, mu.weight(row).clone()))
        .collect())
}

fn h_given_l(rows: &[(usize, u64, usize, BigRational)]) -> Vec<(usize, usize, BigRational)> {
    rows.iter().map(|(h, _, l, w)| (*h, *l, w.clone())).collect()
}

fn h_given_ol(rows: &[(usize, u64, usize, BigRational)]) -> Vec<(usize, (u64, usize), BigRational)> {
    rows.iter().map(|(h, o, l, w)| (*h, (*o, *l), w.clone())).collect()
}

/// `SE[μ] = I(O; H | L)`, computed as `H(H|L) − H(H|O,L)`.
pub fn se(table: &IoTable, mu: &Dist) -> Result<QifValue> {
    let r = rows(table, mu)?;
    debug_assert!(is_normalized(&h_given_l(&r)));
    let joint: Vec<(usize, u64, usize, BigRational)> = r.clone();
    let value = mutual_information(&joint).max(0.0);
    Ok(QifValue::from_float(MeasureId::SE, value))
}

/// `H(O|L)`, which equals `SE[μ]` for deterministic programs.
pub fn se_conditional_entropy(table: &IoTable, mu: &Dist) -> Result<f64> {
    let r = rows(table, mu)?;
    let joint: Vec<(u64, usize, BigRational)> = r.iter().map(|(_, o, l, w)| (*o, *l, w.clone())).collect();
    Ok(conditional_entropy(&joint))
}

/// `SE[U]` from the preimage-size profile; exact when it is a dyadic rational.
pub fn se_uniform(table: &IoTable) -> QifValue {
    let counts = ClassCounts::from_table(table);
    match counts.se_exact() {
        Some(r) => QifValue::from_exact(MeasureId::SE, Exact::Rational(r)),
        None => QifValue::from_float(MeasureId::SE, counts.se_f64().max(0.0)),
    }
}

/// `ME[μ] = H∞(H|L) − H∞(H|O,L) = log(𝒱(H|O,L) / 𝒱(H|L))`.
pub fn me(table: &IoTable, mu: &Dist) -> Result<QifValue> {
    let r = rows(table, mu)?;
    let before = cond_vulnerability(&h_given_l(&r));
    let after = cond_vulnerability(&h_given_ol(&r));
    Ok(QifValue::from_exact(MeasureId::ME, Exact::log2(after / before)))
}

/// `|O_L| = |{(o, ℓ) | ∃h. M(h, ℓ) = o}|`.
pub fn low_output_pairs(table: &IoTable) -> u64 {
    output_counts(table).iter().sum()
}

/// `ME[U] = log(|O_L| / |L|)`.
pub fn me_uniform_closed(table: &IoTable) -> QifValue {
    let r = BigRational::new(low_output_pairs(table).into(), (table.n_low() as u64).into());
    QifValue::from_exact(MeasureId::ME, Exact::log2(r))
}

/// `GE[μ] = 𝒢(H|L) − 𝒢(H|O,L)`, exact.
pub fn ge(table: &IoTable, mu: &Dist) -> Result<QifValue> {
    let r = rows(table, mu)?;
    let value = cond_guessing_entropy(&h_given_l(&r)) - cond_guessing_entropy(&h_given_ol(&r));
    Ok(QifValue::from_exact(MeasureId::GE, Exact::Rational(value)))
}

/// `GE[U] = |H|/2 − Σ_{o,ℓ} |H_{o,ℓ}|² / (2|H||L|)`, exact.
pub fn ge_uniform_exact(table: &IoTable) -> BigRational {
    let n = BigInt::from(table.n_high() as u64);
    let sq: BigInt = table.class_sizes().iter().map(|&c| BigInt::from(c) * BigInt::from(c)).sum();
    let denom = BigInt::from(2u32) * &n * BigInt::from(table.n_low() as u64);
    BigRational::new(n, 2.into()) - BigRational::new(sq, denom)
}

pub fn ge_uniform_closed(table: &IoTable) -> QifValue {
    QifValue::from_exact(MeasureId::GE, Exact::Rational(ge_uniform_exact(table)))
}

/// Preimage mass of the experiment's observation.
pub fn experiment_mass(table: &IoTable, e: &Experiment) -> Result<BigRational> {
    let (hi, li) = e.check(table)?;
    Ok(output_mass(&e.belief, table, li, table.output(hi, li)))
}

/// `BE[⟨μ,h,ℓ⟩] = −log Σ_{h′ : M(h′,ℓ) = M(h,ℓ)} μ(h′)`.
pub fn be(table: &IoTable, e: &Experiment) -> Result<QifValue> {
    let mass = experiment_mass(table, e)?;
    debug_assert!(mass.is_positive());
    Ok(QifValue::from_exact(MeasureId::BE, Exact::log2(mass.recip())))
}

/// `BE` by its definition `D(μ → ḣ) − D(μ|o → ḣ)`.
pub fn be_definitional(table: &IoTable, e: &Experiment) -> Result<f64> {
    let (hi, li) = e.check(table)?;
    let o = table.output(hi, li);
    let point = Dist::point_mass(table.high_space().code(hi), table.high_space().clone())?;
    let post = posterior(&e.belief, table, li, o)?;
    Ok(relative_entropy(e.belief.dist(), &point)? - relative_entropy(&post, &point)?)
}

/// `CC = max_ℓ log |M[H, ℓ]|`, with the first maximizing low input as witness.
pub fn cc(table: &IoTable) -> QifValue {
    let (li, count) = cc_count(table);
    QifValue::from_exact(MeasureId::CC, Exact::log2(BigRational::from_integer(count.into())))
        .with_witness(table.low_space().label(li))
}

/// The witnessing low-input index and its output count.
pub fn cc_count(table: &IoTable) -> (usize, u64) {
    let counts = output_counts(table);
    let best = *counts.iter().max().expect("non-empty");
    (counts.iter().position(|&c| c == best).unwrap(), best)
}

/// `max_μ ME[μ]`, which equals `CC`.
pub fn mecc(table: &IoTable) -> QifValue {
    cc(table).with_measure(MeasureId::MECC)
}

/// `GE[U]` of the single column `ℓ`, i.e. `GE[U ⊗ ℓ̇]`.
pub fn ge_column(table: &IoTable, li: usize) -> BigRational {
    let n = BigInt::from(table.n_high() as u64);
    let sq: BigInt = table
        .column_counts(li)
        .values()
        .map(|&c| BigInt::from(c) * BigInt::from(c))
        .sum();
    BigRational::new(n.clone(), 2.into()) - BigRational::new(sq, BigInt::from(2u32) * n)
}

/// `max_μ GE[μ] = max_ℓ GE[U ⊗ ℓ̇]`, with the first maximizing low input.
pub fn gecc(table: &IoTable) -> QifValue {
    let mut best = (0, BigRational::zero());
    for li in 0..table.n_low() {
        let g = ge_column(table, li);
        if li == 0 || g > best.1 {
            best = (li, g);
        }
    }
    QifValue::from_exact(MeasureId::GECC, Exact::Rational(best.1))
        .with_witness(table.low_space().label(best.0))
}

/// Preimage index lists grouped per low column and output, re-exported for
/// callers that need the classes themselves.
pub fn classes(table: &IoTable) -> Vec<std::collections::BTreeMap<u64, Vec<usize>>> {
    preimages(table)
}
