//! Deciding the bounding problems `X(M) ≤ q` and non-interference.
//!
//! Every decision reduces to integer or rational arithmetic when the measured
//! value is the logarithm of a rational or is itself rational; only Shannon
//! leakage with irrational terms goes through the guarded precision ladder.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::boolprog::exec::output_counts;
use crate::boolprog::{IoTable, Valuation};
use crate::dist::{output_mass, Belief, Experiment};
use crate::error::{Error, Result};
use crate::measures::{
    cc, compare_se, experiment_mass, ge_uniform_closed, gecc, me_uniform_closed, round_sig,
    ClassCounts, Exact, LadderConfig, MeasureId, QifValue, Stage,
};
use crate::ratio::{count_within_pow2, exponent, format_ratio, positive_parts};

/// The eleven bounding problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    SeU,
    MeU,
    GeU,
    CC,
    BE1,
    BE2,
    SECC,
    MECC,
    GECC,
    BE1CC,
    BE2CC,
}

impl ProblemId {
    pub const ALL: [ProblemId; 11] = [
        ProblemId::SeU,
        ProblemId::MeU,
        ProblemId::GeU,
        ProblemId::CC,
        ProblemId::BE1,
        ProblemId::BE2,
        ProblemId::SECC,
        ProblemId::MECC,
        ProblemId::GECC,
        ProblemId::BE1CC,
        ProblemId::BE2CC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::SeU => "SE_U",
            ProblemId::MeU => "ME_U",
            ProblemId::GeU => "GE_U",
            ProblemId::CC => "CC",
            ProblemId::BE1 => "BE1",
            ProblemId::BE2 => "BE2",
            ProblemId::SECC => "SECC",
            ProblemId::MECC => "MECC",
            ProblemId::GECC => "GECC",
            ProblemId::BE1CC => "BE1CC",
            ProblemId::BE2CC => "BE2CC",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    /// Accepts the canonical names, and `SE`, `ME`, `GE` for the uniform-prior problems.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let alias = match t.as_str() {
            "SE" => "SE_U",
            "ME" => "ME_U",
            "GE" => "GE_U",
            other => other,
        };
        ProblemId::ALL
            .into_iter()
            .find(|p| p.name() == alias)
            .ok_or_else(|| Error::NotApplicable(format!("unknown problem `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    In,
    Out,
    Indeterminate,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::In
        } else {
            Verdict::Out
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::In => Some(true),
            Verdict::Out => Some(false),
            Verdict::Indeterminate => None,
        }
    }

    fn to_json(self) -> Value {
        match self {
            Verdict::In => json!(true),
            Verdict::Out => json!(false),
            Verdict::Indeterminate => json!("indeterminate"),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::In => "in bound",
            Verdict::Out => "out of bound",
            Verdict::Indeterminate => "indeterminate at precision cap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactInteger,
    ExactRational,
    FloatGuarded,
    NoninterferenceEquivalence,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactInteger => "exact-integer",
            Method::ExactRational => "exact-rational",
            Method::FloatGuarded => "float-guarded",
            Method::NoninterferenceEquivalence => "noninterference-equivalence",
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Method::FloatGuarded)
    }
}

/// A decided bounding query with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub problem: ProblemId,
    pub q: BigRational,
    pub verdict: Verdict,
    pub method: Method,
    /// The measured value; `None` for unbounded suprema (belief capacities of
    /// interferent programs).
    pub value: Option<QifValue>,
    /// `value − q` for float-guarded decisions.
    pub margin: Option<f64>,
    pub note: Option<String>,
}

impl Decision {
    pub fn in_bound(&self) -> Option<bool> {
        self.verdict.as_bool()
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "problem": self.problem.name(),
            "q": format_ratio(&self.q),
            "inBound": self.verdict.to_json(),
            "method": self.method.name(),
            "value": self.value.as_ref().map(QifValue::to_json),
            "margin": self.margin.map(round_sig),
        });
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        v
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}: {} [{}]", self.problem, format_ratio(&self.q), self.verdict, self.method.name())?;
        match &self.value {
            Some(v) => write!(f, "; {v}")?,
            None => write!(f, "; supremum unbounded")?,
        }
        if let Some(m) = self.margin {
            write!(f, "; margin {}", crate::measures::format_float(m))?;
        }
        if let Some(n) = &self.note {
            write!(f, "; {n}")?;
        }
        Ok(())
    }
}

/// Every low column of the table is constant.
pub fn noninterferent(table: &IoTable) -> bool {
    (0..table.n_low()).all(|li| noninterferent_at(table, li))
}

/// The column of low input `li` is constant.
pub fn noninterferent_at(table: &IoTable, li: usize) -> bool {
    let mut col = table.column(li);
    let first = col.next();
    col.all(|o| Some(o) == first)
}

/// `log(num/den) ≤ q`, decided as `num^b ≤ 2^a · den^b`.
pub fn log_ratio_within(num: &BigUint, den: &BigUint, q: &BigRational) -> Result<bool> {
    let (a, b) = positive_parts(q)?;
    if num <= den {
        return Ok(true);
    }
    let b32 = exponent(&b)?;
    // num^b < 2^(b·bits(num)) ≤ 2^a settles large bounds without big powers
    if BigUint::from(num.bits()) * &b <= a {
        return Ok(true);
    }
    let a = a.to_u64().expect("a < b·bits(num) fits");
    Ok(num.pow(b32) <= (BigUint::one() << a) * den.pow(b32))
}

fn q_zero_note() -> Option<String> {
    Some("q = 0 decided as non-interference".into())
}

fn check_q(q: &BigRational) -> Result<bool> {
    if q.is_negative() {
        return Err(Error::NonPositiveBound(format_ratio(q)));
    }
    Ok(q.is_zero())
}

fn zero_decision(problem: ProblemId, q: &BigRational, holds: bool, value: Option<QifValue>) -> Decision {
    Decision {
        problem,
        q: q.clone(),
        verdict: Verdict::from_bool(holds),
        method: Method::NoninterferenceEquivalence,
        value,
        margin: None,
        note: q_zero_note(),
    }
}

fn exact_decision(problem: ProblemId, q: &BigRational, holds: bool, method: Method, value: QifValue) -> Decision {
    Decision { problem, q: q.clone(), verdict: Verdict::from_bool(holds), method, value: Some(value), margin: None, note: None }
}

/// `CC(M) ≤ q`; also answers `SECC` and `MECC`, whose values equal `CC`.
pub fn decide_capacity(table: &IoTable, problem: ProblemId, q: &BigRational) -> Result<Decision> {
    let measure = match problem {
        ProblemId::CC => MeasureId::CC,
        ProblemId::MECC => MeasureId::MECC,
        ProblemId::SECC => MeasureId::CC,
        other => return Err(Error::NotApplicable(format!("{other} is not a capacity problem"))),
    };
    let value = cc(table).with_measure(measure);
    if check_q(q)? {
        return Ok(zero_decision(problem, q, noninterferent(table), Some(value)));
    }
    let count = *output_counts(table).iter().max().expect("non-empty");
    let holds = count_within_pow2(&BigUint::from(count), q)?;
    Ok(exact_decision(problem, q, holds, Method::ExactInteger, value))
}

pub fn decide_cc_bound(table: &IoTable, q: &BigRational) -> Result<Decision> {
    decide_capacity(table, ProblemId::CC, q)
}

/// `ME[U](M) ≤ q`, decided as `|O_L|^b ≤ 2^a · |L|^b`.
pub fn decide_me_bound(table: &IoTable, q: &BigRational) -> Result<Decision> {
    let value = me_uniform_closed(table);
    if check_q(q)? {
        return Ok(zero_decision(ProblemId::MeU, q, noninterferent(table), Some(value)));
    }
    let pairs: u64 = output_counts(table).iter().sum();
    let holds = log_ratio_within(&BigUint::from(pairs), &BigUint::from(table.n_low() as u64), q)?;
    Ok(exact_decision(ProblemId::MeU, q, holds, Method::ExactInteger, value))
}

/// `GE[U](M) ≤ q`, an exact rational comparison.
pub fn decide_ge_bound(table: &IoTable, q: &BigRational) -> Result<Decision> {
    let value = ge_uniform_closed(table);
    if check_q(q)? {
        return Ok(zero_decision(ProblemId::GeU, q, noninterferent(table), Some(value)));
    }
    let holds = value.exact.as_ref().and_then(Exact::as_rational).expect("rational") <= q;
    Ok(exact_decision(ProblemId::GeU, q, holds, Method::ExactRational, value))
}

/// `max_μ GE[μ](M) ≤ q`, via the per-column maximum.
pub fn decide_gecc_bound(table: &IoTable, q: &BigRational) -> Result<Decision> {
    let value = gecc(table);
    if check_q(q)? {
        return Ok(zero_decision(ProblemId::GECC, q, noninterferent(table), Some(value)));
    }
    let holds = value.exact.as_ref().and_then(Exact::as_rational).expect("rational") <= q;
    Ok(exact_decision(ProblemId::GECC, q, holds, Method::ExactRational, value))
}

/// `SE[U](M) ≤ q`: exact when the value is a dyadic rational, otherwise
/// through the precision ladder, which may report indeterminate.
pub fn decide_se_bound(table: &IoTable, q: &BigRational, ladder: &LadderConfig) -> Result<Decision> {
    let counts = ClassCounts::from_table(table);
    if check_q(q)? {
        let value = crate::measures::se_uniform(table);
        return Ok(zero_decision(ProblemId::SeU, q, noninterferent(table), Some(value)));
    }
    if let Some(r) = counts.se_exact() {
        let holds = &r <= q;
        let value = QifValue::from_exact(MeasureId::SE, Exact::Rational(r));
        return Ok(exact_decision(ProblemId::SeU, q, holds, Method::ExactRational, value));
    }
    let outcome = compare_se(&counts, q, ladder)?;
    let mut value = QifValue::from_float(MeasureId::SE, outcome.value.max(0.0));
    if outcome.stage != Stage::Float {
        value.precision_bits = outcome.precision_bits();
    }
    let note = match outcome.stage {
        Stage::Float => None,
        Stage::Interval(p) => Some(format!("escalated to {p}-bit intervals")),
        Stage::Certificate => Some("settled by exact integer certificate".into()),
        Stage::Exhausted => Some(format!(
            "within {:e} of the bound at every precision up to {} bits",
            ladder.epsilon,
            outcome.tried.last().copied().unwrap_or(64)
        )),
    };
    Ok(Decision {
        problem: ProblemId::SeU,
        q: q.clone(),
        verdict: outcome.in_bound.map_or(Verdict::Indeterminate, Verdict::from_bool),
        method: Method::FloatGuarded,
        value: Some(value),
        margin: Some(outcome.margin),
        note,
    })
}

/// `BE[⟨μ,h,ℓ⟩](M) ≤ q`, decided as `den^b ≤ 2^a · num^b` for the preimage
/// mass `num/den`.
pub fn decide_be1(table: &IoTable, experiment: &Experiment, q: &BigRational) -> Result<Decision> {
    let mass = experiment_mass(table, experiment)?;
    let value = QifValue::from_exact(MeasureId::BE, Exact::log2(mass.recip()));
    if check_q(q)? {
        let (_, li) = experiment.check(table)?;
        return Ok(zero_decision(ProblemId::BE1, q, noninterferent_at(table, li), Some(value)));
    }
    let holds = log_ratio_within(mass.denom().magnitude(), mass.numer().magnitude(), q)?;
    Ok(exact_decision(ProblemId::BE1, q, holds, Method::ExactInteger, value))
}

/// The experiment with the smallest preimage mass over all `(h, ℓ)`; ties go
/// to the first in row order.
pub fn min_mass_experiment(table: &IoTable, belief: &Belief) -> Result<(usize, usize, BigRational)> {
    if belief.dist().space() != table.high_space() {
        return Err(Error::DimensionMismatch("belief is not over the high input space".into()));
    }
    let mut best: Option<(usize, usize, BigRational)> = None;
    for li in 0..table.n_low() {
        let mut mass: BTreeMap<u64, BigRational> = BTreeMap::new();
        for hi in 0..table.n_high() {
            *mass.entry(table.output(hi, li)).or_insert_with(BigRational::zero) += belief.dist().weight(hi);
        }
        for hi in 0..table.n_high() {
            let m = &mass[&table.output(hi, li)];
            if best.as_ref().is_none_or(|(_, _, b)| m < b) {
                best = Some((hi, li, m.clone()));
            }
        }
    }
    debug_assert!(best.as_ref().is_some_and(|(hi, li, m)| *m == output_mass(belief, table, *li, table.output(*hi, *li))));
    Ok(best.expect("non-empty table"))
}

/// `∀h, ℓ. BE[⟨μ,h,ℓ⟩](M) ≤ q`, decided on the smallest preimage mass.
pub fn decide_be2(table: &IoTable, belief: &Belief, q: &BigRational) -> Result<Decision> {
    let (_, li, mass) = min_mass_experiment(table, belief)?;
    let value = QifValue::from_exact(MeasureId::BE, Exact::log2(mass.recip()))
        .with_witness(table.low_space().label(li));
    if check_q(q)? {
        return Ok(zero_decision(ProblemId::BE2, q, noninterferent(table), Some(value)));
    }
    let holds = log_ratio_within(mass.denom().magnitude(), mass.numer().magnitude(), q)?;
    Ok(exact_decision(ProblemId::BE2, q, holds, Method::ExactInteger, value))
}

/// Belief channel capacities: with a low input `li`, `∀μ. BE[⟨μ,h,ℓ⟩] ≤ q`
/// (BE1CC); without, `∀μ,h,ℓ` (BE2CC). Both hold exactly when the program is
/// non-interferent (at `ℓ`, resp. everywhere), whatever `q ≥ 0`.
pub fn decide_cclike_belief(table: &IoTable, q: &BigRational, li: Option<usize>) -> Result<Decision> {
    check_q(q)?;
    let (problem, holds) = match li {
        Some(li) => {
            if li >= table.n_low() {
                return Err(Error::Range(format!("low input index {li}")));
            }
            (ProblemId::BE1CC, noninterferent_at(table, li))
        }
        None => (ProblemId::BE2CC, noninterferent(table)),
    };
    let value = holds.then(|| QifValue::from_exact(MeasureId::BE, Exact::Rational(BigRational::zero())));
    Ok(Decision {
        problem,
        q: q.clone(),
        verdict: Verdict::from_bool(holds),
        method: Method::NoninterferenceEquivalence,
        value,
        margin: None,
        note: None,
    })
}

/// Optional experiment arguments for the belief problems.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExperimentArgs {
    /// Defaults to the uniform belief.
    pub belief: Option<Belief>,
    pub h: Option<Valuation>,
    pub l: Option<Valuation>,
}

/// A bounding problem instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundQuery {
    pub problem: ProblemId,
    pub q: BigRational,
    pub args: ExperimentArgs,
}

impl BoundQuery {
    pub fn new(problem: ProblemId, q: BigRational) -> Self {
        BoundQuery { problem, q, args: ExperimentArgs::default() }
    }
}

fn low_index(table: &IoTable, l: Option<&Valuation>) -> Result<usize> {
    match l {
        Some(l) if l.len() == table.low_space().width() => table
            .low_space()
            .index_of(l.code())
            .ok_or_else(|| Error::PointNotInSpace(l.to_string())),
        Some(l) => Err(Error::WidthMismatch { expected: table.low_space().width(), got: l.len() }),
        None if table.low_space().width() == 0 => Ok(0),
        None => Err(Error::NotApplicable("this problem needs a low input (--low)".into())),
    }
}

/// Decides any query against a semantics table.
pub fn decide(table: &IoTable, query: &BoundQuery, ladder: &LadderConfig) -> Result<Decision> {
    let q = &query.q;
    let belief = || -> Result<Belief> {
        match &query.args.belief {
            Some(b) => Ok(b.clone()),
            None => Belief::uniform(table.high_space().clone()),
        }
    };
    match query.problem {
        ProblemId::SeU => decide_se_bound(table, q, ladder),
        ProblemId::MeU => decide_me_bound(table, q),
        ProblemId::GeU => decide_ge_bound(table, q),
        ProblemId::CC | ProblemId::SECC | ProblemId::MECC => decide_capacity(table, query.problem, q),
        ProblemId::GECC => decide_gecc_bound(table, q),
        ProblemId::BE1 => {
            let h = query
                .args
                .h
                .clone()
                .ok_or_else(|| Error::NotApplicable("BE1 needs a high input (--high)".into()))?;
            let li = low_index(table, query.args.l.as_ref())?;
            let l = Valuation::from_code(table.low_space().code(li), table.low_space().width());
            decide_be1(table, &Experiment::new(belief()?, h, l), q)
        }
        ProblemId::BE2 => decide_be2(table, &belief()?, q),
        ProblemId::BE1CC => decide_cclike_belief(table, q, Some(low_index(table, query.args.l.as_ref())?)),
        ProblemId::BE2CC => decide_cclike_belief(table, q, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolprog::{io_table, parse_program, EnumConfig};
    use crate::ratio::{parse_rational, ratio};
    use num_bigint::BigInt;

    fn table(text: &str) -> IoTable {
        io_table(&parse_program(text).unwrap(), EnumConfig::default()).unwrap()
    }

    fn m1() -> IoTable {
        table("high a, b; low o; o := !(!a && b)")
    }

    fn m2() -> IoTable {
        table("high a, b; low x, y; x := a; y := b")
    }

    fn ex4() -> IoTable {
        table("high x,y; low z,w; z:=x; w:=y; if x && y then z:=!z else w:=!w")
    }

    fn constant() -> IoTable {
        table("high a, b; low o; o := true")
    }

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn experiment(t: &IoTable, h: &str) -> Experiment {
        Experiment::new(
            Belief::uniform(t.high_space().clone()).unwrap(),
            Valuation::parse(h).unwrap(),
            Valuation::empty(),
        )
    }

    #[test]
    fn noninterference_checks() {
        assert!(noninterferent(&constant()));
        assert!(!noninterferent(&m1()));
        let guarded = table("high h; low l, o; if l then o := true else o := false");
        assert!(noninterferent(&guarded));
        let mixed = table("high h; low l, o; if l then o := h else o := false");
        assert!(noninterferent_at(&mixed, 0) && !noninterferent_at(&mixed, 1));
    }

    #[test]
    fn capacity_decisions() {
        assert_eq!(decide_cc_bound(&m1(), &q("1")).unwrap().verdict, Verdict::In);
        assert_eq!(decide_cc_bound(&m2(), &q("1")).unwrap().verdict, Verdict::Out);
        let d = decide_cc_bound(&ex4(), &q("8/5")).unwrap();
        // 3^5 = 243 ≤ 2^8 = 256
        assert!(BigInt::from(3).pow(5) <= BigInt::from(2).pow(8));
        assert_eq!((d.verdict, d.method), (Verdict::In, Method::ExactInteger));
        assert_eq!(decide_cc_bound(&ex4(), &q("1.58")).unwrap().verdict, Verdict::Out);
        let j = decide_cc_bound(&m2(), &q("1")).unwrap().to_json();
        assert_eq!(j["inBound"], false);
        assert_eq!(j["problem"], "CC");
        assert_eq!(j["margin"], Value::Null);
    }

    #[test]
    fn min_entropy_decisions() {
        for s in ["1", "3/2", "1.99"] {
            assert_eq!(decide_me_bound(&m1(), &q(s)).unwrap().verdict, Verdict::In);
            assert_eq!(decide_me_bound(&m2(), &q(s)).unwrap().verdict, Verdict::Out);
        }
        assert_eq!(decide_me_bound(&constant(), &q("1/1000")).unwrap().verdict, Verdict::In);
        // 3^2 = 9 > 2^3 = 8
        assert_eq!(decide_me_bound(&ex4(), &q("3/2")).unwrap().verdict, Verdict::Out);
    }

    #[test]
    fn guessing_decisions() {
        for s in ["3/4", "1", "1.49"] {
            assert_eq!(decide_ge_bound(&m1(), &q(s)).unwrap().verdict, Verdict::In);
            assert_eq!(decide_ge_bound(&m2(), &q(s)).unwrap().verdict, Verdict::Out);
        }
        assert_eq!(decide_ge_bound(&ex4(), &q("5/4")).unwrap().verdict, Verdict::In);
        assert_eq!(decide_ge_bound(&ex4(), &q("6/5")).unwrap().verdict, Verdict::Out);
        assert_eq!(decide_gecc_bound(&m1(), &q("3/4")).unwrap().verdict, Verdict::In);
        assert_eq!(decide_gecc_bound(&m2(), &q("1")).unwrap().verdict, Verdict::Out);
        assert_eq!(decide_gecc_bound(&constant(), &q("1/10")).unwrap().verdict, Verdict::In);
    }

    #[test]
    fn shannon_decisions() {
        let cfg = LadderConfig::default();
        let d = decide_se_bound(&m1(), &q("1"), &cfg).unwrap();
        assert_eq!((d.verdict, d.method), (Verdict::In, Method::FloatGuarded));
        assert!(d.margin.unwrap() < 0.0);
        assert_eq!(decide_se_bound(&m2(), &q("1"), &cfg).unwrap().verdict, Verdict::Out);
        let d = decide_se_bound(&ex4(), &q("3/2"), &cfg).unwrap();
        assert_eq!((d.verdict, d.method), (Verdict::In, Method::ExactRational));
    }

    #[test]
    fn belief_decisions() {
        let t1 = m1();
        let t2 = m2();
        assert_eq!(decide_be1(&t1, &experiment(&t1, "00"), &q("1")).unwrap().verdict, Verdict::In);
        assert_eq!(decide_be1(&t2, &experiment(&t2, "00"), &q("1")).unwrap().verdict, Verdict::Out);
        assert_eq!(decide_be1(&t1, &experiment(&t1, "01"), &q("2")).unwrap().verdict, Verdict::In);
        assert_eq!(decide_be1(&t1, &experiment(&t1, "01"), &q("1.99")).unwrap().verdict, Verdict::Out);
        let u = Belief::uniform(t1.high_space().clone()).unwrap();
        assert_eq!(decide_be2(&t1, &u, &q("1")).unwrap().verdict, Verdict::Out);
        assert_eq!(decide_be2(&t2, &u, &q("1")).unwrap().verdict, Verdict::Out);
        assert_eq!(decide_be2(&constant(), &u, &q("1/2")).unwrap().verdict, Verdict::In);
    }

    #[test]
    fn belief_capacities_collapse_to_noninterference() {
        for s in ["0.1", "1", "10"] {
            let d = decide_cclike_belief(&m1(), &q(s), Some(0)).unwrap();
            assert_eq!((d.verdict, d.method), (Verdict::Out, Method::NoninterferenceEquivalence));
            assert!(d.value.is_none());
            assert_eq!(decide_cclike_belief(&constant(), &q(s), None).unwrap().verdict, Verdict::In);
        }
    }

    #[test]
    fn zero_bound_routes_to_noninterference() {
        let cfg = LadderConfig::default();
        for p in ProblemId::ALL {
            let mut query = BoundQuery::new(p, ratio(0, 1));
            query.args.h = Some(Valuation::parse("00").unwrap());
            let d1 = decide(&m1(), &query, &cfg).unwrap();
            let d0 = decide(&constant(), &query, &cfg).unwrap();
            assert_eq!(d1.verdict, Verdict::Out, "{p}");
            assert_eq!(d0.verdict, Verdict::In, "{p}");
            assert_eq!(d1.method, Method::NoninterferenceEquivalence);
        }
        assert!(decide_cc_bound(&m1(), &q("-1")).is_err());
    }

    #[test]
    fn problem_names_parse() {
        for p in ProblemId::ALL {
            assert_eq!(p.name().parse::<ProblemId>().unwrap(), p);
        }
        assert_eq!("se".parse::<ProblemId>().unwrap(), ProblemId::SeU);
        assert!("XX".parse::<ProblemId>().is_err());
    }

    #[test]
    fn log_ratio_test_cases() {
        let n = |x: u64| BigUint::from(x);
        assert!(log_ratio_within(&n(3), &n(1), &q("8/5")).unwrap());
        assert!(!log_ratio_within(&n(3), &n(1), &q("3/2")).unwrap());
        assert!(log_ratio_within(&n(1), &n(3), &q("1/100")).unwrap());
        assert!(log_ratio_within(&n(4), &n(2), &q("1")).unwrap());
        assert!(!log_ratio_within(&n(5), &n(2), &q("1")).unwrap());
        assert!(log_ratio_within(&n(1 << 40), &n(1), &q("1000000")).unwrap());
    }
}
