//! MAJSAT reduction gadgets and the dilution construction.
//!
//! Each gadget turns a propositional formula into a program whose leakage is
//! a monotone function of the formula's model count. Comparing against the
//! same gadget built for a reference formula with exactly `2^{n−1}+1` models
//! decides majority satisfiability through a single bounding query.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::boolprog::exec::check_cap;
use crate::boolprog::synth::synthesize;
use crate::boolprog::{io_table, parse_formula_file, EnumConfig, Formula, Program, Stmt, Valuation};
use crate::bounding::{
    decide_be1, decide_be2, decide_cc_bound, decide_ge_bound, decide_me_bound, decide_se_bound, min_mass_experiment,
    Decision,
};
use crate::dist::{Belief, Experiment};
use crate::error::{Error, Result};
use crate::measures::{cc, ge_uniform_exact, me_uniform_closed, ClassCounts, Exact, LadderConfig, MeasureId, QifValue};
use crate::ratio::{format_ratio, ratio};
use crate::space::{bits_to_string, parse_bits};

/// Largest formula the brute-force model counter accepts by default.
pub const ORACLE_CAP: usize = 20;

/// A propositional formula over an explicit, ordered variable list. Models are
/// numbered by their code with the first variable most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropFormula {
    vars: Vec<String>,
    formula: Formula,
}

impl PropFormula {
    pub fn new(vars: Vec<String>, formula: Formula) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.as_str()) {
                return Err(Error::Duplicate { name: v.clone() });
            }
        }
        if let Some(v) = formula.vars().into_iter().find(|v| !seen.contains(v)) {
            return Err(Error::Undeclared { name: v.to_string(), line: 0, col: 0 });
        }
        Ok(PropFormula { vars, formula })
    }

    /// Parses `vars x1, ..., xn;` followed by one expression.
    pub fn parse(text: &str) -> Result<Self> {
        let (vars, formula) = parse_formula_file(text)?;
        PropFormula::new(vars, formula)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// The models, as codes in ascending order.
    pub fn models(&self) -> Result<Vec<u64>> {
        let outputs = self.truth_table(ORACLE_CAP)?;
        Ok((0..outputs.len() as u64).filter(|&c| outputs[c as usize]).collect())
    }

    fn truth_table(&self, cap: usize) -> Result<Vec<bool>> {
        check_cap(self.n(), cap)?;
        let out = fresh_name("sat", &self.vars);
        let program = Program::new(self.vars.clone(), vec![out.clone()], Stmt::assign(out, self.formula.clone()))?;
        let table = io_table(&program, EnumConfig { cap })?;
        Ok(table.outputs().iter().map(|&o| o == 1).collect())
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {};", self.vars.join(", "))?;
        writeln!(f, "{};", self.formula)
    }
}

impl FromStr for PropFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropFormula::parse(s)
    }
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// `x1, ..., xn`.
pub fn canonical_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `#SAT(φ)` by exhaustive enumeration, up to `cap` variables.
pub fn count_sat_capped(phi: &PropFormula, cap: usize) -> Result<u64> {
    Ok(phi.truth_table(cap)?.into_iter().filter(|&b| b).count() as u64)
}

/// `#SAT(φ)` by exhaustive enumeration.
pub fn count_sat(phi: &PropFormula) -> Result<u64> {
    count_sat_capped(phi, ORACLE_CAP)
}

/// `#SAT(φ) > 2^{n−1}`.
pub fn majsat_oracle(phi: &PropFormula) -> Result<bool> {
    Ok(2 * count_sat(phi)? > 1u64 << phi.n())
}

/// A formula whose models are exactly the first `target` assignments in
/// canonical order: the comparison `code(x) < target`, unrolled bit by bit.
pub fn formula_with_count_over(vars: &[String], target: u64) -> Result<PropFormula> {
    let n = vars.len();
    check_cap(n, ORACLE_CAP)?;
    if target > 1u64 << n {
        return Err(Error::Range(format!("{target} models over {n} variables")));
    }
    let formula = if target == 1u64 << n {
        Formula::True
    } else if target == 0 {
        Formula::falsity()
    } else {
        // less(i) ⇔ bits i.. of the code are below bits i.. of the target
        let mut less: Option<Formula> = None;
        for (i, v) in vars.iter().enumerate().rev() {
            let x = Formula::var(v.clone());
            let bit = target >> (n - 1 - i) & 1 == 1;
            less = Some(match (bit, less) {
                (true, None) => Formula::not(x),
                (true, Some(rest)) => Formula::or(Formula::not(x), rest),
                (false, None) => Formula::falsity(),
                (false, Some(rest)) if rest == Formula::falsity() => rest,
                (false, Some(rest)) => Formula::and(Formula::not(x), rest),
            });
        }
        less.expect("at least one variable")
    };
    PropFormula::new(vars.to_vec(), formula)
}

/// [`formula_with_count_over`] on `x1, ..., xn`.
pub fn formula_with_count(n: usize, target: u64) -> Result<PropFormula> {
    formula_with_count_over(&canonical_vars(n), target)
}

/// A formula whose models are exactly the given codes, as a disjunction of
/// minterms.
pub fn formula_from_models(vars: &[String], models: &[u64]) -> Result<PropFormula> {
    let n = vars.len();
    let minterm = |code: u64| {
        Formula::all(vars.iter().enumerate().map(|(i, v)| Formula::literal(v, code >> (n - 1 - i) & 1 == 1)))
    };
    if let Some(&m) = models.iter().find(|&&m| n < 64 && m >> n != 0) {
        return Err(Error::Range(format!("model {m} over {n} variables")));
    }
    PropFormula::new(vars.to_vec(), Formula::any(models.iter().map(|&m| minterm(m))))
}

/// The reduction routes: one per bounding problem shown PP-hard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    SE,
    ME,
    GE,
    CC,
    BE1,
    BE2,
}

impl Route {
    pub const ALL: [Route; 6] = [Route::SE, Route::ME, Route::GE, Route::CC, Route::BE1, Route::BE2];

    pub fn name(self) -> &'static str {
        match self {
            Route::SE => "SE",
            Route::ME => "ME",
            Route::GE => "GE",
            Route::CC => "CC",
            Route::BE1 => "BE1",
            Route::BE2 => "BE2",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::NotApplicable(format!("unknown route `{s}`")))
    }
}

const H1: &str = "H'";
const H2: &str = "H''";

fn check_fresh(phi: &PropFormula, names: &[String]) -> Result<()> {
    match names.iter().find(|n| phi.vars.contains(n)) {
        Some(n) => Err(Error::VariableClash(n.clone())),
        None => Ok(()),
    }
}

fn assign_all(targets: &[String], value: impl Fn(usize) -> Formula) -> Vec<Stmt> {
    targets.iter().enumerate().map(|(i, t)| Stmt::assign(t.clone(), value(i))).collect()
}

fn block(stmts: Vec<Stmt>) -> Stmt {
    Stmt::block(stmts).expect("non-empty block")
}

fn output_vector(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("O_{i}")).collect()
}

fn all_high(phi: &PropFormula) -> Formula {
    Formula::all(phi.vars.iter().map(|v| Formula::var(v.clone())))
}

/// The Shannon-entropy gadget: a first-match case on `(H', ψ, H⃗)`.
///
/// ```text
/// when (true, true, _)  then O⃗ := true⃗; O' := true;  O'' := true
/// when (true, false, _) then O⃗ := H⃗;    O' := true;  O'' := false
/// when (false, _, true⃗) then O⃗ := true⃗; O' := false; O'' := false
/// else if H₁ then O⃗ := true⃗; O' := true; O'' := true
///            else O⃗ := H⃗;    O' := false; O'' := false
/// ```
///
/// The all-true output has `#SAT(ψ) + 2^{x−1} − 1` preimages; every other
/// input has an output of its own.
pub fn gadget_se(psi: &PropFormula) -> Result<Program> {
    let x = psi.n();
    if x == 0 {
        return Err(Error::Range("the gadget needs at least one variable".into()));
    }
    let outs = output_vector(x);
    let (op, opp) = ("O'".to_string(), "O''".to_string());
    let mut fresh = outs.clone();
    fresh.extend([H1.to_string(), op.clone(), opp.clone()]);
    check_fresh(psi, &fresh)?;
    let h = |i: usize| Formula::var(psi.vars[i].clone());
    let row = |vector: &dyn Fn(usize) -> Formula, p: bool, pp: bool| {
        let mut s = assign_all(&outs, vector);
        s.push(Stmt::assign(op.clone(), Formula::constant(p)));
        s.push(Stmt::assign(opp.clone(), Formula::constant(pp)));
        block(s)
    };
    let all_true = |_| Formula::True;
    let body = Stmt::ite(
        Formula::var(H1),
        Stmt::ite(psi.formula.clone(), row(&all_true, true, true), row(&h, true, false)),
        Stmt::ite(
            all_high(psi),
            row(&all_true, false, false),
            Stmt::ite(h(0), row(&all_true, true, true), row(&h, false, false)),
        ),
    );
    let mut highs = vec![H1.to_string()];
    highs.extend(psi.vars.iter().cloned());
    let mut lows = outs;
    lows.extend([op, opp]);
    Program::new(highs, lows, body)
}

/// The min-entropy gadget:
/// `if φ ∨ H' then O_f := true; O⃗ := false⃗ else O_f := false; O⃗ := H⃗`,
/// which has `#SAT(¬φ) + 1` outputs.
pub fn gadget_me(phi: &PropFormula) -> Result<Program> {
    let outs = output_vector(phi.n());
    let of = "O_f".to_string();
    let mut fresh = outs.clone();
    fresh.extend([H1.to_string(), of.clone()]);
    check_fresh(phi, &fresh)?;
    let branch = |flag: bool, vector: &dyn Fn(usize) -> Formula| {
        let mut s = vec![Stmt::assign(of.clone(), Formula::constant(flag))];
        s.extend(assign_all(&outs, vector));
        block(s)
    };
    let body = Stmt::ite(
        Formula::or(phi.formula.clone(), Formula::var(H1)),
        branch(true, &|_| Formula::falsity()),
        branch(false, &|i| Formula::var(phi.vars[i].clone())),
    );
    let mut highs = vec![H1.to_string()];
    highs.extend(phi.vars.iter().cloned());
    let mut lows = vec![of];
    lows.extend(outs);
    Program::new(highs, lows, body)
}

/// The guessing-entropy gadget `O := φ ∨ H'`; `O` is true on
/// `2^n + #SAT(φ)` of the `2^{n+1}` inputs.
pub fn gadget_ge(phi: &PropFormula) -> Result<Program> {
    let o = "O".to_string();
    check_fresh(phi, &[H1.to_string(), o.clone()])?;
    let mut highs = phi.vars.clone();
    highs.push(H1.to_string());
    Program::new(highs, vec![o.clone()], Stmt::assign(o, Formula::or(phi.formula.clone(), Formula::var(H1))))
}

/// The belief gadget: a first-match case on `(H', H'', H⃗)`.
///
/// ```text
/// when (true, true, _)   then if ψ then O := true else O := false
/// when (true, false, true⃗) then O := false
/// when (true, false, _)  then if H₁ then O := true else O := false
/// else O := false
/// ```
///
/// `O` is true on `#SAT(ψ) + 2^{x−1} − 1` of the `2^{x+2}` inputs, and false
/// on strictly more, so the largest belief leakage is attained on `O = true`.
pub fn gadget_be(psi: &PropFormula) -> Result<Program> {
    let x = psi.n();
    if x < 2 {
        return Err(Error::Range("the belief gadget needs at least two variables".into()));
    }
    let o = "O".to_string();
    check_fresh(psi, &[H1.to_string(), H2.to_string(), o.clone()])?;
    let set = |v: bool| Stmt::assign(o.clone(), Formula::constant(v));
    let choose = |g: Formula| Stmt::ite(g, set(true), set(false));
    let body = Stmt::ite(
        Formula::var(H1),
        Stmt::ite(
            Formula::var(H2),
            choose(psi.formula.clone()),
            Stmt::ite(all_high(psi), set(false), choose(Formula::var(psi.vars[0].clone()))),
        ),
        set(false),
    );
    let mut highs = vec![H1.to_string(), H2.to_string()];
    highs.extend(psi.vars.iter().cloned());
    Program::new(highs, vec![o], body)
}

/// The gadget a route bounds.
pub fn gadget_for(route: Route, phi: &PropFormula) -> Result<Program> {
    match route {
        Route::SE => gadget_se(phi),
        Route::ME | Route::CC => gadget_me(phi),
        Route::GE => gadget_ge(phi),
        Route::BE1 | Route::BE2 => gadget_be(phi),
    }
}

/// The high input of the belief gadget used by the BE1 route:
/// `H' = true, H'' = false, H₁ = true, H₂ = false`, all other variables false.
/// The gadget outputs `true` on it for every formula.
pub fn be1_high_input(n: usize) -> Valuation {
    let mut bits = vec![false; n + 2];
    bits[0] = true;
    bits[2] = true;
    Valuation::new(bits)
}

/// `max_h BE[⟨U,h⟩]` of a program without low inputs, exact.
fn max_belief(program: &Program, config: EnumConfig) -> Result<QifValue> {
    let table = io_table(program, config)?;
    let (_, _, mass) = min_mass_experiment(&table, &Belief::uniform(table.high_space().clone())?)?;
    Ok(QifValue::from_exact(MeasureId::BE, Exact::log2(mass.recip())))
}

/// The measured value of the route's gadget on a formula.
pub fn route_value(route: Route, phi: &PropFormula, config: EnumConfig) -> Result<QifValue> {
    let program = gadget_for(route, phi)?;
    if matches!(route, Route::BE1 | Route::BE2) {
        return max_belief(&program, config);
    }
    let table = io_table(&program, config)?;
    Ok(match route {
        Route::SE => {
            let counts = ClassCounts::from_table(&table);
            match counts.se_exact() {
                Some(r) => QifValue::from_exact(MeasureId::SE, Exact::Rational(r)),
                None => QifValue::from_float(MeasureId::SE, counts.se_f64()),
            }
        }
        Route::ME => me_uniform_closed(&table),
        Route::CC => cc(&table),
        Route::GE => QifValue::from_exact(MeasureId::GE, Exact::Rational(ge_uniform_exact(&table))),
        Route::BE1 | Route::BE2 => unreachable!("handled above"),
    })
}

/// One executed reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionRun {
    pub route: Route,
    pub formula: PropFormula,
    pub gadget: Program,
    /// The route's gadget measured on the reference formula.
    pub reference: QifValue,
    pub q: BigRational,
    pub decision: Decision,
    /// `φ ∈ MAJSAT` as answered by the bounding decision.
    pub verdict: bool,
    /// `φ ∈ MAJSAT` by brute-force counting.
    pub oracle_verdict: bool,
    pub count: u64,
}

impl ReductionRun {
    pub fn agrees(&self) -> bool {
        self.verdict == self.oracle_verdict
    }

    pub fn to_json(&self) -> Value {
        json!({
            "route": self.route.name(),
            "formula": self.formula.to_string(),
            "n": self.formula.n(),
            "gadget": self.gadget.to_string(),
            "threshold": format_ratio(&self.q),
            "reference": self.reference.to_json(),
            "decision": self.decision.to_json(),
            "verdict": self.verdict,
            "oracleVerdict": self.oracle_verdict,
            "count": self.count,
        })
    }
}

impl fmt::Display for ReductionRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "route {}: threshold q = {} from the reference gadget", self.route, format_ratio(&self.q))?;
        writeln!(f, "  {}", self.decision)?;
        writeln!(
            f,
            "  in MAJSAT: {} (brute force: {}, {} of {} models)",
            self.verdict,
            self.oracle_verdict,
            self.count,
            1u64 << self.formula.n()
        )
    }
}

/// Decides `φ ∈ MAJSAT` through one bounding query on the route's gadget.
/// The threshold is the gadget's value on a reference formula with exactly
/// `2^{n−1}+1` models; the belief routes use the constant 2, which is that
/// value. Membership holds exactly when the query is in bound.
pub fn decide_majsat_via(route: Route, phi: &PropFormula, config: EnumConfig) -> Result<ReductionRun> {
    let n = phi.n();
    if n < 2 {
        return Err(Error::Range("reductions need at least two variables".into()));
    }
    let count = count_sat(phi)?;
    let psi = formula_with_count_over(phi.vars(), (1u64 << (n - 1)) + 1)?;
    let reference = route_value(route, &psi, config)?;
    let q = match route {
        Route::BE1 | Route::BE2 => ratio(2, 1),
        _ => reference
            .exact
            .as_ref()
            .and_then(Exact::as_rational)
            .cloned()
            .ok_or_else(|| Error::NotApplicable(format!("reference value {reference} is not rational")))?,
    };
    let gadget = gadget_for(route, phi)?;
    let table = io_table(&gadget, config)?;
    let decision = match route {
        Route::SE => decide_se_bound(&table, &q, &LadderConfig::default())?,
        Route::ME => decide_me_bound(&table, &q)?,
        Route::CC => decide_cc_bound(&table, &q)?,
        Route::GE => decide_ge_bound(&table, &q)?,
        Route::BE1 => {
            let belief = Belief::uniform(table.high_space().clone())?;
            decide_be1(&table, &Experiment::new(belief, be1_high_input(n), Valuation::empty()), &q)?
        }
        Route::BE2 => decide_be2(&table, &Belief::uniform(table.high_space().clone())?, &q)?,
    };
    let verdict = decision
        .in_bound()
        .ok_or_else(|| Error::NotApplicable(format!("the {route} decision is indeterminate")))?;
    Ok(ReductionRun {
        route,
        formula: phi.clone(),
        gadget,
        reference,
        q,
        decision,
        verdict,
        oracle_verdict: 2 * count > 1u64 << n,
        count,
    })
}

/// All routes on one formula, in route order.
pub fn decide_majsat_all(phi: &PropFormula, config: EnumConfig) -> Result<Vec<ReductionRun>> {
    Route::ALL.par_iter().map(|&r| decide_majsat_via(r, phi, config)).collect()
}

/// A finite set of traces `((h, ℓ), o)` over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    pub high_vars: Vec<String>,
    pub low_inputs: Vec<String>,
    pub output_vars: Vec<String>,
    /// `(h, ℓ, o)` codes.
    pub traces: Vec<(u64, u64, u64)>,
}

#[derive(Deserialize)]
struct TraceFile {
    high: Vec<String>,
    #[serde(default)]
    low: Vec<String>,
    outputs: Vec<String>,
    traces: Vec<TraceEntry>,
}

#[derive(Deserialize)]
struct TraceEntry {
    h: String,
    #[serde(default)]
    l: String,
    o: String,
}

impl TraceSet {
    /// Checks that the variables are distinct and that no input appears with
    /// two outputs.
    pub fn new(
        high_vars: Vec<String>,
        low_inputs: Vec<String>,
        output_vars: Vec<String>,
        traces: Vec<(u64, u64, u64)>,
    ) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for v in high_vars.iter().chain(&low_inputs).chain(&output_vars) {
            if !seen.insert(v.clone()) {
                return Err(Error::Duplicate { name: v.clone() });
            }
        }
        if output_vars.is_empty() {
            return Err(Error::NoLowVariable);
        }
        if traces.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut map = BTreeMap::new();
        for &(h, l, o) in &traces {
            if let Some(&prev) = map.get(&(h, l)) {
                if prev != o {
                    return Err(Error::InconsistentTraces(format!(
                        "({}, {})",
                        bits_to_string(h, high_vars.len()),
                        bits_to_string(l, low_inputs.len())
                    )));
                }
            }
            map.insert((h, l), o);
        }
        Ok(TraceSet { high_vars, low_inputs, output_vars, traces })
    }

    /// Reads `{"high": [..], "low": [..], "outputs": [..], "traces":
    /// [{"h": "01", "l": "1", "o": "0"}, ..]}`; `low` and `l` may be omitted.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: TraceFile = serde_json::from_str(text).map_err(|e| Error::Io(format!("trace file: {e}")))?;
        let traces = file
            .traces
            .iter()
            .map(|t| {
                Ok((
                    parse_bits(&t.h, file.high.len())?,
                    parse_bits(&t.l, file.low.len())?,
                    parse_bits(&t.o, file.outputs.len())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        TraceSet::new(file.high, file.low, file.outputs, traces)
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

/// Names of the padding low inputs added by [`dilution_family`].
pub fn padding_vars(t: usize, taken: &[String]) -> Vec<String> {
    (1..=t).map(|i| fresh_name(&format!("pad_{i}"), taken)).collect()
}

/// A program containing every trace of `traces`, padded with `t` fresh low
/// inputs. The traces sit at the all-false padding value; every other input
/// produces the first trace's output. The fresh inputs multiply the low space
/// without adding outputs, so any fixed trace set's leakage under the uniform
/// distribution shrinks towards zero as `t` grows.
pub fn dilution_family(traces: &TraceSet, t: usize) -> Result<Program> {
    let taken: Vec<String> = traces
        .high_vars
        .iter()
        .chain(&traces.low_inputs)
        .chain(&traces.output_vars)
        .cloned()
        .collect();
    let pads = padding_vars(t, &taken);
    let mut low_inputs = traces.low_inputs.clone();
    low_inputs.extend(pads);
    let mut low_vars = low_inputs.clone();
    low_vars.extend(traces.output_vars.iter().cloned());
    let map: BTreeMap<(u64, u64), u64> = traces.traces.iter().map(|&(h, l, o)| ((h, l), o)).collect();
    let default = traces.traces[0].2;
    let ow = traces.output_vars.len();
    synthesize(&traces.high_vars, &low_inputs, &low_vars, |h, l| {
        let base = if l & ((1u64 << t) - 1) == 0 { map.get(&(h, l >> t)).copied() } else { None };
        l << ow | base.unwrap_or(default)
    })
}

/// `log((|T| + 2^{t'}) / 2^{t'})`, an upper bound on `ME[U]` of a dilution
/// program with a `2^{t'}`-point low space.
pub fn dilution_me_bound(n_traces: usize, low_bits: usize) -> Exact {
    let space = BigRational::from_integer(num_bigint::BigInt::one() << low_bits);
    Exact::log2((BigRational::from_integer((n_traces as u64).into()) + &space) / space)
}
