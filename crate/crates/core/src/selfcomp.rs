//! Self-composition and k-safety counterexamples.
//!
//! A composed program runs `k` renamed copies of a base program on shared low
//! inputs. Copy `i` reads its own high variables `h_i` and writes its own low
//! variables `l_i`, which it initializes from the shared low inputs; the final
//! `l_i` values are the copy's output snapshot. An assertion over the
//! snapshots turns a k-safety property into a plain safety check, decided here
//! by exhaustive enumeration.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::boolprog::exec::check_cap;
use crate::boolprog::{EnumConfig, Formula, IoTable, Machine, Program, Stmt, Valuation};
use crate::bounding::{decide_cc_bound, ProblemId, Verdict};
use crate::error::{Error, Result};
use crate::measures::{cc, cc_count, ge_uniform_exact, Exact, MeasureId, QifValue};
use crate::ratio::{floor_pow2, format_ratio};
use crate::space::bits_to_string;

/// `k` renamed copies of a base program, with an optional final assertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedProgram {
    copies: usize,
    base: Program,
    composed: Program,
    assertion: Option<Formula>,
}

/// Name of variable `v` in copy `i` (1-based).
pub fn copy_name(v: &str, i: usize) -> String {
    format!("{v}_{i}")
}

impl ComposedProgram {
    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn base(&self) -> &Program {
        &self.base
    }

    pub fn program(&self) -> &Program {
        &self.composed
    }

    pub fn assertion(&self) -> Option<&Formula> {
        self.assertion.as_ref()
    }

    pub fn with_assertion(mut self, assertion: Formula) -> Self {
        self.assertion = Some(assertion);
        self
    }

    /// Snapshot variables of copy `i`, in the base program's low order.
    pub fn snapshot(&self, i: usize) -> Vec<String> {
        self.base.low_vars().iter().map(|v| copy_name(v, i)).collect()
    }

    /// `⋀_v (v_i == v_j)`.
    pub fn outputs_equal(&self, i: usize, j: usize) -> Formula {
        Formula::all(
            self.snapshot(i)
                .into_iter()
                .zip(self.snapshot(j))
                .map(|(a, b)| Formula::iff(Formula::var(a), Formula::var(b))),
        )
    }

    /// Surface text: the composed program followed by `assert <expr>;`.
    pub fn to_text(&self) -> String {
        let mut s = self.composed.to_string();
        if let Some(a) = &self.assertion {
            s.push_str(&format!("assert {a};\n"));
        }
        s
    }
}

impl fmt::Display for ComposedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The k-fold self-composition, without an assertion. The composed inputs are
/// the `k` high copies (copy-major) followed by the base program's low inputs.
pub fn self_compose_k(program: &Program, k: usize, config: EnumConfig) -> Result<ComposedProgram> {
    if k == 0 {
        return Err(Error::Range("self-composition needs at least one copy".into()));
    }
    let width = k
        .checked_mul(program.high_vars().len())
        .and_then(|w| w.checked_add(program.low_inputs().len()))
        .unwrap_or(usize::MAX);
    check_cap(width, config.cap)?;
    let originals: HashSet<&str> = program.all_vars().map(String::as_str).collect();
    let mut highs = Vec::new();
    let mut lows: Vec<String> = program.low_inputs().to_vec();
    let mut body: Vec<Stmt> = Vec::new();
    for i in 1..=k {
        let rename = |v: &str| Some(copy_name(v, i));
        highs.extend(program.high_vars().iter().map(|v| copy_name(v, i)));
        lows.extend(program.low_vars().iter().map(|v| copy_name(v, i)));
        for l in program.low_inputs() {
            body.push(Stmt::assign(copy_name(l, i), Formula::var(l.clone())));
        }
        let renamed = program.body().rename(&rename);
        body.extend(renamed.statements().into_iter().cloned());
    }
    let mut seen = HashSet::new();
    for (n, v) in highs.iter().chain(&lows).enumerate() {
        let shared_input = n >= highs.len() && n < highs.len() + program.low_inputs().len();
        if !seen.insert(v.as_str()) || (!shared_input && originals.contains(v.as_str())) {
            return Err(Error::VariableClash(v.clone()));
        }
    }
    let composed = Program::new(highs, lows, Stmt::block(body).expect("non-empty"))?;
    debug_assert_eq!(composed.low_inputs(), program.low_inputs());
    Ok(ComposedProgram { copies: k, base: program.clone(), composed, assertion: None })
}

/// The construction for `CC(M) ≤ q`: `n = ⌊2^q⌋ + 1` copies and the assertion
/// that two of them agree, `⋁_{i<j} O_i = O_j`. By pigeonhole it holds on all
/// inputs exactly when no low input admits `n` distinct outputs.
pub fn self_compose_cc(program: &Program, q: &BigRational, config: EnumConfig) -> Result<ComposedProgram> {
    let n = copies_for(q)?;
    let c = self_compose_k(program, n, config)?;
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            pairs.push(c.outputs_equal(i, j));
        }
    }
    let assertion = Formula::any(pairs);
    Ok(c.with_assertion(assertion))
}

/// `⌊2^q⌋ + 1`.
pub fn copies_for(q: &BigRational) -> Result<usize> {
    let m: BigUint = floor_pow2(q)? + 1u32;
    m.to_usize().ok_or_else(|| Error::Range(format!("{m} copies")))
}

/// Two-copy composition asserting `O_1 = O_2`; holds iff non-interferent.
pub fn noninterference_composition(program: &Program, config: EnumConfig) -> Result<ComposedProgram> {
    let c = self_compose_k(program, 2, config)?;
    let a = c.outputs_equal(1, 2);
    Ok(c.with_assertion(a))
}

/// Result of checking an assertion on every input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssertionResult {
    Holds,
    /// The first violating input in canonical order, over the composed
    /// program's high variables and low inputs.
    Violated { high: Valuation, low: Valuation },
}

impl AssertionResult {
    pub fn holds(&self) -> bool {
        matches!(self, AssertionResult::Holds)
    }
}

/// Exhaustively evaluates the assertion of a composed program; a missing
/// assertion is `true`.
pub fn check_assertion(c: &ComposedProgram, config: EnumConfig) -> Result<AssertionResult> {
    let p = c.program();
    check_cap(p.input_bits(), config.cap)?;
    let machine = Machine::new(p);
    let assertion = machine.compile(c.assertion().unwrap_or(&Formula::True))?;
    let lw = p.low_inputs().len();
    let rows = 1usize << p.input_bits();
    let first_violation = (0..rows).into_par_iter().map_init(Vec::new, |state, row| {
        let row = row as u64;
        machine.run_state(row >> lw, row & ((1u64 << lw) - 1), state);
        assertion.eval(state)
    });
    Ok(match first_violation.position_first(|ok| !ok) {
        None => AssertionResult::Holds,
        Some(row) => {
            let row = row as u64;
            AssertionResult::Violated {
                high: Valuation::from_code(row >> lw, p.high_vars().len()),
                low: Valuation::from_code(row & ((1u64 << lw) - 1), lw),
            }
        }
    })
}

/// One trace `((h, ℓ), o)` of a counterexample; `ℓ` is shared by the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub h: String,
    pub o: String,
}

/// A set of traces of a program that alone violates a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleSet {
    pub problem: ProblemId,
    pub q: BigRational,
    pub low: String,
    pub traces: Vec<Trace>,
    /// The traces as a table: the semantics of the smallest program
    /// containing exactly these traces.
    pub table: IoTable,
    /// The bounded measure evaluated on that program.
    pub measured: QifValue,
}

impl CounterexampleSet {
    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "problem": self.problem.name(),
            "q": format_ratio(&self.q),
            "low": self.low,
            "traces": self.traces.iter().map(|t| json!({"h": t.h, "o": t.o})).collect::<Vec<_>>(),
            "measured": self.measured.to_json(),
        })
    }
}

fn trace_set(
    table: &IoTable,
    problem: ProblemId,
    q: &BigRational,
    li: usize,
    his: &[usize],
    measure: impl Fn(&IoTable) -> QifValue,
) -> Result<CounterexampleSet> {
    let sub = table.sub_table(li, his)?;
    Ok(CounterexampleSet {
        problem,
        q: q.clone(),
        low: table.low_space().label(li),
        traces: his
            .iter()
            .map(|&hi| Trace {
                h: table.high_space().label(hi),
                o: bits_to_string(table.output(hi, li), table.output_width()),
            })
            .collect(),
        measured: measure(&sub),
        table: sub,
    })
}

/// `⌊2^q⌋ + 1` traces at the witnessing low input with pairwise distinct
/// outputs: the first high input (in canonical order) for each of the first
/// outputs encountered. Any program containing them has `CC > q`.
pub fn cc_counterexample(table: &IoTable, q: &BigRational) -> Result<CounterexampleSet> {
    let decision = decide_cc_bound(table, q)?;
    if decision.verdict != Verdict::Out {
        return Err(Error::NotApplicable(format!("CC is within {}", format_ratio(q))));
    }
    let need = copies_for(q)?;
    let (li, _) = cc_count(table);
    let mut seen = BTreeSet::new();
    let his: Vec<usize> = (0..table.n_high())
        .filter(|&hi| seen.insert(table.output(hi, li)))
        .take(need)
        .collect();
    debug_assert_eq!(his.len(), need);
    trace_set(table, ProblemId::CC, q, li, &his, cc)
}

/// The size bound on guessing-entropy counterexamples:
/// `⌊(⌊q⌋+1)² / (⌊q⌋+1−q)⌋ + 1` for `q ≥ 1/2`, and 2 below that.
pub fn ge_counterexample_bound(q: &BigRational) -> usize {
    let half = BigRational::new(1.into(), 2.into());
    if q < &half {
        return 2;
    }
    let f = q.floor() + BigRational::from_integer(1.into());
    let bound = (&f * &f / (&f - q)).floor().to_integer();
    bound.to_usize().expect("small bound") + 1
}

/// Class sizes minimizing `Σc²` among all ways to pick `s` traces when output
/// class `o` offers `capacity[o]` traces; classes fill level by level, lower
/// indices first, which gives the canonical optimum.
pub(crate) fn balanced_pick(capacity: &[u64], s: u64) -> Vec<u64> {
    let mut pick = vec![0u64; capacity.len()];
    let mut left = s;
    let mut level = 0u64;
    while left > 0 {
        let mut grew = false;
        for (p, &cap) in pick.iter_mut().zip(capacity) {
            if left > 0 && *p == level && cap > level {
                *p += 1;
                left -= 1;
                grew = true;
            }
        }
        if !grew {
            break;
        }
        level += 1;
    }
    pick
}

/// The smallest trace set `T` (within the size bound) whose induced
/// program has `GE[U] > q`, for a program without low inputs. For each size
/// the best subset is found exactly; traces with equal outputs are
/// interchangeable, so only class sizes are searched.
pub fn ge_counterexample(table: &IoTable, q: &BigRational) -> Result<CounterexampleSet> {
    if table.n_low() != 1 || table.low_space().width() != 0 {
        return Err(Error::NotApplicable("program has low inputs".into()));
    }
    if ge_uniform_exact(table) <= *q {
        return Err(Error::NotApplicable(format!("GE[U] is within {}", format_ratio(q))));
    }
    let classes = crate::boolprog::exec::preimages(table).remove(0);
    let capacity: Vec<u64> = classes.values().map(|v| v.len() as u64).collect();
    let bound = ge_counterexample_bound(q);
    for s in 2..=bound.min(table.n_high()) {
        let pick = balanced_pick(&capacity, s as u64);
        let sq: u64 = pick.iter().map(|c| c * c).sum();
        let value = BigRational::new((s as u64).into(), 2.into())
            - BigRational::new(sq.into(), (2 * s as u64).into());
        if value > *q {
            let mut his: Vec<usize> = classes
                .values()
                .zip(&pick)
                .flat_map(|(members, &c)| members.iter().copied().take(c as usize))
                .collect();
            his.sort_unstable();
            let ge = |t: &IoTable| QifValue::from_exact(MeasureId::GE, Exact::Rational(ge_uniform_exact(t)));
            return trace_set(table, ProblemId::GeU, q, 0, &his, ge);
        }
    }
    Err(Error::NotApplicable(format!(
        "no trace set of size at most {bound} exceeds {}",
        format_ratio(q)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolprog::{io_table, parse_program, parse_program_with_assertion};
    use crate::ratio::{parse_rational, ratio};

    fn prog(text: &str) -> Program {
        parse_program(text).unwrap()
    }

    fn m1() -> Program {
        prog("high a, b; low o; o := !(!a && b)")
    }

    fn m2() -> Program {
        prog("high a, b; low x, y; x := a; y := b")
    }

    fn cfg() -> EnumConfig {
        EnumConfig::default()
    }

    #[test]
    fn copy_count() {
        assert_eq!(copies_for(&ratio(1, 1)).unwrap(), 3);
        assert_eq!(copies_for(&ratio(1, 2)).unwrap(), 2);
        assert_eq!(copies_for(&ratio(2, 1)).unwrap(), 5);
        assert_eq!(copies_for(&parse_rational("1.585").unwrap()).unwrap(), 4);
    }

    #[test]
    fn cc_composition_matches_capacity() {
        let c = self_compose_cc(&m1(), &ratio(1, 1), cfg()).unwrap();
        assert_eq!(c.copies(), 3);
        assert!(check_assertion(&c, cfg()).unwrap().holds());
        let c2 = self_compose_cc(&m2(), &ratio(1, 1), cfg()).unwrap();
        match check_assertion(&c2, cfg()).unwrap() {
            AssertionResult::Violated { high, .. } => {
                // copies a_1 b_1 a_2 b_2 a_3 b_3: three distinct secrets
                let bits = high.to_string();
                let parts: BTreeSet<&str> = [&bits[0..2], &bits[2..4], &bits[4..6]].into_iter().collect();
                assert_eq!(parts.len(), 3);
                assert_eq!(bits, "000110");
            }
            AssertionResult::Holds => panic!("M2 leaks two bits"),
        }
        let k = self_compose_cc(&prog("high a; low o; o := true"), &ratio(1, 2), cfg()).unwrap();
        assert!(check_assertion(&k, cfg()).unwrap().holds());
    }

    #[test]
    fn composed_text_reparses() {
        let c = self_compose_cc(&m2(), &ratio(1, 1), cfg()).unwrap();
        let (p, a) = parse_program_with_assertion(&c.to_text()).unwrap();
        assert_eq!(&p, c.program());
        assert_eq!(a.as_ref(), c.assertion());
    }

    #[test]
    fn k_composition_shape() {
        let p = prog("high h; low l, o; if l then o := h else o := !h");
        let c = self_compose_k(&p, 1, cfg()).unwrap();
        assert_eq!(c.program().high_vars(), ["h_1"]);
        assert_eq!(c.program().low_inputs(), ["l"]);
        let t = io_table(c.program(), cfg()).unwrap();
        let base = io_table(&p, cfg()).unwrap();
        for hi in 0..2 {
            for li in 0..2 {
                // outputs: l, l_1, o_1 — the copy's (l_1, o_1) equals the base's (l, o)
                assert_eq!(t.output(hi, li) & 0b11, base.output(hi, li));
            }
        }
        let c3 = self_compose_k(&p, 3, cfg()).unwrap();
        assert_eq!(c3.program().input_bits(), 3 + 1);
        assert!(!check_assertion(&noninterference_composition(&p, cfg()).unwrap(), cfg()).unwrap().holds());
    }

    #[test]
    fn clashing_names_are_rejected() {
        let p = prog("high h, h_1; low o; o := h && h_1");
        assert!(matches!(self_compose_k(&p, 2, cfg()), Err(Error::VariableClash(_))));
    }

    #[test]
    fn cap_applies_to_composition() {
        let p = prog("high a,b,c,d,e; low o; o := a");
        assert!(matches!(self_compose_k(&p, 5, cfg()), Err(Error::CapExceeded { bits: 25, cap: 24 })));
    }

    #[test]
    fn cc_counterexample_cases() {
        let t2 = io_table(&m2(), cfg()).unwrap();
        let cx = cc_counterexample(&t2, &ratio(1, 1)).unwrap();
        let outs: Vec<&str> = cx.traces.iter().map(|t| t.o.as_str()).collect();
        assert_eq!(outs, ["00", "01", "10"]);
        assert_eq!(cx.measured.exact, Some(Exact::Log2(ratio(3, 1))));
        assert_eq!(decide_cc_bound(&cx.table, &ratio(1, 1)).unwrap().verdict, Verdict::Out);
        let t1 = io_table(&m1(), cfg()).unwrap();
        assert!(matches!(cc_counterexample(&t1, &ratio(1, 1)), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn ge_bound_formula() {
        assert_eq!(ge_counterexample_bound(&parse_rational("0.4").unwrap()), 2);
        // (1+1)^2 / (2 - 1/2) = 8/3 → 2, plus one
        assert_eq!(ge_counterexample_bound(&ratio(1, 2)), 3);
        // q = 1: 4 / 1 → 4, plus one
        assert_eq!(ge_counterexample_bound(&ratio(1, 1)), 5);
    }

    #[test]
    fn ge_counterexample_cases() {
        let t = io_table(&prog("high h; low o; o := h"), cfg()).unwrap();
        let cx = ge_counterexample(&t, &parse_rational("0.4").unwrap()).unwrap();
        assert_eq!(cx.len(), 2);
        assert_eq!(cx.measured.exact, Some(Exact::Rational(ratio(1, 2))));
        assert!(matches!(ge_counterexample(&t, &ratio(1, 2)), Err(Error::NotApplicable(_))));
        let low = io_table(&prog("high h; low l, o; o := h && l"), cfg()).unwrap();
        assert!(matches!(ge_counterexample(&low, &ratio(1, 10)), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn balanced_pick_fills_levels() {
        assert_eq!(balanced_pick(&[3, 1, 2], 4), vec![2, 1, 1]);
        assert_eq!(balanced_pick(&[3, 1, 2], 6), vec![3, 1, 2]);
        assert_eq!(balanced_pick(&[5], 2), vec![2]);
    }
}
