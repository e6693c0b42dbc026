use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};

/// Boolean formula over the core connectives `true`, variables, `∧` and `¬`.
///
/// The derived connectives are constructors that expand into the core, so
/// every value of this type is already normalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Var(String),
    And(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn constant(value: bool) -> Self {
        if value {
            Formula::True
        } else {
            Formula::falsity()
        }
    }

    pub fn falsity() -> Self {
        Formula::not(Formula::True)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// Conjunction of all items; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Disjunction of all items; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut iter = items.into_iter();
        match iter.next() {
            None => Formula::falsity(),
            Some(first) => iter.fold(first, Formula::or),
        }
    }

    /// `x` or `¬x` depending on `value`.
    pub fn literal(name: &str, value: bool) -> Self {
        if value {
            Formula::var(name)
        } else {
            Formula::not(Formula::var(name))
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::True => {}
            Formula::Var(v) => {
                out.insert(v);
            }
            Formula::And(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(a) => a.collect_vars(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// `self[replacement / name]`.
    pub fn substitute(&self, name: &str, replacement: &Formula) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::Var(v) if v == name => replacement.clone(),
            Formula::Var(_) => self.clone(),
            Formula::And(a, b) => Formula::and(
                a.substitute(name, replacement),
                b.substitute(name, replacement),
            ),
            Formula::Not(a) => Formula::not(a.substitute(name, replacement)),
        }
    }

    /// Consistent renaming of variables; names not in the map are kept.
    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::Var(v) => Formula::Var(map(v).unwrap_or_else(|| v.clone())),
            Formula::And(a, b) => Formula::and(a.rename(map), b.rename(map)),
            Formula::Not(a) => Formula::not(a.rename(map)),
        }
    }

    /// Evaluates under a lookup; an unbound variable is an error.
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<bool>) -> Result<bool> {
        Ok(match self {
            Formula::True => true,
            Formula::Var(v) => lookup(v).ok_or_else(|| Error::MissingVariable(v.clone()))?,
            Formula::And(a, b) => a.eval_with(lookup)? && b.eval_with(lookup)?,
            Formula::Not(a) => !a.eval_with(lookup)?,
        })
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::Var(_) => 1,
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Not(a) => 1 + a.size(),
        }
    }

    /// Constant folding and double-negation removal, for display only.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::True | Formula::Var(_) => self.clone(),
            Formula::Not(a) => match a.simplify() {
                Formula::Not(inner) => *inner,
                other => Formula::not(other),
            },
            Formula::And(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                let is_false = |f: &Formula| matches!(f, Formula::Not(x) if **x == Formula::True);
                match (&a, &b) {
                    (Formula::True, _) => b,
                    (_, Formula::True) => a,
                    _ if is_false(&a) || is_false(&b) => Formula::falsity(),
                    _ if a == b => a,
                    _ => Formula::and(a, b),
                }
            }
        }
    }
}

/// Loop-free statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign { target: String, value: Formula },
    Seq(Box<Stmt>, Box<Stmt>),
    If { guard: Formula, then_branch: Box<Stmt>, else_branch: Box<Stmt> },
}

impl Stmt {
    pub fn assign(target: impl Into<String>, value: Formula) -> Self {
        Stmt::Assign { target: target.into(), value }
    }

    pub fn seq(first: Stmt, second: Stmt) -> Self {
        Stmt::Seq(Box::new(first), Box::new(second))
    }

    pub fn ite(guard: Formula, then_branch: Stmt, else_branch: Stmt) -> Self {
        Stmt::If {
            guard,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
        }
    }

    /// Right-nested sequence, the shape the parser produces. `None` when empty.
    pub fn block(stmts: impl IntoIterator<Item = Stmt>) -> Option<Self> {
        let mut items: Vec<Stmt> = stmts.into_iter().collect();
        let mut acc = items.pop()?;
        while let Some(s) = items.pop() {
            acc = Stmt::seq(s, acc);
        }
        Some(acc)
    }

    /// Flattened top-level sequence.
    pub fn statements(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        fn walk<'a>(s: &'a Stmt, out: &mut Vec<&'a Stmt>) {
            match s {
                Stmt::Seq(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn node_count(&self) -> usize {
        match self {
            Stmt::Assign { .. } => 1,
            Stmt::Seq(a, b) => 1 + a.node_count() + b.node_count(),
            Stmt::If { then_branch, else_branch, .. } => {
                1 + then_branch.node_count() + else_branch.node_count()
            }
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Stmt::Assign { target, value } => {
                out.insert(target);
                value.collect_vars(out);
            }
            Stmt::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Stmt::If { guard, then_branch, else_branch } => {
                guard.collect_vars(out);
                then_branch.collect_vars(out);
                else_branch.collect_vars(out);
            }
        }
    }

    /// Variables whose entry value can reach a variable in `live_out` at exit.
    pub fn live_in(&self, live_out: &BTreeSet<String>) -> BTreeSet<String> {
        match self {
            Stmt::Assign { target, value } => {
                let mut live = live_out.clone();
                live.remove(target);
                live.extend(value.vars().into_iter().map(str::to_owned));
                live
            }
            Stmt::Seq(a, b) => a.live_in(&b.live_in(live_out)),
            Stmt::If { guard, then_branch, else_branch } => {
                let mut live = then_branch.live_in(live_out);
                live.extend(else_branch.live_in(live_out));
                live.extend(guard.vars().into_iter().map(str::to_owned));
                live
            }
        }
    }

    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Stmt {
        match self {
            Stmt::Assign { target, value } => Stmt::Assign {
                target: map(target).unwrap_or_else(|| target.clone()),
                value: value.rename(map),
            },
            Stmt::Seq(a, b) => Stmt::seq(a.rename(map), b.rename(map)),
            Stmt::If { guard, then_branch, else_branch } => Stmt::ite(
                guard.rename(map),
                then_branch.rename(map),
                else_branch.rename(map),
            ),
        }
    }
}

/// A loop-free boolean program with its security declarations.
///
/// Every high variable is an input. A low variable is an input exactly when its
/// initial value can influence the final low state; a low variable that every
/// path assigns before reading is output-only. The observable output is the
/// final value of all low variables in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    high_vars: Vec<String>,
    low_vars: Vec<String>,
    body: Stmt,
    low_inputs: Vec<String>,
}

impl Program {
    pub fn new(high_vars: Vec<String>, low_vars: Vec<String>, body: Stmt) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in high_vars.iter().chain(&low_vars) {
            if !seen.insert(v.as_str()) {
                return Err(Error::Duplicate { name: v.clone() });
            }
        }
        if low_vars.is_empty() {
            return Err(Error::NoLowVariable);
        }
        let mut used = BTreeSet::new();
        body.collect_vars(&mut used);
        if let Some(v) = used.iter().find(|v| !seen.contains(**v)) {
            return Err(Error::Undeclared { name: v.to_string(), line: 0, col: 0 });
        }
        let outs: BTreeSet<String> = low_vars.iter().cloned().collect();
        let live = body.live_in(&outs);
        let low_inputs = low_vars.iter().filter(|v| live.contains(*v)).cloned().collect();
        Ok(Program { high_vars, low_vars, body, low_inputs })
    }

    pub fn high_vars(&self) -> &[String] {
        &self.high_vars
    }

    pub fn low_vars(&self) -> &[String] {
        &self.low_vars
    }

    /// Low variables that act as inputs, in declaration order.
    pub fn low_inputs(&self) -> &[String] {
        &self.low_inputs
    }

    pub fn body(&self) -> &Stmt {
        &self.body
    }

    pub fn input_bits(&self) -> usize {
        self.high_vars.len() + self.low_inputs.len()
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.high_vars.iter().chain(&self.low_vars).any(|v| v == name)
    }

    /// All declared variables, highs first.
    pub fn all_vars(&self) -> impl Iterator<Item = &String> {
        self.high_vars.iter().chain(&self.low_vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    fn eval(f: &Formula, env: &[(&str, bool)]) -> bool {
        f.eval_with(&|n| env.iter().find(|(k, _)| *k == n).map(|(_, b)| *b))
            .unwrap()
    }

    #[test]
    fn derived_connectives_match_truth_tables() {
        for a in [false, true] {
            for b in [false, true] {
                let env = [("a", a), ("b", b)];
                assert_eq!(eval(&Formula::or(v("a"), v("b")), &env), a || b);
                assert_eq!(eval(&Formula::implies(v("a"), v("b")), &env), !a || b);
                assert_eq!(eval(&Formula::iff(v("a"), v("b")), &env), a == b);
            }
        }
        assert!(!eval(&Formula::falsity(), &[]));
    }

    #[test]
    fn missing_variable_is_an_error() {
        let f = Formula::and(v("x"), v("y"));
        let err = f.eval_with(&|n| (n == "x").then_some(true)).unwrap_err();
        assert_eq!(err, Error::MissingVariable("y".into()));
    }

    #[test]
    fn liveness_finds_output_only_lows() {
        // z := x; w := y  -- z and w are written before any read
        let body = Stmt::seq(Stmt::assign("z", v("x")), Stmt::assign("w", v("y")));
        let p = Program::new(
            vec!["x".into(), "y".into()],
            vec!["z".into(), "w".into()],
            body,
        )
        .unwrap();
        assert!(p.low_inputs().is_empty());

        // o := o && h  reads o
        let p = Program::new(
            vec!["h".into()],
            vec!["o".into(), "p".into()],
            Stmt::assign("o", Formula::and(v("o"), v("h"))),
        )
        .unwrap();
        // p is never written, so its entry value is its exit value
        assert_eq!(p.low_inputs(), ["o".to_string(), "p".to_string()]);
    }

    #[test]
    fn declaration_errors() {
        let body = Stmt::assign("o", v("h"));
        assert_eq!(
            Program::new(vec!["h".into()], vec!["h".into()], body.clone()).unwrap_err(),
            Error::Duplicate { name: "h".into() }
        );
        assert_eq!(
            Program::new(vec!["h".into(), "o".into()], vec![], body.clone()).unwrap_err(),
            Error::NoLowVariable
        );
        assert!(matches!(
            Program::new(vec![], vec!["o".into()], body),
            Err(Error::Undeclared { .. })
        ));
    }

    #[test]
    fn simplify_folds_constants() {
        let f = Formula::and(Formula::True, Formula::not(Formula::not(v("g"))));
        assert_eq!(f.simplify(), v("g"));
        let g = Formula::and(v("g"), Formula::falsity());
        assert_eq!(g.simplify(), Formula::falsity());
    }
}
