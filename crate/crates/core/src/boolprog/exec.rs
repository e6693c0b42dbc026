//! Forward execution and exhaustive enumeration of program semantics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use super::ast::{Formula, Program, Stmt};
use crate::error::{Error, Result};
use crate::space::{bits_to_string, Space};

/// Default enumeration budget in input bits.
pub const DEFAULT_CAP: usize = 24;

const PARALLEL_ROWS: usize = 1 << 14;

/// Boolean assignment to an ordered variable list, typed by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(Vec<bool>);

impl Valuation {
    pub fn new(bits: Vec<bool>) -> Self {
        Valuation(bits)
    }

    pub fn empty() -> Self {
        Valuation(Vec::new())
    }

    pub fn from_code(code: u64, width: usize) -> Self {
        Valuation((0..width).map(|i| code >> (width - 1 - i) & 1 == 1).collect())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let width = text.len();
        crate::space::parse_bits(text, width).map(|c| Valuation::from_code(c, width))
    }

    pub fn code(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| acc << 1 | u64::from(b))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, vars: &[String], name: &str) -> Option<bool> {
        vars.iter().position(|v| v == name).map(|i| self.0[i])
    }

    fn check(&self, vars: &[String]) -> Result<()> {
        if self.0.len() != vars.len() {
            return Err(Error::WidthMismatch { expected: vars.len(), got: self.0.len() });
        }
        Ok(())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(self.code(), self.len()))
    }
}

/// `eval(f, v)` where `v` is typed against `vars`.
pub fn eval_formula(f: &Formula, vars: &[String], v: &Valuation) -> Result<bool> {
    v.check(vars)?;
    f.eval_with(&|name| v.get(vars, name))
}

#[derive(Debug, Clone)]
enum Expr {
    True,
    Var(usize),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    fn eval(&self, state: &[bool]) -> bool {
        match self {
            Expr::True => true,
            Expr::Var(i) => state[*i],
            Expr::And(a, b) => a.eval(state) && b.eval(state),
            Expr::Not(a) => !a.eval(state),
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Assign(usize, Expr),
    Block(Vec<Op>),
    If(Expr, Box<Op>, Box<Op>),
}

impl Op {
    fn exec(&self, state: &mut [bool]) {
        match self {
            Op::Assign(i, e) => state[*i] = e.eval(state),
            Op::Block(ops) => ops.iter().for_each(|op| op.exec(state)),
            Op::If(g, t, e) => {
                if g.eval(state) {
                    t.exec(state)
                } else {
                    e.exec(state)
                }
            }
        }
    }
}

/// A program resolved to variable slots, ready for repeated execution.
#[derive(Debug, Clone)]
pub struct Machine {
    names: Vec<String>,
    high_slots: Vec<usize>,
    low_in_slots: Vec<usize>,
    low_slots: Vec<usize>,
    body: Op,
}

impl Machine {
    pub fn new(program: &Program) -> Self {
        let names: Vec<&String> = program.all_vars().collect();
        let slot = |n: &str| names.iter().position(|v| *v == n).expect("declared");
        fn expr(f: &Formula, slot: &dyn Fn(&str) -> usize) -> Expr {
            match f {
                Formula::True => Expr::True,
                Formula::Var(v) => Expr::Var(slot(v)),
                Formula::And(a, b) => Expr::And(Box::new(expr(a, slot)), Box::new(expr(b, slot))),
                Formula::Not(a) => Expr::Not(Box::new(expr(a, slot))),
            }
        }
        fn stmt(s: &Stmt, slot: &dyn Fn(&str) -> usize) -> Op {
            match s {
                Stmt::Assign { target, value } => Op::Assign(slot(target), expr(value, slot)),
                Stmt::Seq(..) => Op::Block(s.statements().into_iter().map(|x| stmt(x, slot)).collect()),
                Stmt::If { guard, then_branch, else_branch } => Op::If(
                    expr(guard, slot),
                    Box::new(stmt(then_branch, slot)),
                    Box::new(stmt(else_branch, slot)),
                ),
            }
        }
        Machine {
            names: names.iter().map(|n| n.to_string()).collect(),
            high_slots: program.high_vars().iter().map(|v| slot(v)).collect(),
            low_in_slots: program.low_inputs().iter().map(|v| slot(v)).collect(),
            low_slots: program.low_vars().iter().map(|v| slot(v)).collect(),
            body: stmt(program.body(), &slot),
        }
    }

    fn load(slots: &[usize], code: u64, state: &mut [bool]) {
        let w = slots.len();
        for (i, &s) in slots.iter().enumerate() {
            state[s] = code >> (w - 1 - i) & 1 == 1;
        }
    }

    /// Runs from the given high and low-input codes; returns the final state.
    pub fn run_state(&self, h: u64, l: u64, state: &mut Vec<bool>) {
        state.clear();
        state.resize(self.names.len(), false);
        Self::load(&self.high_slots, h, state);
        Self::load(&self.low_in_slots, l, state);
        self.body.exec(state);
    }

    /// Resolves a formula over the program's variables for evaluation on
    /// final states produced by [`Machine::run_state`].
    pub fn compile(&self, f: &Formula) -> Result<CompiledFormula> {
        fn go(f: &Formula, names: &[String]) -> Result<Expr> {
            Ok(match f {
                Formula::True => Expr::True,
                Formula::Var(v) => Expr::Var(
                    names.iter().position(|n| n == v).ok_or_else(|| Error::MissingVariable(v.clone()))?,
                ),
                Formula::And(a, b) => Expr::And(Box::new(go(a, names)?), Box::new(go(b, names)?)),
                Formula::Not(a) => Expr::Not(Box::new(go(a, names)?)),
            })
        }
        go(f, &self.names).map(CompiledFormula)
    }

    /// Output code over the low variables.
    pub fn run_code(&self, h: u64, l: u64, state: &mut Vec<bool>) -> u64 {
        self.run_state(h, l, state);
        self.low_slots.iter().fold(0, |acc, &s| acc << 1 | u64::from(state[s]))
    }
}

/// A formula resolved against a [`Machine`]'s variable slots.
#[derive(Debug, Clone)]
pub struct CompiledFormula(Expr);

impl CompiledFormula {
    pub fn eval(&self, state: &[bool]) -> bool {
        self.0.eval(state)
    }
}

/// Final values of all low variables after running from `h` (over the high
/// variables) and `l` (over the low input variables).
pub fn run(program: &Program, h: &Valuation, l: &Valuation) -> Result<Valuation> {
    h.check(program.high_vars())?;
    l.check(program.low_inputs())?;
    let m = Machine::new(program);
    let mut state = Vec::new();
    let o = m.run_code(h.code(), l.code(), &mut state);
    Ok(Valuation::from_code(o, program.low_vars().len()))
}

/// The finite semantics of a program (or a sub-relation of one): a total
/// deterministic map from (high, low) input pairs to outputs.
///
/// Rows are ordered high-major: row `i * |L| + j` holds the output for the
/// `i`-th high point and the `j`-th low point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoTable {
    high_vars: Vec<String>,
    low_inputs: Vec<String>,
    low_vars: Vec<String>,
    high: Space,
    low: Space,
    outputs: Vec<u64>,
}

impl IoTable {
    /// Builds a table from parts; `outputs.len()` must be `|high|·|low|`.
    pub fn from_parts(
        high_vars: Vec<String>,
        low_inputs: Vec<String>,
        low_vars: Vec<String>,
        high: Space,
        low: Space,
        outputs: Vec<u64>,
    ) -> Result<Self> {
        if high.width() != high_vars.len() || low.width() != low_inputs.len() {
            return Err(Error::DimensionMismatch("space width differs from variable list".into()));
        }
        if outputs.len() != high.len() * low.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} outputs for {}x{} inputs",
                outputs.len(),
                high.len(),
                low.len()
            )));
        }
        if low_vars.len() > 64 {
            return Err(Error::TooManyOutputs(low_vars.len()));
        }
        if high.is_empty() || low.is_empty() {
            return Err(Error::EmptySpace);
        }
        Ok(IoTable { high_vars, low_inputs, low_vars, high, low, outputs })
    }

    pub fn high_vars(&self) -> &[String] {
        &self.high_vars
    }

    pub fn low_inputs(&self) -> &[String] {
        &self.low_inputs
    }

    pub fn low_vars(&self) -> &[String] {
        &self.low_vars
    }

    pub fn high_space(&self) -> &Space {
        &self.high
    }

    pub fn low_space(&self) -> &Space {
        &self.low
    }

    pub fn n_high(&self) -> usize {
        self.high.len()
    }

    pub fn n_low(&self) -> usize {
        self.low.len()
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn output_width(&self) -> usize {
        self.low_vars.len()
    }

    pub fn outputs(&self) -> &[u64] {
        &self.outputs
    }

    pub fn output(&self, hi: usize, li: usize) -> u64 {
        self.outputs[hi * self.low.len() + li]
    }

    /// Outputs of one low column, in high order.
    pub fn column(&self, li: usize) -> impl Iterator<Item = u64> + '_ {
        (0..self.high.len()).map(move |hi| self.output(hi, li))
    }

    /// Preimage sizes `|{h | M(h, l) = o}|` for each output `o` in column `li`.
    pub fn column_counts(&self, li: usize) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        for o in self.column(li) {
            *counts.entry(o).or_insert(0) += 1;
        }
        counts
    }

    /// All `(output, low)` classes with their preimage sizes, column by column.
    pub fn class_sizes(&self) -> Vec<u64> {
        (0..self.n_low())
            .flat_map(|li| self.column_counts(li).into_values())
            .collect()
    }

    pub fn output_label(&self, o: u64) -> String {
        bits_to_string(o, self.low_vars.len())
    }

    /// The table restricted to one low input, as a low-input-free map.
    pub fn restrict(&self, li: usize) -> IoTable {
        let code = self.low.code(li);
        IoTable {
            high_vars: self.high_vars.clone(),
            low_inputs: self.low_inputs.clone(),
            low_vars: self.low_vars.clone(),
            high: self.high.clone(),
            low: Space::subset(self.low.width(), vec![code]).expect("single point"),
            outputs: self.column(li).collect(),
        }
    }

    /// Sub-relation on the given rows `(hi, li)`: the table of a program whose
    /// semantics is exactly those traces. All rows must share one low point.
    pub fn sub_table(&self, li: usize, his: &[usize]) -> Result<IoTable> {
        let codes = his.iter().map(|&hi| self.high.code(hi)).collect();
        IoTable::from_parts(
            self.high_vars.clone(),
            self.low_inputs.clone(),
            self.low_vars.clone(),
            Space::subset(self.high.width(), codes)?,
            Space::subset(self.low.width(), vec![self.low.code(li)])?,
            his.iter().map(|&hi| self.output(hi, li)).collect(),
        )
    }
}

/// Enumeration options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumConfig {
    pub cap: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { cap: DEFAULT_CAP }
    }
}

pub fn check_cap(bits: usize, cap: usize) -> Result<()> {
    if bits > cap || bits >= 63 {
        return Err(Error::CapExceeded { bits, cap });
    }
    Ok(())
}

/// Exhaustive semantics table of a program.
pub fn io_table(program: &Program, config: EnumConfig) -> Result<IoTable> {
    check_cap(program.input_bits(), config.cap)?;
    if program.low_vars().len() > 64 {
        return Err(Error::TooManyOutputs(program.low_vars().len()));
    }
    let machine = Machine::new(program);
    let hw = program.high_vars().len();
    let lw = program.low_inputs().len();
    let rows = 1usize << (hw + lw);
    let mut outputs = vec![0u64; rows];
    let fill = |offset: usize, chunk: &mut [u64]| {
        let mut state = Vec::new();
        for (k, slot) in chunk.iter_mut().enumerate() {
            let row = (offset + k) as u64;
            *slot = machine.run_code(row >> lw, row & ((1u64 << lw) - 1), &mut state);
        }
    };
    if rows >= PARALLEL_ROWS {
        outputs
            .par_chunks_mut(PARALLEL_ROWS)
            .enumerate()
            .for_each(|(i, chunk)| fill(i * PARALLEL_ROWS, chunk));
    } else {
        fill(0, &mut outputs);
    }
    IoTable::from_parts(
        program.high_vars().to_vec(),
        program.low_inputs().to_vec(),
        program.low_vars().to_vec(),
        Space::full(hw),
        Space::full(lw),
        outputs,
    )
}

/// `M(ℓ) = λh. M(h, ℓ)` as a low-input-free table.
pub fn restrict(program: &Program, l: &Valuation, config: EnumConfig) -> Result<IoTable> {
    l.check(program.low_inputs())?;
    let table = io_table(program, config)?;
    Ok(table.restrict(l.code() as usize))
}

/// Range of `M(ℓ)`, ordered by output code.
pub fn output_set(program: &Program, l: &Valuation, config: EnumConfig) -> Result<Vec<Valuation>> {
    let table = restrict(program, l, config)?;
    let width = program.low_vars().len();
    let set: BTreeSet<u64> = table.outputs().iter().copied().collect();
    Ok(set.into_iter().map(|o| Valuation::from_code(o, width)).collect())
}

/// Groups rows of a table by output within each low column:
/// `(li, o) -> [hi...]` in canonical order.
pub fn preimages(table: &IoTable) -> Vec<BTreeMap<u64, Vec<usize>>> {
    (0..table.n_low())
        .map(|li| {
            let mut m: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for hi in 0..table.n_high() {
                m.entry(table.output(hi, li)).or_default().push(hi);
            }
            m
        })
        .collect()
}

/// Number of distinct outputs per low column.
pub fn output_counts(table: &IoTable) -> Vec<u64> {
    (0..table.n_low())
        .map(|li| {
            let mut seen: HashMap<u64, ()> = HashMap::new();
            for o in table.column(li) {
                seen.insert(o, ());
            }
            seen.len() as u64
        })
        .collect()
}
