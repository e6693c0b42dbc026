//! Shared test support: seeded random programs and formulas, the exhaustive
//! small corpus, and an independent reference semantics.

#![allow(dead_code)]

pub mod oracle;

use qifbound::boolprog::synth::synthesize;
use qifbound::boolprog::{Formula, Program, Stmt};
use qifbound::gadgets::PropFormula;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for random programs.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_high: usize,
    pub max_low_inputs: usize,
    pub max_outputs: usize,
    pub max_bits: usize,
}

impl Shape {
    pub const fn new(max_high: usize, max_low_inputs: usize, max_outputs: usize, max_bits: usize) -> Self {
        Shape { max_high, max_low_inputs, max_outputs, max_bits }
    }
}

pub fn random_formula(rng: &mut impl Rng, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..12) {
            0 => Formula::True,
            1 => Formula::falsity(),
            _ => Formula::var(vars.choose(rng).expect("variables").clone()),
        };
    }
    let op = rng.gen_range(0..5);
    let mut sub = || random_formula(rng, vars, depth - 1);
    match op {
        0 => Formula::not(sub()),
        1 => Formula::and(sub(), sub()),
        2 => Formula::or(sub(), sub()),
        3 => Formula::implies(sub(), sub()),
        _ => Formula::iff(sub(), sub()),
    }
}

fn random_stmt(rng: &mut impl Rng, readable: &[String], targets: &[String], depth: usize) -> Stmt {
    let n = rng.gen_range(1..=3);
    let stmts = (0..n).map(|_| {
        if depth > 0 && rng.gen_bool(0.35) {
            Stmt::ite(
                random_formula(rng, readable, 2),
                random_stmt(rng, readable, targets, depth - 1),
                random_stmt(rng, readable, targets, depth - 1),
            )
        } else {
            Stmt::assign(targets.choose(rng).expect("targets").clone(), random_formula(rng, readable, 3))
        }
    });
    Stmt::block(stmts.collect::<Vec<_>>()).expect("non-empty")
}

/// A random program within the shape; low inputs are whatever lows the body
/// reads before writing.
pub fn random_program(rng: &mut impl Rng, shape: Shape) -> Program {
    loop {
        let nh = rng.gen_range(1..=shape.max_high);
        let nl = rng.gen_range(0..=shape.max_low_inputs);
        let no = rng.gen_range(1..=shape.max_outputs);
        let highs: Vec<String> = (1..=nh).map(|i| format!("h{i}")).collect();
        let mut lows: Vec<String> = (1..=nl).map(|i| format!("l{i}")).collect();
        let outs: Vec<String> = (1..=no).map(|i| format!("o{i}")).collect();
        let readable: Vec<String> = highs.iter().chain(&lows).cloned().collect();
        let body = random_stmt(rng, &readable, &outs, 2);
        lows.extend(outs);
        let p = Program::new(highs, lows, body).expect("well-formed random program");
        if p.input_bits() <= shape.max_bits && p.low_inputs().len() <= shape.max_low_inputs {
            return p;
        }
    }
}

pub fn random_programs(seed: u64, count: usize, shape: Shape) -> Vec<Program> {
    let mut r = rng(seed);
    (0..count).map(|_| random_program(&mut r, shape)).collect()
}

/// Random formula over `x1..xn`.
pub fn random_prop_formula(rng: &mut impl Rng, n: usize) -> PropFormula {
    let vars = qifbound::gadgets::canonical_vars(n);
    let depth = rng.gen_range(2..=5);
    PropFormula::new(vars.clone(), random_formula(rng, &vars, depth)).expect("declared variables")
}

/// One member of the exhaustive corpus: a program synthesized from a table.
pub struct CorpusEntry {
    pub program: Program,
    /// `outputs[h << lw | l]`, the intended output bits (without the echoed
    /// low input).
    pub function: Vec<u64>,
    pub high_bits: usize,
    pub low_bits: usize,
    pub out_bits: usize,
}

/// Every function `(h, ℓ) ↦ o` for each `(high, low input, output)` width
/// triple, realized as a program by table-driven synthesis.
pub fn exhaustive_corpus(shapes: &[(usize, usize, usize)]) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for &(hb, lb, ob) in shapes {
        let rows = 1usize << (hb + lb);
        let values = 1u64 << ob;
        let total = values.pow(rows as u32);
        let highs: Vec<String> = (1..=hb).map(|i| format!("h{i}")).collect();
        let low_inputs: Vec<String> = (1..=lb).map(|i| format!("l{i}")).collect();
        let mut lows = low_inputs.clone();
        lows.extend((1..=ob).map(|i| format!("o{i}")));
        for index in 0..total {
            let mut rest = index;
            let function: Vec<u64> = (0..rows)
                .map(|_| {
                    let v = rest % values;
                    rest /= values;
                    v
                })
                .collect();
            let f = |h: u64, l: u64| l << ob | function[(h << lb | l) as usize];
            let program = synthesize(&highs, &low_inputs, &lows, f).expect("synthesis within cap");
            out.push(CorpusEntry { program, function, high_bits: hb, low_bits: lb, out_bits: ob });
        }
    }
    out
}

/// The shapes of the exhaustive corpus: at most three high bits and one low
/// input bit.
pub const SMALL_SHAPES: &[(usize, usize, usize)] = &[
    (1, 0, 1),
    (2, 0, 1),
    (3, 0, 1),
    (1, 1, 1),
    (2, 1, 1),
    (3, 1, 1),
    (1, 0, 2),
    (2, 0, 2),
    (1, 1, 2),
];
