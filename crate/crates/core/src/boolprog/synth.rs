//! Table-driven synthesis: a program realizing any given input/output map.

use super::ast::{Formula, Program, Stmt};
use super::exec::IoTable;
use crate::error::{Error, Result};

/// Builds a program whose semantics is `f(h, ℓ)`, where `h` is a code over
/// `high_vars` and `ℓ` a code over `low_inputs` (first variable most
/// significant). The result is a decision tree that tests every high variable
/// and then every low input, with leaves assigning constants to all low
/// variables. Testing the low inputs before any assignment makes them exactly
/// the program's low inputs.
pub fn synthesize(
    high_vars: &[String],
    low_inputs: &[String],
    low_vars: &[String],
    f: impl Fn(u64, u64) -> u64,
) -> Result<Program> {
    if let Some(v) = low_inputs.iter().find(|v| !low_vars.contains(v)) {
        return Err(Error::DimensionMismatch(format!("low input `{v}` is not a low variable")));
    }
    let bits = high_vars.len() + low_inputs.len();
    crate::boolprog::exec::check_cap(bits, 20)?;
    let guards: Vec<&String> = high_vars.iter().chain(low_inputs).collect();
    let lw = low_inputs.len();
    let leaf = |code: u64| -> Stmt {
        let o = f(code >> lw, code & ((1u64 << lw) - 1));
        let w = low_vars.len();
        Stmt::block(low_vars.iter().enumerate().map(|(i, v)| {
            Stmt::assign(v.clone(), Formula::constant(o >> (w - 1 - i) & 1 == 1))
        }))
        .expect("at least one low variable")
    };
    fn tree(guards: &[&String], depth: usize, prefix: u64, leaf: &dyn Fn(u64) -> Stmt) -> Stmt {
        if depth == guards.len() {
            return leaf(prefix);
        }
        Stmt::ite(
            Formula::var(guards[depth].clone()),
            tree(guards, depth + 1, prefix << 1 | 1, leaf),
            tree(guards, depth + 1, prefix << 1, leaf),
        )
    }
    let body = tree(&guards, 0, 0, &leaf);
    Program::new(high_vars.to_vec(), low_vars.to_vec(), body)
}

/// A program whose semantics equals a table over full input spaces.
pub fn program_from_table(table: &IoTable) -> Result<Program> {
    if !table.high_space().is_full() || !table.low_space().is_full() {
        return Err(Error::NotApplicable("table does not cover the full input space".into()));
    }
    synthesize(table.high_vars(), table.low_inputs(), table.low_vars(), |h, l| {
        table.output(h as usize, l as usize)
    })
}
