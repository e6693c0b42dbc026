//! Loop-free boolean programs: syntax, semantics and enumeration.

pub mod ast;
pub mod exec;
pub mod parser;
pub mod printer;
pub mod synth;
pub mod wp;

pub use ast::{Formula, Program, Stmt};
pub use exec::{
    eval_formula, io_table, output_set, restrict, run, CompiledFormula, EnumConfig, IoTable, Machine,
    Valuation,
    DEFAULT_CAP,
};
pub use parser::{parse_formula, parse_formula_file, parse_program, parse_program_with_assertion};
pub use printer::display_sugared;
pub use wp::weakest_precondition;
