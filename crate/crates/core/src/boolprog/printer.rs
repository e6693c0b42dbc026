//! Surface-syntax printing. Output reparses to a structurally identical AST.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::{Formula, Program, Stmt};

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, false)
    }
}

// `rhs_of_and` is set for the right operand of `&&`, which needs parentheses
// around a nested conjunction because `&&` associates to the left.
fn write_formula(out: &mut impl Write, f: &Formula, rhs_of_and: bool) -> fmt::Result {
    match f {
        Formula::True => out.write_str("true"),
        Formula::Var(v) => out.write_str(v),
        Formula::Not(inner) => {
            out.write_char('!')?;
            match **inner {
                Formula::And(..) => {
                    out.write_char('(')?;
                    write_formula(out, inner, false)?;
                    out.write_char(')')
                }
                _ => write_formula(out, inner, false),
            }
        }
        Formula::And(a, b) => {
            if rhs_of_and {
                out.write_char('(')?;
            }
            write_formula(out, a, false)?;
            out.write_str(" && ")?;
            write_formula(out, b, true)?;
            if rhs_of_and {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

/// Readable rendering that folds constants and recovers `||`, `==>` and `false`.
/// Reparsing it yields an equivalent, not necessarily identical, formula.
pub fn display_sugared(f: &Formula) -> String {
    fn go(f: &Formula) -> String {
        match f {
            Formula::True => "true".into(),
            Formula::Var(v) => v.clone(),
            Formula::Not(inner) => match &**inner {
                Formula::True => "false".into(),
                Formula::And(a, b) => match (&**a, &**b) {
                    (Formula::Not(x), Formula::Not(y)) => format!("({} || {})", go(x), go(y)),
                    (x, Formula::Not(y)) => format!("({} ==> {})", go(x), go(y)),
                    _ => format!("!({} && {})", go(a), go(b)),
                },
                other => format!("!{}", go(other)),
            },
            Formula::And(a, b) => format!("({} && {})", go(a), go(b)),
        }
    }
    go(&f.simplify())
}

impl Display for Stmt {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_stmt(f, self, 0)
    }
}

fn write_stmt(out: &mut Formatter<'_>, s: &Stmt, indent: usize) -> fmt::Result {
    let items = s.statements();
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.write_str(";\n")?;
        }
        write!(out, "{:indent$}", "")?;
        match item {
            Stmt::Assign { target, value } => write!(out, "{target} := {value}")?,
            Stmt::If { guard, then_branch, else_branch } => {
                writeln!(out, "if {guard} then {{")?;
                write_stmt(out, then_branch, indent + 2)?;
                writeln!(out)?;
                writeln!(out, "{:indent$}}} else {{", "")?;
                write_stmt(out, else_branch, indent + 2)?;
                writeln!(out)?;
                write!(out, "{:indent$}}}", "")?;
            }
            Stmt::Seq(..) => unreachable!("statements() flattens sequences"),
        }
    }
    Ok(())
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if !self.high_vars().is_empty() {
            writeln!(f, "high {};", self.high_vars().join(", "))?;
        }
        writeln!(f, "low {};", self.low_vars().join(", "))?;
        writeln!(f, "{}", self.body())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_conjunction_on_the_right_is_parenthesized() {
        let f = Formula::and(
            Formula::var("a"),
            Formula::and(Formula::var("b"), Formula::var("c")),
        );
        assert_eq!(f.to_string(), "a && (b && c)");
        let g = Formula::and(
            Formula::and(Formula::var("a"), Formula::var("b")),
            Formula::var("c"),
        );
        assert_eq!(g.to_string(), "a && b && c");
        assert_eq!(Formula::or(Formula::var("a"), Formula::var("b")).to_string(), "!(!a && !b)");
    }

    #[test]
    fn sugared_display() {
        let f = Formula::or(Formula::var("a"), Formula::var("b"));
        assert_eq!(display_sugared(&f), "(a || b)");
        let g = Formula::implies(Formula::var("a"), Formula::var("b"));
        assert_eq!(display_sugared(&g), "(a ==> b)");
        assert_eq!(display_sugared(&Formula::falsity()), "false");
    }
}
