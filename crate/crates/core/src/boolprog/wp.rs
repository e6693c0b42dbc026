use super::ast::{Formula, Stmt};

/// Weakest precondition of `post` through `body`.
///
/// Assignment substitutes, sequencing composes right to left, and a conditional
/// produces `(g ⇒ wp(then)) ∧ (¬g ⇒ wp(else))` with no simplification.
pub fn weakest_precondition(body: &Stmt, post: &Formula) -> Formula {
    match body {
        Stmt::Assign { target, value } => post.substitute(target, value),
        Stmt::Seq(first, second) => {
            weakest_precondition(first, &weakest_precondition(second, post))
        }
        Stmt::If { guard, then_branch, else_branch } => Formula::and(
            Formula::implies(guard.clone(), weakest_precondition(then_branch, post)),
            Formula::implies(
                Formula::not(guard.clone()),
                weakest_precondition(else_branch, post),
            ),
        ),
    }
}
