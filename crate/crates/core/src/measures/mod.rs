//! Quantitative information flow measures.

pub mod entropy;
pub mod ladder;
pub mod program;
pub mod value;

pub use entropy::{
    cond_guessing_entropy, cond_min_entropy, cond_vulnerability, conditional_entropy,
    guess_rank, guessing_entropy, min_entropy, mutual_information, shannon_entropy,
    vulnerability, RankedPoint,
};
pub use ladder::{compare_se, ClassCounts, LadderConfig, LadderOutcome, Stage};
pub use program::{
    be, be_definitional, cc, cc_count, experiment_mass, ge, ge_column, ge_uniform_closed, ge_uniform_exact, gecc,
    low_output_pairs, me, me_uniform_closed, mecc, se, se_conditional_entropy, se_uniform,
    uniform_joint,
};
pub use value::{format_float, round_sig, Exact, MeasureId, QifValue};
