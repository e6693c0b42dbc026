//! Exact quantitative information flow for loop-free boolean programs.
//!
//! The crate computes Shannon-, min-, guessing-entropy, belief and
//! channel-capacity leakage by exhaustive enumeration, decides the
//! corresponding bounding problems with exact arithmetic wherever the
//! quantity allows it, builds self-composed programs and k-safety
//! counterexamples, and runs the MAJSAT reduction gadgets end to end.

pub mod boolprog;
pub mod cli;
pub mod bounding;
pub mod dist;
pub mod error;
pub mod gadgets;
pub mod measures;
pub mod ratio;
pub mod selfcomp;
pub mod space;

pub use error::{Error, Result};
