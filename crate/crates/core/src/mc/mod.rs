//! Strategy search plus product-automaton emptiness: decides `M, g ⊨ φ`
//! under plain, opponent-reactive and fairness-filtered outcomes.

mod check;
pub mod emptiness;

pub use check::{check, check_universal, CheckError, Checker, Refutation, RefutationDoc, Semantics, Verdict, VerdictDoc, Witness};
pub use emptiness::product_emptiness;
