//! Strategic model checking for asynchronous multi-agent systems.
//!
//! The pipeline is: parse an [`amas::Amas`], compose it into a global
//! [`compose::Model`], enumerate memoryless imperfect-information strategies,
//! and decide coalition formulas by product-automaton emptiness over each
//! strategy's outcome graph. [`por`] shrinks undeadlocked models with
//! partial-order reduction and ships checkers for its correctness conditions.

pub mod amas;
pub mod bundled;
pub mod compose;
pub mod gen;
pub mod logic;
pub mod mc;
pub mod par;
pub mod por;
pub mod strategy;

use thiserror::Error;

pub use amas::{parse_amas, AgentId, Amas, AmasError, Choice, EventId, PropId, ValidationError};
pub use compose::{build_iis, build_undeadlocked_iis, GlobalState, Model, ModelError, ModelKind};
pub use logic::{parse_formula, FormulaError, PathFormula, StateFormula};
pub use mc::{check, CheckError, Semantics, Verdict};
pub use par::Execution;
pub use strategy::{FairnessKind, JointStrategy, OutcomeMode, Strategy, StrategyError, StrategySpace};

/// Any error the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Amas(#[from] AmasError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Reduction(#[from] por::ReductionError),
    #[error(transparent)]
    Generator(#[from] gen::GenError),
}
