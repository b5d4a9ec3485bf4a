use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::OutcomeGraph;
use crate::amas::EventId;
use crate::compose::{Model, StateId, TransitionGraph};

/// Which fairness filter applies to outcome paths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FairnessKind {
    #[default]
    None,
    /// Concurrency fairness: enabledness judged in the model.
    Cf,
    /// Strategic concurrency fairness: enabledness judged under the strategy.
    Scf,
}

impl fmt::Display for FairnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FairnessKind::None => "none",
            FairnessKind::Cf => "cf",
            FairnessKind::Scf => "scf",
        })
    }
}

impl FromStr for FairnessKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(FairnessKind::None),
            "cf" => Ok(FairnessKind::Cf),
            "scf" => Ok(FairnessKind::Scf),
            other => Err(format!("unknown fairness `{other}` (none, cf, scf)")),
        }
    }
}

/// `P_β`: an edge `(g, e)` satisfies it iff `β ∉ E(g)` or `e` shares an owner
/// with `β`. A path is fair iff every predicate holds infinitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessPredicate {
    pub event: EventId,
    active: Vec<bool>,
}

impl FairnessPredicate {
    /// Whether `β ∈ E(g)`.
    pub fn active_at(&self, s: StateId) -> bool {
        self.active[s]
    }

    pub fn holds(&self, model: &Model, s: StateId, e: EventId) -> bool {
        !self.active[s] || model.shares_owner(self.event, e)
    }
}

/// One predicate per witness event that is ever in `E(g)`; events never in
/// `E` would give predicates that hold on every edge, so they are skipped.
/// ε is a witness only when `include_epsilon` is set.
pub fn fairness_conditions(
    graph: &OutcomeGraph<'_>,
    kind: FairnessKind,
    include_epsilon: bool,
) -> Vec<FairnessPredicate> {
    let model = graph.model();
    let n = model.num_states();
    let enabled_at = |s: StateId, e: EventId| -> bool {
        match kind {
            FairnessKind::None => false,
            FairnessKind::Cf => model.successors(s).iter().any(|&(x, _)| x == e),
            FairnessKind::Scf => graph.enabled_by_strategy(s).contains(&e),
        }
    };
    (0..model.num_events())
        .map(EventId)
        .filter(|&e| include_epsilon || !model.is_epsilon(e))
        .filter_map(|e| {
            let active: Vec<bool> = (0..n).map(|s| enabled_at(s, e)).collect();
            active.iter().any(|&a| a).then_some(FairnessPredicate { event: e, active })
        })
        .collect()
}
