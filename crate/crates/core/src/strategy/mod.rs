//! Memoryless imperfect-information strategies and the outcome graphs they
//! induce.

mod fairness;
mod lasso;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::amas::{AgentId, Amas, Choice, EventSet, EMPTY_CHOICE};
use crate::compose::{GlobalState, Model, StateId, TransitionGraph};

pub use fairness::{fairness_conditions, FairnessKind, FairnessPredicate};
pub use lasso::{eval_path, simple_lassos, walk_lassos, Lasso, LassoDoc, LassoError, StepDoc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("the strategy space of this coalition does not fit in 64 bits")]
    TooMany,
    #[error("strategy index {index} out of range (space has {size} strategies)")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{agent}` has no local state `{local}`")]
    UnknownLocal { agent: String, local: String },
    #[error("{choice} is not a choice of agent `{agent}` at `{local}`")]
    NotInRepertoire {
        agent: String,
        local: String,
        choice: String,
    },
    #[error("agent `{agent}` gives no choice for local state `{local}`")]
    Incomplete { agent: String, local: String },
    #[error("the strategy was built for a different system")]
    Mismatch,
}

/// Plain outcomes, or opponent-reactive ones where ε only fires when nothing
/// else is enabled under the strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeMode {
    #[default]
    Plain,
    Reactive,
}

impl fmt::Display for OutcomeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeMode::Plain => "plain",
            OutcomeMode::Reactive => "el",
        })
    }
}

impl FromStr for OutcomeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(OutcomeMode::Plain),
            "el" | "reactive" => Ok(OutcomeMode::Reactive),
            other => Err(format!("unknown semantics `{other}` (plain, el)")),
        }
    }
}

/// One agent's memoryless strategy: a repertoire index per local state.
/// Local states with an empty repertoire carry index 0 and select nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub agent: AgentId,
    pub assignment: Vec<usize>,
}

impl Strategy {
    pub fn choice<'a>(&self, amas: &'a Amas, local: usize) -> &'a Choice {
        amas.agent(self.agent)
            .repertoire(local)
            .get(self.assignment[local])
            .unwrap_or(&EMPTY_CHOICE)
    }
}

/// A collective strategy, members sorted by agent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JointStrategy {
    members: Vec<Strategy>,
}

/// One row of a strategy table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyRow {
    pub agent: String,
    pub local: String,
    pub choice: Vec<String>,
}

impl JointStrategy {
    pub fn new(mut members: Vec<Strategy>) -> Self {
        members.sort_by_key(|s| s.agent);
        JointStrategy { members }
    }

    pub fn members(&self) -> &[Strategy] {
        &self.members
    }

    pub fn coalition(&self) -> Vec<AgentId> {
        self.members.iter().map(|s| s.agent).collect()
    }

    /// `σ_A(g)` as a per-agent selection (`None` outside the coalition).
    pub fn selection<'a>(&self, amas: &'a Amas, g: &GlobalState) -> Vec<Option<&'a Choice>> {
        let mut sel = vec![None; amas.num_agents()];
        for s in &self.members {
            sel[s.agent.0] = Some(s.choice(amas, g.local(s.agent)));
        }
        sel
    }

    /// Builds a strategy from `agent -> local -> events` names.
    pub fn from_table(
        amas: &Amas,
        table: &BTreeMap<String, BTreeMap<String, Vec<String>>>,
    ) -> Result<Self, StrategyError> {
        let mut members = Vec::new();
        for (agent_name, rows) in table {
            let id = amas
                .agent_by_name(agent_name)
                .ok_or_else(|| StrategyError::UnknownAgent(agent_name.clone()))?;
            let agent = amas.agent(id);
            for local in rows.keys() {
                if agent.state_index(local).is_none() {
                    return Err(StrategyError::UnknownLocal {
                        agent: agent_name.clone(),
                        local: local.clone(),
                    });
                }
            }
            let mut assignment = Vec::with_capacity(agent.states().len());
            for (l, local) in agent.states().iter().enumerate() {
                let rep = agent.repertoire(l);
                let pick = match rows.get(local) {
                    Some(events) => {
                        let ids: Option<EventSet> =
                            events.iter().map(|e| amas.event_by_name(e)).collect();
                        let wanted = ids.map(Choice::new);
                        rep.iter()
                            .position(|c| Some(c) == wanted.as_ref())
                            .ok_or_else(|| StrategyError::NotInRepertoire {
                                agent: agent_name.clone(),
                                local: local.clone(),
                                choice: format!("{{{}}}", events.join(", ")),
                            })?
                    }
                    None if rep.len() <= 1 => 0,
                    None => {
                        return Err(StrategyError::Incomplete {
                            agent: agent_name.clone(),
                            local: local.clone(),
                        })
                    }
                };
                assignment.push(pick);
            }
            members.push(Strategy {
                agent: id,
                assignment,
            });
        }
        Ok(JointStrategy::new(members))
    }

    /// Table rows in agent/local-state declaration order.
    pub fn rows(&self, amas: &Amas) -> Vec<StrategyRow> {
        let mut rows = Vec::new();
        for s in &self.members {
            let agent = amas.agent(s.agent);
            for (l, local) in agent.states().iter().enumerate() {
                rows.push(StrategyRow {
                    agent: agent.name().to_string(),
                    local: local.clone(),
                    choice: s
                        .choice(amas, l)
                        .iter()
                        .map(|e| amas.event_name(e).to_string())
                        .collect(),
                });
            }
        }
        rows
    }
}

/// `Σ_A^ir` as a mixed-radix number: agents in coalition order, local states
/// in declaration order, the last digit varying fastest.
#[derive(Clone, Debug)]
pub struct StrategySpace {
    coalition: Vec<AgentId>,
    /// `(agent, local, radix)` per digit, most significant first.
    digits: Vec<(AgentId, usize, u64)>,
    size: u64,
    locals: Vec<usize>,
}

impl StrategySpace {
    pub fn new(amas: &Amas, coalition: &[AgentId]) -> Result<Self, StrategyError> {
        let mut coalition = coalition.to_vec();
        coalition.sort();
        coalition.dedup();
        if coalition.iter().any(|a| a.0 >= amas.num_agents()) {
            return Err(StrategyError::Mismatch);
        }
        let mut digits = Vec::new();
        let mut size: u64 = 1;
        for &a in &coalition {
            let agent = amas.agent(a);
            for l in 0..agent.states().len() {
                let radix = agent.repertoire(l).len().max(1) as u64;
                size = size.checked_mul(radix).ok_or(StrategyError::TooMany)?;
                digits.push((a, l, radix));
            }
        }
        let locals = coalition.iter().map(|&a| amas.agent(a).states().len()).collect();
        Ok(StrategySpace {
            coalition,
            digits,
            size,
            locals,
        })
    }

    pub fn coalition(&self) -> &[AgentId] {
        &self.coalition
    }

    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn get(&self, index: u64) -> Result<JointStrategy, StrategyError> {
        if index >= self.size {
            return Err(StrategyError::IndexOutOfRange {
                index,
                size: self.size,
            });
        }
        let mut members: Vec<Strategy> = self
            .coalition
            .iter()
            .zip(&self.locals)
            .map(|(&agent, &n)| Strategy {
                agent,
                assignment: vec![0; n],
            })
            .collect();
        let mut rest = index;
        for &(agent, local, radix) in self.digits.iter().rev() {
            let k = self.coalition.binary_search(&agent).expect("coalition member");
            members[k].assignment[local] = (rest % radix) as usize;
            rest /= radix;
        }
        Ok(JointStrategy { members })
    }

    /// Position of `sigma` in the enumeration order.
    pub fn index_of(&self, sigma: &JointStrategy) -> Result<u64, StrategyError> {
        if sigma.coalition() != self.coalition {
            return Err(StrategyError::Mismatch);
        }
        let mut index = 0u64;
        for &(agent, local, radix) in &self.digits {
            let k = self.coalition.binary_search(&agent).expect("coalition member");
            let digit = sigma.members[k].assignment[local] as u64;
            if digit >= radix {
                return Err(StrategyError::Mismatch);
            }
            index = index * radix + digit;
        }
        Ok(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = JointStrategy> + '_ {
        (0..self.size).map(|i| self.get(i).expect("in range"))
    }
}

/// `enumerate_strategies`: every joint strategy of `coalition`, in order.
pub fn enumerate_strategies(
    amas: &Amas,
    coalition: &[AgentId],
) -> Result<impl Iterator<Item = JointStrategy>, StrategyError> {
    let space = StrategySpace::new(amas, coalition)?;
    Ok((0..space.len()).map(move |i| space.get(i).expect("in range")))
}

/// The sub-graph of a model whose infinite paths are the strategy's outcome.
#[derive(Clone, Debug)]
pub struct OutcomeGraph<'m> {
    model: &'m Model,
    mode: OutcomeMode,
    strategy: JointStrategy,
    succ: Vec<Vec<(crate::amas::EventId, StateId)>>,
    enabled_by: Vec<EventSet>,
}

impl<'m> OutcomeGraph<'m> {
    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn mode(&self) -> OutcomeMode {
        self.mode
    }

    pub fn strategy(&self) -> &JointStrategy {
        &self.strategy
    }

    /// `enabled_M(g, σ_A(g))`, including ε where the undeadlocking rule puts it.
    pub fn enabled_by_strategy(&self, s: StateId) -> &EventSet {
        &self.enabled_by[s]
    }
}

impl TransitionGraph for OutcomeGraph<'_> {
    fn num_states(&self) -> usize {
        self.succ.len()
    }

    fn successors(&self, s: StateId) -> &[(crate::amas::EventId, StateId)] {
        &self.succ[s]
    }
}

/// Keeps the model edges whose event the strategy enables; in reactive mode
/// an ε edge survives only where the strategy enables nothing but ε.
pub fn restrict<'m>(
    model: &'m Model,
    sigma: &JointStrategy,
    mode: OutcomeMode,
) -> Result<OutcomeGraph<'m>, StrategyError> {
    let amas = model.amas();
    for s in sigma.members() {
        if s.agent.0 >= amas.num_agents() || s.assignment.len() != amas.agent(s.agent).states().len() {
            return Err(StrategyError::Mismatch);
        }
    }
    let n = model.num_states();
    let mut succ = Vec::with_capacity(n);
    let mut enabled_by = Vec::with_capacity(n);
    for s in 0..n {
        let sel = sigma.selection(amas, model.state(s));
        let allowed = model.enabled_for_selection(s, &sel);
        let only_eps = allowed.len() == 1 && model.epsilon().is_some_and(|e| allowed.contains(&e));
        let row = model
            .successors(s)
            .iter()
            .copied()
            .filter(|&(e, _)| allowed.contains(&e))
            .filter(|&(e, _)| !(mode == OutcomeMode::Reactive && model.is_epsilon(e) && !only_eps))
            .collect();
        succ.push(row);
        enabled_by.push(allowed);
    }
    Ok(OutcomeGraph {
        model,
        mode,
        strategy: sigma.clone(),
        succ,
        enabled_by,
    })
}

/// States from which the graph has an infinite path (states that reach a
/// cycle).
pub fn infinite_from<G: TransitionGraph + ?Sized>(graph: &G) -> Vec<bool> {
    let n = graph.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let out_degree_of = |s: StateId| graph.successors(s).len();
    let mut out_degree: Vec<usize> = (0..n).map(out_degree_of).collect();
    for s in 0..n {
        for &(_, t) in graph.successors(s) {
            preds[t].push(s);
        }
    }
    let mut alive = vec![true; n];
    let mut queue: Vec<StateId> = (0..n).filter(|&s| out_degree[s] == 0).collect();
    while let Some(s) = queue.pop() {
        if !alive[s] {
            continue;
        }
        alive[s] = false;
        for &p in &preds[s] {
            out_degree[p] -= 1;
            if out_degree[p] == 0 && alive[p] {
                queue.push(p);
            }
        }
    }
    alive
}

/// Whether some infinite path of the graph starts at `s`.
pub fn outcome_nonempty<G: TransitionGraph + ?Sized>(graph: &G, s: StateId) -> bool {
    infinite_from(graph)[s]
}
