//! Asynchronous multi-agent systems (AMAS): local automata with explicit-control
//! repertoires that synchronise on shared events.
//!
//! An [`Amas`] is built from plain, name-based [`AgentDecl`]s (what the parser
//! produces) and validated on construction. Event identity is global by name: an
//! event mentioned by several agents is executed jointly by all of them.

mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use parse::{parse_amas, parse_amas_with, parse_decls, AmasError};
pub use print::print_amas;

/// Name of the silent event. It cannot be written in source files.
pub const EPSILON: &str = "ε";
/// Name of the auxiliary agent that owns [`EPSILON`] in an undeadlocked AMAS.
pub const EPSILON_AGENT: &str = "ε";
const EPSILON_LOCAL: &str = "q0ε";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AgentId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EventId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PropId(pub usize);

pub type EventSet = BTreeSet<EventId>;
pub type PropSet = BTreeSet<PropId>;

/// Selection of an agent that has no choice at all (a sink state).
pub static EMPTY_CHOICE: Choice = Choice(BTreeSet::new());

/// One entry of a repertoire: a nonempty set of events the agent commits to,
/// leaving the final pick among them to the other owners or the scheduler.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Choice(EventSet);

impl Choice {
    pub fn new(events: impl IntoIterator<Item = EventId>) -> Self {
        Choice(events.into_iter().collect())
    }

    pub fn singleton(event: EventId) -> Self {
        Choice(BTreeSet::from([event]))
    }

    pub fn events(&self) -> &EventSet {
        &self.0
    }

    pub fn contains(&self, event: EventId) -> bool {
        self.0.contains(&event)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EventId> + '_ {
        self.0.iter().copied()
    }
}

/// Name-based declaration of one local state, as written in a source file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateDecl {
    pub name: String,
    pub props: Vec<String>,
    /// `None` is the legacy form: one singleton choice per outgoing event.
    pub choices: Option<Vec<Vec<String>>>,
    /// `(event, target)` pairs in declaration order.
    pub transitions: Vec<(String, String)>,
}

/// Name-based declaration of an agent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgentDecl {
    pub name: String,
    pub init: Option<String>,
    pub states: Vec<StateDecl>,
}

impl AgentDecl {
    /// Rewrites every legacy state (no explicit `choices`) into explicit form,
    /// with one singleton choice per available event.
    pub fn lift_simple(mut self) -> Self {
        for state in &mut self.states {
            if state.choices.is_none() {
                let mut seen = BTreeSet::new();
                let singletons = state
                    .transitions
                    .iter()
                    .filter(|(e, _)| seen.insert(e.clone()))
                    .map(|(e, _)| vec![e.clone()])
                    .collect();
                state.choices = Some(singletons);
            }
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("the system declares no agents")]
    NoAgents,
    #[error("agent `{0}` is declared twice")]
    DuplicateAgent(String),
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
    #[error("agent `{0}` has no init declaration")]
    MissingInit(String),
    #[error("agent `{agent}`: initial state `{state}` is not declared")]
    UnknownInit { agent: String, state: String },
    #[error("agent `{agent}`: state `{state}` is declared twice")]
    DuplicateState { agent: String, state: String },
    #[error("agent `{agent}`, state `{state}`: transition on `{event}` targets undeclared state `{target}`")]
    UnknownTarget {
        agent: String,
        state: String,
        event: String,
        target: String,
    },
    #[error("agent `{agent}`, state `{state}`: two transitions on `{event}`")]
    DuplicateTransition {
        agent: String,
        state: String,
        event: String,
    },
    #[error("agent `{agent}`, state `{state}`: empty choice in repertoire")]
    EmptyChoice { agent: String, state: String },
    #[error("agent `{agent}`, state `{state}`: duplicate choice in repertoire")]
    DuplicateChoice { agent: String, state: String },
    #[error("agent `{agent}`, state `{state}`: empty repertoire")]
    EmptyRepertoire { agent: String, state: String },
    #[error("agent `{agent}`, state `{state}`: event `{event}` is offered by a choice but has no transition")]
    ChoiceWithoutTransition {
        agent: String,
        state: String,
        event: String,
    },
    #[error("agent `{agent}`, state `{state}`: transition on `{event}` is not covered by any choice")]
    TransitionOutsideRepertoire {
        agent: String,
        state: String,
        event: String,
    },
    #[error("proposition `{prop}` belongs to both `{first}` and `{second}`; proposition sets must be disjoint")]
    SharedProposition {
        prop: String,
        first: String,
        second: String,
    },
    #[error("the system already contains the silent event")]
    AlreadyUndeadlocked,
}

/// Knobs for [`Amas::with_options`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ValidationOptions {
    /// Accept local states without outgoing transitions (empty repertoire).
    /// Such systems violate the AMAS definition but are useful for exercising
    /// deadlock detection.
    pub allow_sink_states: bool,
}

/// A validated agent: `(L_i, ι_i, Evt_i, R_i, T_i, PV_i, V_i)`.
#[derive(Clone, Debug)]
pub struct AgentSpec {
    id: AgentId,
    name: String,
    states: Vec<String>,
    init: usize,
    alphabet: EventSet,
    repertoire: Vec<Vec<Choice>>,
    availability: Vec<EventSet>,
    transitions: Vec<BTreeMap<EventId, usize>>,
    props: PropSet,
    valuation: Vec<PropSet>,
    auxiliary: bool,
}

impl AgentSpec {
    pub fn id(&self) -> AgentId {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn alphabet(&self) -> &EventSet {
        &self.alphabet
    }

    /// `R_i(l)`, in declaration order.
    pub fn repertoire(&self, local: usize) -> &[Choice] {
        &self.repertoire[local]
    }

    /// `⋃R_i(l)`: every event the agent is willing to take part in at `l`.
    pub fn available(&self, local: usize) -> &EventSet {
        &self.availability[local]
    }

    /// `T_i(l, e)`.
    pub fn step(&self, local: usize, event: EventId) -> Option<usize> {
        self.transitions[local].get(&event).copied()
    }

    pub fn transitions(&self, local: usize) -> &BTreeMap<EventId, usize> {
        &self.transitions[local]
    }

    pub fn props(&self) -> &PropSet {
        &self.props
    }

    pub fn valuation(&self, local: usize) -> &PropSet {
        &self.valuation[local]
    }

    /// True for the silent-loop agent added by [`Amas::add_epsilon_agent`].
    pub fn is_auxiliary(&self) -> bool {
        self.auxiliary
    }

    /// Local states reachable in this agent's own automaton.
    pub fn reachable_locals(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.init]);
        let mut stack = vec![self.init];
        while let Some(l) = stack.pop() {
            for &t in self.transitions[l].values() {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }
}

/// A validated asynchronous multi-agent system.
#[derive(Clone, Debug)]
pub struct Amas {
    agents: Vec<AgentSpec>,
    events: Vec<String>,
    event_index: HashMap<String, EventId>,
    owners: Vec<Vec<AgentId>>,
    props: Vec<String>,
    prop_owner: Vec<AgentId>,
    prop_index: HashMap<String, PropId>,
}

impl Amas {
    pub fn new(decls: Vec<AgentDecl>) -> Result<Self, ValidationError> {
        Self::with_options(decls, &ValidationOptions::default())
    }

    pub fn with_options(
        decls: Vec<AgentDecl>,
        options: &ValidationOptions,
    ) -> Result<Self, ValidationError> {
        let plain = decls.into_iter().map(|d| (d, false)).collect();
        Self::build(plain, options)
    }

    fn build(
        decls: Vec<(AgentDecl, bool)>,
        options: &ValidationOptions,
    ) -> Result<Self, ValidationError> {
        if decls.is_empty() {
            return Err(ValidationError::NoAgents);
        }
        let mut amas = Amas {
            agents: Vec::with_capacity(decls.len()),
            events: Vec::new(),
            event_index: HashMap::new(),
            owners: Vec::new(),
            props: Vec::new(),
            prop_owner: Vec::new(),
            prop_index: HashMap::new(),
        };
        let mut agent_names = BTreeSet::new();
        for (index, (decl, auxiliary)) in decls.into_iter().enumerate() {
            if !auxiliary && (decl.name == EPSILON_AGENT || decl.name.contains(EPSILON)) {
                return Err(ValidationError::ReservedName(decl.name));
            }
            if !agent_names.insert(decl.name.clone()) {
                return Err(ValidationError::DuplicateAgent(decl.name));
            }
            let spec = amas.intern_agent(AgentId(index), decl, auxiliary, options)?;
            amas.agents.push(spec);
        }
        amas.owners = vec![Vec::new(); amas.events.len()];
        for agent in &amas.agents {
            for &e in &agent.alphabet {
                amas.owners[e.0].push(agent.id);
            }
        }
        Ok(amas)
    }

    fn intern_event(&mut self, name: &str, auxiliary: bool) -> Result<EventId, ValidationError> {
        if name.contains(EPSILON) && !auxiliary {
            return Err(ValidationError::ReservedName(name.to_string()));
        }
        if let Some(&id) = self.event_index.get(name) {
            return Ok(id);
        }
        let id = EventId(self.events.len());
        self.events.push(name.to_string());
        self.event_index.insert(name.to_string(), id);
        Ok(id)
    }

    fn intern_agent(
        &mut self,
        id: AgentId,
        decl: AgentDecl,
        auxiliary: bool,
        options: &ValidationOptions,
    ) -> Result<AgentSpec, ValidationError> {
        let agent = decl.name.clone();
        let decl = decl.lift_simple();
        let mut states: Vec<String> = Vec::with_capacity(decl.states.len());
        for s in &decl.states {
            if states.contains(&s.name) {
                return Err(ValidationError::DuplicateState {
                    agent,
                    state: s.name.clone(),
                });
            }
            states.push(s.name.clone());
        }
        let init_name = decl
            .init
            .clone()
            .ok_or_else(|| ValidationError::MissingInit(agent.clone()))?;
        let init = states
            .iter()
            .position(|s| *s == init_name)
            .ok_or_else(|| ValidationError::UnknownInit {
                agent: agent.clone(),
                state: init_name.clone(),
            })?;

        let mut alphabet = EventSet::new();
        let mut repertoire = Vec::with_capacity(states.len());
        let mut availability = Vec::with_capacity(states.len());
        let mut transitions = Vec::with_capacity(states.len());
        let mut valuation = Vec::with_capacity(states.len());
        let mut own_props = PropSet::new();

        for s in &decl.states {
            let state = s.name.clone();
            let mut row = BTreeMap::new();
            for (event, target) in &s.transitions {
                let e = self.intern_event(event, auxiliary)?;
                let t = states.iter().position(|x| x == target).ok_or_else(|| {
                    ValidationError::UnknownTarget {
                        agent: agent.clone(),
                        state: state.clone(),
                        event: event.clone(),
                        target: target.clone(),
                    }
                })?;
                if row.insert(e, t).is_some() {
                    return Err(ValidationError::DuplicateTransition {
                        agent: agent.clone(),
                        state: state.clone(),
                        event: event.clone(),
                    });
                }
                alphabet.insert(e);
            }

            let mut choices: Vec<Choice> = Vec::new();
            for raw in s.choices.as_deref().unwrap_or_default() {
                if raw.is_empty() {
                    return Err(ValidationError::EmptyChoice {
                        agent: agent.clone(),
                        state: state.clone(),
                    });
                }
                let mut set = EventSet::new();
                for event in raw {
                    let e = self.intern_event(event, auxiliary)?;
                    if !row.contains_key(&e) {
                        return Err(ValidationError::ChoiceWithoutTransition {
                            agent: agent.clone(),
                            state: state.clone(),
                            event: event.clone(),
                        });
                    }
                    set.insert(e);
                }
                let choice = Choice(set);
                if choices.contains(&choice) {
                    return Err(ValidationError::DuplicateChoice {
                        agent: agent.clone(),
                        state: state.clone(),
                    });
                }
                choices.push(choice);
            }
            if choices.is_empty() && !options.allow_sink_states {
                return Err(ValidationError::EmptyRepertoire {
                    agent: agent.clone(),
                    state: state.clone(),
                });
            }
            let available: EventSet = choices.iter().flat_map(|c| c.iter()).collect();
            if let Some((event, _)) = s
                .transitions
                .iter()
                .find(|(e, _)| !available.contains(&self.event_index[e.as_str()]))
            {
                return Err(ValidationError::TransitionOutsideRepertoire {
                    agent: agent.clone(),
                    state: state.clone(),
                    event: event.clone(),
                });
            }

            let mut labels = PropSet::new();
            for prop in &s.props {
                let p = match self.prop_index.get(prop) {
                    Some(&p) if self.prop_owner[p.0] == id => p,
                    Some(&p) => {
                        return Err(ValidationError::SharedProposition {
                            prop: prop.clone(),
                            first: self.agents[self.prop_owner[p.0].0].name.clone(),
                            second: agent.clone(),
                        })
                    }
                    None => {
                        let p = PropId(self.props.len());
                        self.props.push(prop.clone());
                        self.prop_owner.push(id);
                        self.prop_index.insert(prop.clone(), p);
                        p
                    }
                };
                labels.insert(p);
                own_props.insert(p);
            }

            repertoire.push(choices);
            availability.push(available);
            transitions.push(row);
            valuation.push(labels);
        }

        Ok(AgentSpec {
            id,
            name: decl.name,
            states,
            init,
            alphabet,
            repertoire,
            availability,
            transitions,
            props: own_props,
            valuation,
            auxiliary,
        })
    }

    pub fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    pub fn agent(&self, id: AgentId) -> &AgentSpec {
        &self.agents[id.0]
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().find(|a| a.name == name).map(|a| a.id)
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.events[e.0]
    }

    pub fn event_by_name(&self, name: &str) -> Option<EventId> {
        self.event_index.get(name).copied()
    }

    /// `Agent(e)`: the agents whose alphabet contains `e`, in agent order.
    pub fn owners(&self, e: EventId) -> &[AgentId] {
        &self.owners[e.0]
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn prop_name(&self, p: PropId) -> &str {
        &self.props[p.0]
    }

    pub fn prop_by_name(&self, name: &str) -> Option<PropId> {
        self.prop_index.get(name).copied()
    }

    pub fn prop_owner(&self, p: PropId) -> AgentId {
        self.prop_owner[p.0]
    }

    /// The silent event, if this system carries the auxiliary ε-agent.
    pub fn epsilon(&self) -> Option<EventId> {
        self.event_by_name(EPSILON)
    }

    /// The auxiliary ε-agent, if present.
    pub fn epsilon_agent(&self) -> Option<AgentId> {
        self.agents.iter().find(|a| a.auxiliary).map(|a| a.id)
    }

    /// Converts back to name-based declarations (explicit-choice form).
    /// Auxiliary agents are left out.
    pub fn to_decls(&self) -> Vec<AgentDecl> {
        self.agents
            .iter()
            .filter(|a| !a.auxiliary)
            .map(|a| self.agent_decl(a))
            .collect()
    }

    fn agent_decl(&self, a: &AgentSpec) -> AgentDecl {
        AgentDecl {
            name: a.name.clone(),
            init: Some(a.states[a.init].clone()),
            states: (0..a.states.len())
                .map(|l| StateDecl {
                    name: a.states[l].clone(),
                    props: a.valuation[l].iter().map(|&p| self.props[p.0].clone()).collect(),
                    choices: Some(
                        a.repertoire[l]
                            .iter()
                            .map(|c| c.iter().map(|e| self.events[e.0].clone()).collect())
                            .collect(),
                    ),
                    transitions: a.transitions[l]
                        .iter()
                        .map(|(e, &t)| (self.events[e.0].clone(), a.states[t].clone()))
                        .collect(),
                })
                .collect(),
        }
    }

    /// `S^ε`: the same system plus an agent with a single local state and a
    /// silent self-loop.
    pub fn add_epsilon_agent(&self) -> Result<Amas, ValidationError> {
        if self.epsilon().is_some() || self.epsilon_agent().is_some() {
            return Err(ValidationError::AlreadyUndeadlocked);
        }
        let mut decls: Vec<(AgentDecl, bool)> =
            self.agents.iter().map(|a| (self.agent_decl(a), false)).collect();
        decls.push((
            AgentDecl {
                name: EPSILON_AGENT.to_string(),
                init: Some(EPSILON_LOCAL.to_string()),
                states: vec![StateDecl {
                    name: EPSILON_LOCAL.to_string(),
                    props: Vec::new(),
                    choices: Some(vec![vec![EPSILON.to_string()]]),
                    transitions: vec![(EPSILON.to_string(), EPSILON_LOCAL.to_string())],
                }],
            },
            true,
        ));
        let sinks = self
            .agents
            .iter()
            .any(|a| a.repertoire.iter().any(|r| r.is_empty()));
        Self::build(
            decls,
            &ValidationOptions {
                allow_sink_states: sinks,
            },
        )
    }

    /// Non-fatal findings: local states unreachable in their agent's automaton.
    pub fn lint(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        for a in &self.agents {
            let reach = a.reachable_locals();
            for (l, name) in a.states.iter().enumerate() {
                if !reach.contains(&l) {
                    warnings.push(format!(
                        "agent `{}`: local state `{}` is unreachable from `{}`",
                        a.name, name, a.states[a.init]
                    ));
                }
            }
        }
        warnings
    }

    /// Whether every non-auxiliary local-state name is a single character, in
    /// which case global states are printed by concatenation (`"101"`).
    pub(crate) fn compact_state_names(&self) -> bool {
        self.agents
            .iter()
            .filter(|a| !a.auxiliary)
            .all(|a| a.states.iter().all(|s| s.chars().count() == 1))
    }

    pub fn format_choice(&self, choice: &Choice) -> String {
        self.format_events(choice.events())
    }

    pub fn format_events(&self, events: &EventSet) -> String {
        let names: Vec<&str> = events.iter().map(|&e| self.event_name(e)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

impl fmt::Display for Amas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_amas(self))
    }
}
