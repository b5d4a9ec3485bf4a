//! Interleaved global models of an AMAS and their undeadlocked variants.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::amas::{AgentId, Amas, Choice, EventId, EventSet, PropSet, ValidationError, EPSILON};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown global state `{0}`")]
    UnknownState(String),
    #[error("choice {choice} is not in the repertoire of agent `{agent}` at local state `{local}`")]
    ChoiceNotInRepertoire {
        agent: String,
        local: String,
        choice: String,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// Which global model of an AMAS `S` is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// `IIS(S)`.
    Iis,
    /// `IIS^ε(S)`: ε-loops exactly where some joint selection blocks.
    Undeadlocked,
    /// `IIS(S^ε)`: an auxiliary agent contributes an ε-loop everywhere.
    EpsAmas,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Iis => "iis",
            ModelKind::Undeadlocked => "undeadlocked",
            ModelKind::EpsAmas => "eps-amas",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "iis" => Ok(ModelKind::Iis),
            "undeadlocked" => Ok(ModelKind::Undeadlocked),
            "eps-amas" => Ok(ModelKind::EpsAmas),
            other => Err(format!("unknown model kind `{other}` (iis, undeadlocked, eps-amas)")),
        }
    }
}

/// A tuple of local states in agent order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalState(pub Vec<usize>);

impl GlobalState {
    pub fn local(&self, agent: AgentId) -> usize {
        self.0[agent.0]
    }
}

/// Anything with event-labelled successor lists over dense state indices.
pub trait TransitionGraph {
    fn num_states(&self) -> usize;
    /// Outgoing `(event, target)` pairs, sorted by event.
    fn successors(&self, s: StateId) -> &[(EventId, StateId)];

    fn num_transitions(&self) -> usize {
        (0..self.num_states()).map(|s| self.successors(s).len()).sum()
    }
}

/// A global model: reachable global states, deterministic event-labelled
/// transitions and the induced valuation. State 0 is the initial state.
#[derive(Clone, Debug)]
pub struct Model {
    amas: Arc<Amas>,
    kind: ModelKind,
    event_names: Vec<String>,
    epsilon: Option<EventId>,
    /// Whether ε is a model-level addition (no owner) rather than an AMAS event.
    synthetic_epsilon: bool,
    states: Vec<GlobalState>,
    index: HashMap<GlobalState, StateId>,
    succ: Vec<Vec<(EventId, StateId)>>,
    labels: Vec<PropSet>,
    epsilon_states: BTreeSet<StateId>,
}

/// `IIS(S)`.
pub fn build_iis(amas: &Amas) -> Model {
    Model::compose(Arc::new(amas.clone()), ModelKind::Iis)
}

/// `IIS^ε(S)`. Fails if `S` already uses ε.
pub fn build_undeadlocked_iis(amas: &Amas) -> Result<Model, ModelError> {
    if amas.epsilon().is_some() {
        return Err(ValidationError::AlreadyUndeadlocked.into());
    }
    Ok(Model::compose(Arc::new(amas.clone()), ModelKind::Undeadlocked))
}

/// `IIS(S^ε)`.
pub fn build_eps_amas_iis(amas: &Amas) -> Result<Model, ModelError> {
    let eps = amas.add_epsilon_agent()?;
    Ok(Model::compose(Arc::new(eps), ModelKind::EpsAmas))
}

/// Builds the requested variant of the model of `amas`.
pub fn build(amas: &Amas, kind: ModelKind) -> Result<Model, ModelError> {
    match kind {
        ModelKind::Iis => Ok(build_iis(amas)),
        ModelKind::Undeadlocked => build_undeadlocked_iis(amas),
        ModelKind::EpsAmas => build_eps_amas_iis(amas),
    }
}

/// Cartesian product of per-agent option lists, calling `f` on each tuple
/// until it returns true. Returns whether any call did.
fn any_product<'a, T>(options: &[&'a [T]], f: &mut impl FnMut(&[&'a T]) -> bool) -> bool {
    fn go<'a, T>(
        options: &[&'a [T]],
        acc: &mut Vec<&'a T>,
        f: &mut impl FnMut(&[&'a T]) -> bool,
    ) -> bool {
        if acc.len() == options.len() {
            return f(acc);
        }
        for item in options[acc.len()] {
            acc.push(item);
            if go(options, acc, f) {
                return true;
            }
            acc.pop();
        }
        false
    }
    go(options, &mut Vec::with_capacity(options.len()), f)
}

impl Model {
    fn compose(amas: Arc<Amas>, kind: ModelKind) -> Model {
        let mut event_names = amas.events().to_vec();
        let (epsilon, synthetic_epsilon) = match kind {
            ModelKind::Iis => (None, false),
            ModelKind::Undeadlocked => {
                event_names.push(EPSILON.to_string());
                (Some(EventId(event_names.len() - 1)), true)
            }
            ModelKind::EpsAmas => (amas.epsilon(), false),
        };
        let mut model = Model {
            amas,
            kind,
            event_names,
            epsilon,
            synthetic_epsilon,
            states: Vec::new(),
            index: HashMap::new(),
            succ: Vec::new(),
            labels: Vec::new(),
            epsilon_states: BTreeSet::new(),
        };

        let init = GlobalState(model.amas.agents().iter().map(|a| a.init()).collect());
        model.intern(init);
        let mut queue = VecDeque::from([0]);
        while let Some(s) = queue.pop_front() {
            let g = model.states[s].clone();
            let mut row = Vec::new();
            for e in model.candidate_events(&g) {
                if let Some(next) = model.step(&g, e) {
                    let before = model.states.len();
                    let t = model.intern(next);
                    if t == before {
                        queue.push_back(t);
                    }
                    row.push((e, t));
                }
            }
            if synthetic_epsilon && model.some_selection_blocks(&g, &vec![None; g.0.len()]) {
                row.push((epsilon.expect("synthetic ε"), s));
                model.epsilon_states.insert(s);
            }
            if kind == ModelKind::EpsAmas {
                model.epsilon_states.insert(s);
            }
            model.succ[s] = row;
        }
        model
    }

    fn intern(&mut self, g: GlobalState) -> StateId {
        if let Some(&s) = self.index.get(&g) {
            return s;
        }
        let s = self.states.len();
        let labels = self
            .amas
            .agents()
            .iter()
            .flat_map(|a| a.valuation(g.local(a.id())).iter().copied())
            .collect();
        self.index.insert(g.clone(), s);
        self.states.push(g);
        self.succ.push(Vec::new());
        self.labels.push(labels);
        s
    }

    /// Events some agent offers at `g`, in id order.
    fn candidate_events(&self, g: &GlobalState) -> EventSet {
        self.amas
            .agents()
            .iter()
            .flat_map(|a| a.available(g.local(a.id())).iter().copied())
            .collect()
    }

    /// Global `T(g, e)` on AMAS events.
    fn step(&self, g: &GlobalState, e: EventId) -> Option<GlobalState> {
        let mut next = g.clone();
        for &i in self.amas.owners(e) {
            next.0[i.0] = self.amas.agent(i).step(g.0[i.0], e)?;
        }
        Some(next)
    }

    pub fn amas(&self) -> &Amas {
        &self.amas
    }

    pub fn amas_arc(&self) -> &Arc<Amas> {
        &self.amas
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn states(&self) -> &[GlobalState] {
        &self.states
    }

    pub fn state(&self, s: StateId) -> &GlobalState {
        &self.states[s]
    }

    pub fn state_id(&self, g: &GlobalState) -> Option<StateId> {
        self.index.get(g).copied()
    }

    pub fn num_events(&self) -> usize {
        self.event_names.len()
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.event_names[e.0]
    }

    pub fn event_by_name(&self, name: &str) -> Option<EventId> {
        self.event_names.iter().position(|n| n == name).map(EventId)
    }

    pub fn epsilon(&self) -> Option<EventId> {
        self.epsilon
    }

    pub fn is_epsilon(&self, e: EventId) -> bool {
        self.epsilon == Some(e)
    }

    /// `Agent(e)`. The ε of an undeadlocked IIS has no owner.
    pub fn owners(&self, e: EventId) -> &[AgentId] {
        if self.synthetic_epsilon && self.is_epsilon(e) {
            &[]
        } else {
            self.amas.owners(e)
        }
    }

    pub fn shares_owner(&self, a: EventId, b: EventId) -> bool {
        let ob = self.owners(b);
        self.owners(a).iter().any(|i| ob.contains(i))
    }

    pub fn labels(&self, s: StateId) -> &PropSet {
        &self.labels[s]
    }

    /// States carrying an ε self-loop.
    pub fn epsilon_states(&self) -> &BTreeSet<StateId> {
        &self.epsilon_states
    }

    pub fn has_epsilon_loop(&self, s: StateId) -> bool {
        self.epsilon_states.contains(&s)
    }

    pub fn target(&self, s: StateId, e: EventId) -> Option<StateId> {
        self.succ[s]
            .binary_search_by_key(&e, |&(x, _)| x)
            .ok()
            .map(|i| self.succ[s][i].1)
    }

    /// `enabled(g)`.
    pub fn enabled(&self, s: StateId) -> EventSet {
        self.succ[s].iter().map(|&(e, _)| e).collect()
    }

    /// Name of a global state: local names concatenated when they are all one
    /// character, comma-separated otherwise. The auxiliary ε-agent is omitted.
    pub fn state_name(&self, s: StateId) -> String {
        let compact = self.amas.compact_state_names();
        let parts: Vec<&str> = self
            .amas
            .agents()
            .iter()
            .filter(|a| !a.is_auxiliary())
            .map(|a| a.states()[self.states[s].local(a.id())].as_str())
            .collect();
        if compact {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    pub fn state_by_name(&self, name: &str) -> Result<StateId, ModelError> {
        (0..self.states.len())
            .find(|&s| self.state_name(s) == name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    /// Def. 3.2 without the undeadlocking fixup: `e` is enabled by the
    /// selection iff every selecting owner picked it and every other owner
    /// offers it. `selection[i]` is agent `i`'s choice, `None` outside the
    /// coalition. Never contains ε unless ε is an ordinary AMAS event.
    ///
    /// Computed from the agents, not from this model's edges, so a submodel
    /// answers exactly as its parent does.
    pub fn enabled_for_strict(&self, s: StateId, selection: &[Option<&Choice>]) -> EventSet {
        let g = &self.states[s];
        self.candidate_events(g)
            .into_iter()
            .filter(|&e| {
                let owners = self.amas.owners(e);
                !owners.is_empty()
                    && owners.iter().all(|&i| match selection.get(i.0).copied().flatten() {
                    Some(c) => c.contains(e),
                    None => self.amas.agent(i).available(g.local(i)).contains(&e),
                })
            })
            .collect()
    }

    /// Whether some completion of `selection` (choices for the agents left as
    /// `None`) enables nothing.
    pub fn some_selection_blocks(&self, g: &GlobalState, selection: &[Option<&Choice>]) -> bool {
        // An agent without choices counts as selecting nothing.
        let empty = [Choice::new([])];
        let options: Vec<&[Choice]> = self
            .amas
            .agents()
            .iter()
            .map(|a| {
                let rep = a.repertoire(g.local(a.id()));
                if rep.is_empty() {
                    &empty[..]
                } else {
                    rep
                }
            })
            .collect();
        let fixed: Vec<Option<&Choice>> = (0..options.len())
            .map(|i| selection.get(i).copied().flatten())
            .collect();
        let free: Vec<usize> = (0..options.len()).filter(|&i| fixed[i].is_none()).collect();
        let free_options: Vec<&[Choice]> = free.iter().map(|&i| options[i]).collect();
        let candidates = self.candidate_events(g);
        any_product(&free_options, &mut |picked| {
            let mut full = fixed.clone();
            for (k, &i) in free.iter().enumerate() {
                full[i] = Some(picked[k]);
            }
            !candidates.iter().any(|&e| {
                let owners = self.amas.owners(e);
                !owners.is_empty() && owners.iter().all(|&i| full[i.0].is_some_and(|c| c.contains(e)))
            })
        })
    }

    /// `enabled_M(g, σ_A(g))` with the undeadlocking rule: in `IIS^ε`, ε is
    /// included iff some choices of the remaining agents complete the
    /// selection to one that blocks. In particular a blocking coalition
    /// selection yields exactly `{ε}`.
    pub fn enabled_for_selection(&self, s: StateId, selection: &[Option<&Choice>]) -> EventSet {
        let mut out = self.enabled_for_strict(s, selection);
        if self.synthetic_epsilon && self.has_epsilon_loop(s) {
            if let Some(eps) = self.epsilon {
                if out.is_empty() || self.some_selection_blocks(&self.states[s], selection) {
                    out.insert(eps);
                }
            }
        }
        out
    }

    /// Validating form of [`Model::enabled_for_selection`] keyed by agent.
    pub fn enabled_for(
        &self,
        s: StateId,
        choices: &BTreeMap<AgentId, Choice>,
    ) -> Result<EventSet, ModelError> {
        let g = &self.states[s];
        let mut selection: Vec<Option<&Choice>> = vec![None; self.amas.num_agents()];
        for (&i, c) in choices {
            let agent = self.amas.agent(i);
            if !agent.repertoire(g.local(i)).contains(c) {
                return Err(ModelError::ChoiceNotInRepertoire {
                    agent: agent.name().to_string(),
                    local: agent.states()[g.local(i)].clone(),
                    choice: self.amas.format_choice(c),
                });
            }
            selection[i.0] = Some(c);
        }
        Ok(self.enabled_for_selection(s, &selection))
    }

    /// States without any outgoing transition.
    pub fn check_serial(&self) -> Vec<StateId> {
        (0..self.states.len()).filter(|&s| self.succ[s].is_empty()).collect()
    }

    /// A submodel: the states reachable from the initial state over the edges
    /// accepted by `keep`. Also returns each new state's index in `self`.
    pub fn submodel(&self, keep: impl Fn(StateId, EventId, StateId) -> bool) -> (Model, Vec<StateId>) {
        let mut origin = vec![0];
        let mut renum = HashMap::from([(0, 0)]);
        let mut succ: Vec<Vec<(EventId, StateId)>> = vec![Vec::new()];
        let mut k = 0;
        while k < origin.len() {
            let s = origin[k];
            let mut row = Vec::new();
            for &(e, t) in &self.succ[s] {
                if keep(s, e, t) {
                    let next = *renum.entry(t).or_insert_with(|| {
                        origin.push(t);
                        succ.push(Vec::new());
                        origin.len() - 1
                    });
                    row.push((e, next));
                }
            }
            succ[k] = row;
            k += 1;
        }
        let states: Vec<GlobalState> = origin.iter().map(|&s| self.states[s].clone()).collect();
        let model = Model {
            amas: self.amas.clone(),
            kind: self.kind,
            event_names: self.event_names.clone(),
            epsilon: self.epsilon,
            synthetic_epsilon: self.synthetic_epsilon,
            index: states.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect(),
            labels: origin.iter().map(|&s| self.labels[s].clone()).collect(),
            epsilon_states: (0..origin.len())
                .filter(|&i| self.epsilon.is_some_and(|eps| succ[i].iter().any(|&(e, _)| e == eps)))
                .collect(),
            states,
            succ,
        };
        (model, origin)
    }

    /// Deterministic JSON-ready description: states sorted by name,
    /// transitions by (source name, event name).
    pub fn to_doc(&self) -> ModelDoc {
        self.doc_of(self, |_| true)
    }

    /// Same shape as [`Model::to_doc`] for any graph over this model's states.
    pub fn doc_of<G: TransitionGraph>(&self, graph: &G, include: impl Fn(StateId) -> bool) -> ModelDoc {
        let mut states: Vec<StateDoc> = (0..self.states.len())
            .filter(|&s| include(s))
            .map(|s| StateDoc {
                name: self.state_name(s),
                props: self.labels[s].iter().map(|&p| self.amas.prop_name(p).to_string()).collect(),
                epsilon_loop: graph.successors(s).iter().any(|&(e, _)| self.is_epsilon(e)),
            })
            .collect();
        states.sort_by(|a, b| a.name.cmp(&b.name));
        let mut transitions: Vec<TransitionDoc> = (0..self.states.len())
            .filter(|&s| include(s))
            .flat_map(|s| {
                graph.successors(s).iter().map(move |&(e, t)| TransitionDoc {
                    from: self.state_name(s),
                    event: self.event_name(e).to_string(),
                    to: self.state_name(t),
                })
            })
            .collect();
        transitions.sort_by(|a, b| (&a.from, &a.event).cmp(&(&b.from, &b.event)));
        ModelDoc {
            kind: self.kind,
            agents: self
                .amas
                .agents()
                .iter()
                .filter(|a| !a.is_auxiliary())
                .map(|a| a.name().to_string())
                .collect(),
            initial: self.state_name(0),
            states,
            transitions,
        }
    }
}

impl TransitionGraph for Model {
    fn num_states(&self) -> usize {
        self.states.len()
    }

    fn successors(&self, s: StateId) -> &[(EventId, StateId)] {
        &self.succ[s]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateDoc {
    pub name: String,
    pub props: Vec<String>,
    pub epsilon_loop: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionDoc {
    pub from: String,
    pub event: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelDoc {
    pub kind: ModelKind,
    pub agents: Vec<String>,
    pub initial: String,
    pub states: Vec<StateDoc>,
    pub transitions: Vec<TransitionDoc>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::{parse_amas, parse_amas_with, ValidationOptions};
    use crate::bundled;

    fn names(model: &Model, events: &EventSet) -> Vec<String> {
        let mut v: Vec<String> = events.iter().map(|&e| model.event_name(e).to_string()).collect();
        v.sort();
        v
    }

    fn state_names(model: &Model, it: impl IntoIterator<Item = StateId>) -> Vec<String> {
        let mut v: Vec<String> = it.into_iter().map(|s| model.state_name(s)).collect();
        v.sort();
        v
    }

    fn choice(model: &Model, events: &[&str]) -> Choice {
        Choice::new(events.iter().map(|e| model.event_by_name(e).unwrap()))
    }

    /// Brute-force enabled set straight from the agents' transition tables.
    fn enabled_oracle(model: &Model, s: StateId) -> Vec<String> {
        let amas = model.amas();
        let g = model.state(s);
        let mut out: Vec<String> = amas
            .events()
            .iter()
            .enumerate()
            .filter(|(e, _)| {
                amas.agents().iter().all(|a| {
                    !a.alphabet().contains(&EventId(*e)) || a.step(g.local(a.id()), EventId(*e)).is_some()
                })
            })
            .map(|(_, n)| n.clone())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn conference_has_seven_states() {
        let m = build_iis(&parse_amas(bundled::CONFERENCE).unwrap());
        assert_eq!(
            state_names(&m, 0..m.num_states()),
            ["000", "002", "101", "211", "231", "321", "331"]
        );
        assert!(m.check_serial().is_empty());
    }

    #[test]
    fn voting_has_five_states() {
        let m = build_iis(&parse_amas(bundled::VOTING).unwrap());
        assert_eq!(state_names(&m, 0..m.num_states()), ["00", "10", "20", "31", "41"]);
        assert!(m.check_serial().is_empty());
    }

    #[test]
    fn enabled_matches_transition_tables() {
        let m = build_iis(&parse_amas(bundled::CONFERENCE).unwrap());
        for s in 0..m.num_states() {
            assert_eq!(names(&m, &m.enabled(s)), enabled_oracle(&m, s));
        }
        let s000 = m.state_by_name("000").unwrap();
        let s101 = m.state_by_name("101").unwrap();
        assert_eq!(names(&m, &m.enabled(s000)), ["giveup", "proceed"]);
        assert_eq!(names(&m, &m.enabled(s101)), ["online", "onsite"]);
    }

    #[test]
    fn undeadlocked_voting_idle_loops() {
        let m = build_undeadlocked_iis(&parse_amas(bundled::VOTING).unwrap()).unwrap();
        let s = m.state_by_name("31").unwrap();
        assert_eq!(names(&m, &m.enabled(s)), ["idle_ebm", "idle_v"]);
        assert_eq!(state_names(&m, m.epsilon_states().iter().copied()), ["00", "10", "20"]);
    }

    #[test]
    fn conference_epsilon_only_at_101() {
        let m = build_undeadlocked_iis(&parse_amas(bundled::CONFERENCE).unwrap()).unwrap();
        assert_eq!(state_names(&m, m.epsilon_states().iter().copied()), ["101"]);
    }

    #[test]
    fn enabled_for_examples() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let gc = amas.agent_by_name("gc").unwrap();
        let oc = amas.agent_by_name("oc").unwrap();
        let m = build_iis(&amas);
        let s000 = m.state_by_name("000").unwrap();
        let sel = BTreeMap::from([(gc, choice(&m, &["proceed"])), (oc, choice(&m, &["online"]))]);
        assert_eq!(names(&m, &m.enabled_for(s000, &sel).unwrap()), ["giveup", "proceed"]);
        assert_eq!(m.enabled_for(s000, &BTreeMap::new()).unwrap(), m.enabled(s000));

        let me = build_undeadlocked_iis(&amas).unwrap();
        let s101 = me.state_by_name("101").unwrap();
        let sel = BTreeMap::from([(gc, choice(&me, &["onsite"])), (oc, choice(&me, &["online"]))]);
        assert_eq!(names(&me, &me.enabled_for(s101, &sel).unwrap()), ["ε"]);
    }

    #[test]
    fn enabled_for_rejects_foreign_choice() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let m = build_iis(&amas);
        let gc = amas.agent_by_name("gc").unwrap();
        let sel = BTreeMap::from([(gc, choice(&m, &["onsite"]))]);
        assert!(matches!(
            m.enabled_for(0, &sel),
            Err(ModelError::ChoiceNotInRepertoire { .. })
        ));
    }

    #[test]
    fn eps_amas_loops_everywhere() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let m = build_eps_amas_iis(&amas).unwrap();
        assert_eq!(m.num_states(), 7);
        assert_eq!(m.epsilon_states().len(), 7);
        assert!(build_eps_amas_iis(&amas.add_epsilon_agent().unwrap()).is_err());
    }

    #[test]
    fn single_loop_agent_with_epsilon_agent() {
        let amas = parse_amas("agent a { init: 0; state 0 { on x -> 0; } }").unwrap();
        let m = build_eps_amas_iis(&amas).unwrap();
        assert_eq!(m.num_states(), 1);
        assert_eq!(m.num_transitions(), 2);
    }

    #[test]
    fn no_blocking_means_no_epsilon() {
        let amas = parse_amas(bundled::VOTING_EXPLICIT).unwrap();
        let plain = build_iis(&amas);
        let und = build_undeadlocked_iis(&amas).unwrap();
        assert!(und.epsilon_states().is_empty());
        assert_eq!(plain.to_doc().transitions, und.to_doc().transitions);
    }

    #[test]
    fn sink_is_reported() {
        let src = "agent a { init: 0; state 0 { on x -> 1; } state 1 { } }";
        let amas = parse_amas_with(src, &ValidationOptions { allow_sink_states: true }).unwrap();
        let m = build_iis(&amas);
        assert_eq!(state_names(&m, m.check_serial()), ["1"]);
    }

    #[test]
    fn single_agent_is_its_own_automaton() {
        let amas = parse_amas("agent a { init: s; state s { on x -> t; } state t { on y -> s; on z -> t; } }")
            .unwrap();
        let m = build_iis(&amas);
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.num_transitions(), 3);
    }

    #[test]
    fn doc_is_sorted() {
        let m = build_undeadlocked_iis(&parse_amas(bundled::VOTING).unwrap()).unwrap();
        let doc = m.to_doc();
        let mut sorted = doc.transitions.clone();
        sorted.sort_by(|a, b| (&a.from, &a.event).cmp(&(&b.from, &b.event)));
        assert_eq!(doc.transitions, sorted);
        assert_eq!(doc.initial, "00");
        assert!(doc.states.iter().any(|s| s.name == "00" && s.epsilon_loop));
    }
}
