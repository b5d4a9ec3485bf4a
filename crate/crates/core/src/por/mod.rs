//! Partial-order reduction of undeadlocked models, with direct checkers for
//! the ample-set conditions C1–C3 and for agreement of verdicts.
//!
//! The reduced model is built depth-first. At each state the candidate ample
//! set is the set of events enabled for a single agent, tried in agent order,
//! accepted when it is invisible (C2), cannot be preceded by a dependent
//! event (C1) and closes no cycle onto the search stack (C3). Otherwise the
//! state is fully expanded. ε is explored wherever the full model has it.

mod stutter;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::amas::{AgentId, Amas, EventId, EventSet, PropId};
use crate::compose::{build, Model, ModelKind, StateId, TransitionGraph};
use crate::logic::{classify, StateFormula};
use crate::mc::{CheckError, Checker, Semantics};
use crate::par::Execution;
use crate::strategy::OutcomeMode;

pub use stutter::{bounded_stutter_equiv, bounded_stutter_equiv_graphs, StutterVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("reduction needs an undeadlocked model (undeadlocked or eps-amas), got `{0}`")]
    NotUndeadlocked(ModelKind),
    #[error("formula `{formula}` is outside the preserved fragment: {reason}")]
    NonCompliant { formula: String, reason: String },
    #[error("bound must be at least 1")]
    BoundTooSmall,
    #[error(transparent)]
    Model(#[from] crate::compose::ModelError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// How condition C1 is established for a candidate ample set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum C1Mode {
    /// Explore the full model from the state, avoiding the candidate events.
    #[default]
    Exact,
    /// Sound shortcut from the alphabets: the candidate is everything one
    /// agent offers at its local state, and only that agent owns those events.
    Syntactic,
}

impl fmt::Display for C1Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            C1Mode::Exact => "exact",
            C1Mode::Syntactic => "syntactic",
        })
    }
}

impl FromStr for C1Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(C1Mode::Exact),
            "syntactic" => Ok(C1Mode::Syntactic),
            other => Err(format!("unknown C1 mode `{other}` (exact, syntactic)")),
        }
    }
}

/// Coalition `A` and observed propositions `PV̂` the reduction must respect.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionConfig {
    pub coalition: BTreeSet<AgentId>,
    pub props: BTreeSet<PropId>,
    pub c1_mode: C1Mode,
}

impl ReductionConfig {
    /// The smallest configuration covering every coalition and proposition
    /// mentioned in `formulas`.
    pub fn for_formulas(formulas: &[StateFormula], c1_mode: C1Mode) -> Self {
        let mut cfg = ReductionConfig {
            c1_mode,
            ..Default::default()
        };
        for f in formulas {
            let c = classify(f);
            cfg.coalition.extend(c.coalitions.into_iter().flatten());
            cfg.props.extend(c.props);
        }
        cfg
    }
}

/// `Invis_{A,PV̂}`: events owned outside `A` whose every transition keeps the
/// observed part of the valuation.
pub fn invisible_events(model: &Model, coalition: &BTreeSet<AgentId>, props: &BTreeSet<PropId>) -> EventSet {
    let observed = |s: StateId| -> BTreeSet<PropId> { model.labels(s).intersection(props).copied().collect() };
    let mut visible = EventSet::new();
    for s in 0..model.num_states() {
        for &(e, t) in model.successors(s) {
            if observed(s) != observed(t) {
                visible.insert(e);
            }
        }
    }
    (0..model.num_events())
        .map(EventId)
        .filter(|&e| !visible.contains(&e) && !model.owners(e).iter().any(|a| coalition.contains(a)))
        .collect()
}

/// Events are dependent when they share an owner or are both visible; an
/// event is always dependent on itself, and ε on nothing else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceRel {
    pub visible: EventSet,
    n: usize,
    independent: Vec<bool>,
}

impl IndependenceRel {
    pub fn independent(&self, a: EventId, b: EventId) -> bool {
        self.independent[a.0 * self.n + b.0]
    }

    pub fn dependent(&self, a: EventId, b: EventId) -> bool {
        !self.independent(a, b)
    }
}

pub fn independence(model: &Model, coalition: &BTreeSet<AgentId>, props: &BTreeSet<PropId>) -> IndependenceRel {
    let invisible = invisible_events(model, coalition, props);
    let n = model.num_events();
    let visible: EventSet = (0..n).map(EventId).filter(|e| !invisible.contains(e)).collect();
    let mut independent = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            let (ea, eb) = (EventId(a), EventId(b));
            independent[a * n + b] = a != b
                && (model.is_epsilon(ea)
                    || model.is_epsilon(eb)
                    || (!model.shares_owner(ea, eb) && !(visible.contains(&ea) && visible.contains(&eb))));
        }
    }
    IndependenceRel {
        visible,
        n,
        independent,
    }
}

/// C1 at `s` for ample set `ample` (ε excluded): along every path of the full
/// model from `s` that avoids `ample`, no event dependent on a member of
/// `ample` can occur.
pub fn check_c1(full: &Model, s: StateId, ample: &EventSet, indep: &IndependenceRel) -> bool {
    let mut seen = vec![false; full.num_states()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(h) = stack.pop() {
        for &(b, t) in full.successors(h) {
            if ample.contains(&b) {
                continue;
            }
            if ample.iter().any(|&e| indep.dependent(e, b)) {
                return false;
            }
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    true
}

/// A submodel together with the ample set used at each of its states.
#[derive(Clone, Debug)]
pub struct ReducedModel {
    pub model: Model,
    /// Index of each reduced state in the full model.
    pub origin: Vec<StateId>,
    /// Events explored at each reduced state (ε included where present).
    pub ample: Vec<EventSet>,
    pub fully_expanded: Vec<bool>,
}

impl ReducedModel {
    /// The submodel of `full` that explores `ample(s)` at every state `s`.
    pub fn from_ample(full: &Model, ample: impl Fn(StateId) -> EventSet) -> Self {
        let sets: Vec<EventSet> = (0..full.num_states()).map(&ample).collect();
        let (model, origin) = full.submodel(|s, e, _| sets[s].contains(&e));
        let ample: Vec<EventSet> = origin.iter().map(|&s| sets[s].clone()).collect();
        let fully_expanded = origin
            .iter()
            .zip(&ample)
            .map(|(&s, a)| full.enabled(s).is_subset(a))
            .collect();
        ReducedModel {
            model,
            origin,
            ample,
            fully_expanded,
        }
    }

    pub fn stats(&self, full: &Model) -> ReductionStats {
        ReductionStats {
            full_states: full.num_states(),
            reduced_states: self.model.num_states(),
            full_transitions: full.num_transitions(),
            reduced_transitions: self.model.num_transitions(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionStats {
    pub full_states: usize,
    pub reduced_states: usize,
    pub full_transitions: usize,
    pub reduced_transitions: usize,
}

/// Depth-first ample-set reduction of an undeadlocked model.
pub fn reduce(full: &Model, cfg: &ReductionConfig) -> Result<ReducedModel, ReductionError> {
    if full.kind() == ModelKind::Iis {
        return Err(ReductionError::NotUndeadlocked(full.kind()));
    }
    let indep = independence(full, &cfg.coalition, &cfg.props);
    let amas = full.amas();
    let n = full.num_states();
    let mut ample: Vec<Option<EventSet>> = vec![None; n];
    let mut on_stack = vec![false; n];

    let choose = |s: StateId, on_stack: &[bool]| -> EventSet {
        let enabled = full.enabled(s);
        let proper: EventSet = enabled.iter().copied().filter(|&e| !full.is_epsilon(e)).collect();
        let g = full.state(s);
        for agent in amas.agents().iter().filter(|a| !a.is_auxiliary()) {
            let i = agent.id();
            let cand: EventSet = proper.iter().copied().filter(|&e| full.owners(e).contains(&i)).collect();
            if cand.is_empty() || cand == proper {
                continue;
            }
            if cand.iter().any(|e| indep.visible.contains(e)) {
                continue;
            }
            let c1 = match cfg.c1_mode {
                C1Mode::Exact => check_c1(full, s, &cand, &indep),
                C1Mode::Syntactic => {
                    cand.iter().all(|&e| full.owners(e) == [i]) && &cand == agent.available(g.local(i))
                }
            };
            if !c1 {
                continue;
            }
            if cand.iter().any(|&e| full.target(s, e).is_some_and(|t| on_stack[t])) {
                continue;
            }
            let mut chosen = cand;
            if let Some(eps) = full.epsilon().filter(|_| full.has_epsilon_loop(s)) {
                chosen.insert(eps);
            }
            return chosen;
        }
        enabled
    };

    // Iterative DFS: (state, successors still to visit).
    let root = full.initial();
    on_stack[root] = true;
    let first = choose(root, &on_stack);
    let mut stack: Vec<(StateId, Vec<StateId>)> = vec![(root, targets(full, root, &first))];
    ample[root] = Some(first);
    while let Some((s, todo)) = stack.last_mut() {
        let s = *s;
        match todo.pop() {
            Some(t) if ample[t].is_none() => {
                on_stack[t] = true;
                let set = choose(t, &on_stack);
                let next = targets(full, t, &set);
                ample[t] = Some(set);
                stack.push((t, next));
            }
            Some(_) => {}
            None => {
                on_stack[s] = false;
                stack.pop();
            }
        }
    }
    Ok(ReducedModel::from_ample(full, |s| ample[s].clone().unwrap_or_default()))
}

/// Successors of `s` over `events`, in reverse so that popping visits them in
/// event order.
fn targets(full: &Model, s: StateId, events: &EventSet) -> Vec<StateId> {
    let mut v: Vec<StateId> = full
        .successors(s)
        .iter()
        .filter(|(e, _)| events.contains(e))
        .map(|&(_, t)| t)
        .collect();
    v.reverse();
    v
}

/// C1 (exact) at every partially expanded state.
pub fn check_c1_all(full: &Model, reduced: &ReducedModel, indep: &IndependenceRel) -> bool {
    (0..reduced.model.num_states()).filter(|&k| !reduced.fully_expanded[k]).all(|k| {
        let proper: EventSet = reduced.ample[k].iter().copied().filter(|&e| !full.is_epsilon(e)).collect();
        check_c1(full, reduced.origin[k], &proper, indep)
    })
}

/// C2: partially expanded states explore only invisible events (and ε).
pub fn check_c2(full: &Model, reduced: &ReducedModel, indep: &IndependenceRel) -> bool {
    (0..reduced.model.num_states())
        .filter(|&k| !reduced.fully_expanded[k])
        .all(|k| {
            reduced.ample[k]
                .iter()
                .all(|&e| full.is_epsilon(e) || !indep.visible.contains(&e))
        })
}

/// C3: every cycle without ε-transitions passes a fully expanded state, i.e.
/// the non-ε edges among partially expanded states form no cycle.
pub fn check_c3(reduced: &ReducedModel) -> bool {
    let m = &reduced.model;
    let n = m.num_states();
    let partial = |s: StateId| !reduced.fully_expanded[s];
    let mut indegree = vec![0usize; n];
    for s in (0..n).filter(|&s| partial(s)) {
        for &(e, t) in m.successors(s) {
            if !m.is_epsilon(e) && partial(t) {
                indegree[t] += 1;
            }
        }
    }
    let mut queue: Vec<StateId> = (0..n).filter(|&s| partial(s) && indegree[s] == 0).collect();
    let mut removed = 0;
    while let Some(s) = queue.pop() {
        removed += 1;
        for &(e, t) in m.successors(s) {
            if !m.is_epsilon(e) && partial(t) {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    queue.push(t);
                }
            }
        }
    }
    removed == (0..n).filter(|&s| partial(s)).count()
}

/// One formula checked on one full/reduced pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementRow {
    pub formula: String,
    pub model: ModelKind,
    pub semantics: OutcomeMode,
    pub full: bool,
    pub reduced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantReport {
    pub model: ModelKind,
    pub semantics: OutcomeMode,
    pub stats: ReductionStats,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub epsilon_kept: bool,
    pub stutter: Option<StutterVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub coalition: Vec<String>,
    pub props: Vec<String>,
    pub c1_mode: C1Mode,
    pub variants: Vec<VariantReport>,
    pub rows: Vec<AgreementRow>,
    pub disagreements: usize,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.disagreements == 0 && self.variants.iter().all(|v| v.c1 && v.c2 && v.c3 && v.epsilon_kept)
    }
}

/// Rejects formulas outside the preserved fragment or outside `cfg`.
pub fn validate_formulas(amas: &Amas, formulas: &[StateFormula], cfg: &ReductionConfig) -> Result<(), ReductionError> {
    for f in formulas {
        let c = classify(f);
        let shown = f.display(amas).to_string();
        let reason = if c.has_next {
            Some("uses the next operator".to_string())
        } else if c.nested {
            Some("nests strategic modalities".to_string())
        } else if let Some(a) = c.coalitions.iter().flatten().find(|a| !cfg.coalition.contains(a)) {
            Some(format!("agent `{}` is outside the reduction coalition", amas.agent(*a).name()))
        } else {
            c.props
                .iter()
                .find(|p| !cfg.props.contains(p))
                .map(|p| format!("proposition `{}` is not observed by the reduction", amas.prop_name(*p)))
        };
        if let Some(reason) = reason {
            return Err(ReductionError::NonCompliant { formula: shown, reason });
        }
    }
    Ok(())
}

/// Builds both undeadlocked variants of `amas`, reduces each, and checks
/// every formula on full and reduced models: opponent-reactive semantics on
/// `IIS(S^ε)`, plain semantics on `IIS^ε(S)`. A disagreement is a bug.
pub fn verify_reduction(
    amas: &Amas,
    formulas: &[StateFormula],
    cfg: &ReductionConfig,
    stutter_bound: Option<usize>,
    exec: Execution,
) -> Result<VerificationReport, ReductionError> {
    validate_formulas(amas, formulas, cfg)?;
    let mut variants = Vec::new();
    let mut rows = Vec::new();
    for (kind, mode) in [
        (ModelKind::EpsAmas, OutcomeMode::Reactive),
        (ModelKind::Undeadlocked, OutcomeMode::Plain),
    ] {
        let full = build(amas, kind)?;
        let reduced = reduce(&full, cfg)?;
        let indep = independence(&full, &cfg.coalition, &cfg.props);
        let epsilon_kept = reduced
            .origin
            .iter()
            .enumerate()
            .all(|(k, &s)| !full.has_epsilon_loop(s) || reduced.model.has_epsilon_loop(k));
        let stutter = match stutter_bound {
            Some(b) => Some(bounded_stutter_equiv(&full, &reduced.model, &cfg.props, b)?),
            None => None,
        };
        variants.push(VariantReport {
            model: kind,
            semantics: mode,
            stats: reduced.stats(&full),
            c1: check_c1_all(&full, &reduced, &indep),
            c2: check_c2(&full, &reduced, &indep),
            c3: check_c3(&reduced),
            epsilon_kept,
            stutter,
        });
        let sem = Semantics {
            mode,
            ..Semantics::default()
        };
        let on_full = Checker::new(&full, sem).with_execution(exec);
        let on_reduced = Checker::new(&reduced.model, sem).with_execution(exec);
        for f in formulas {
            rows.push(AgreementRow {
                formula: f.display(amas).to_string(),
                model: kind,
                semantics: mode,
                full: on_full.check(full.initial(), f)?.value,
                reduced: on_reduced.check(reduced.model.initial(), f)?.value,
            });
        }
    }
    let disagreements = rows.iter().filter(|r| r.full != r.reduced).count();
    Ok(VerificationReport {
        coalition: cfg.coalition.iter().map(|&a| amas.agent(a).name().to_string()).collect(),
        props: cfg.props.iter().map(|&p| amas.prop_name(p).to_string()).collect(),
        c1_mode: cfg.c1_mode,
        variants,
        rows,
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::parse_amas;
    use crate::bundled;
    use crate::compose::{build_eps_amas_iis, build_undeadlocked_iis};
    use crate::logic::parse_formula;

    fn names(model: &Model, set: &EventSet) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|&e| model.event_name(e).to_string()).collect();
        v.sort();
        v
    }

    fn props(amas: &Amas, names: &[&str]) -> BTreeSet<PropId> {
        names.iter().map(|n| amas.prop_by_name(n).unwrap()).collect()
    }

    fn agents(amas: &Amas, names: &[&str]) -> BTreeSet<AgentId> {
        names.iter().map(|n| amas.agent_by_name(n).unwrap()).collect()
    }

    #[test]
    fn conference_invisible_events() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let m = build_undeadlocked_iis(&amas).unwrap();
        let inv = invisible_events(&m, &BTreeSet::new(), &props(&amas, &["open", "epid", "closed"]));
        assert_eq!(names(&m, &inv), ["giveup", "idle", "rest", "ε"]);
        let all = agents(&amas, &["gc", "oc", "sc"]);
        let inv = invisible_events(&m, &all, &props(&amas, &["open", "epid", "closed"]));
        assert_eq!(names(&m, &inv), ["ε"]);
        let inv = invisible_events(&m, &BTreeSet::new(), &BTreeSet::new());
        assert_eq!(inv.len(), m.num_events());
    }

    #[test]
    fn conference_independence() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let m = build_undeadlocked_iis(&amas).unwrap();
        let rel = independence(&m, &BTreeSet::new(), &props(&amas, &["open", "epid", "closed"]));
        let e = |n: &str| m.event_by_name(n).unwrap();
        assert!(rel.dependent(e("proceed"), e("onsite")));
        assert!(rel.independent(e("giveup"), e("rest")));
        for x in 0..m.num_events() {
            assert!(rel.dependent(EventId(x), EventId(x)));
        }
        assert!(rel.independent(e("ε"), e("proceed")));
    }

    #[test]
    fn c1_examples() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let m = build_undeadlocked_iis(&amas).unwrap();
        let e = |n: &str| m.event_by_name(n).unwrap();
        let rel = independence(&m, &BTreeSet::new(), &props(&amas, &["closed"]));
        let s211 = m.state_by_name("211").unwrap();
        assert!(check_c1(&m, s211, &EventSet::from([e("rest")]), &rel));
        let s000 = m.state_by_name("000").unwrap();
        assert!(!check_c1(&m, s000, &EventSet::from([e("proceed")]), &rel));
        for s in 0..m.num_states() {
            let proper: EventSet = m.enabled(s).into_iter().filter(|&x| !m.is_epsilon(x)).collect();
            assert!(check_c1(&m, s, &proper, &rel));
        }
    }

    #[test]
    fn chains_shrink() {
        let amas = parse_amas(&bundled::chains(3, 3)).unwrap();
        let full = build_undeadlocked_iis(&amas).unwrap();
        assert_eq!(full.num_states(), 64);
        for mode in [C1Mode::Exact, C1Mode::Syntactic] {
            let cfg = ReductionConfig {
                c1_mode: mode,
                ..Default::default()
            };
            let r = reduce(&full, &cfg).unwrap();
            assert!(r.model.num_states() <= 10, "{}", r.model.num_states());
            assert!(check_c3(&r));
            let indep = independence(&full, &cfg.coalition, &cfg.props);
            assert!(check_c1_all(&full, &r, &indep));
            assert!(check_c2(&full, &r, &indep));
        }
    }

    #[test]
    fn all_visible_means_identity() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let full = build_eps_amas_iis(&amas).unwrap();
        let cfg = ReductionConfig {
            coalition: agents(&amas, &["gc", "oc", "sc"]),
            ..Default::default()
        };
        let r = reduce(&full, &cfg).unwrap();
        assert_eq!(r.stats(&full).reduced_transitions, full.num_transitions());
        assert!(r.fully_expanded.iter().all(|&f| f));
    }

    #[test]
    fn iis_is_refused() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let full = crate::compose::build_iis(&amas);
        assert!(matches!(
            reduce(&full, &ReductionConfig::default()),
            Err(ReductionError::NotUndeadlocked(_))
        ));
    }

    #[test]
    fn c3_detects_partial_cycle() {
        let amas = parse_amas(
            "agent a { init: 0; state 0 { on x -> 1; } state 1 { on x -> 0; } }
             agent b { init: 0; state 0 { on y -> 0; } }",
        )
        .unwrap();
        let full = build_undeadlocked_iis(&amas).unwrap();
        let x = full.event_by_name("x").unwrap();
        let r = ReducedModel::from_ample(&full, |_| EventSet::from([x]));
        assert_eq!(r.model.num_states(), 2);
        assert!(!check_c3(&r));
        let r = ReducedModel::from_ample(&full, |s| full.enabled(s));
        assert!(check_c3(&r));
    }

    #[test]
    fn conference_verdicts_survive_reduction() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let formulas: Vec<StateFormula> = ["<<gc,oc>> G !epid", "<<gc,oc>> F closed"]
            .iter()
            .map(|f| parse_formula(f, &amas).unwrap())
            .collect();
        let cfg = ReductionConfig {
            coalition: agents(&amas, &["gc", "oc"]),
            props: props(&amas, &["epid", "closed"]),
            c1_mode: C1Mode::Exact,
        };
        let report = verify_reduction(&amas, &formulas, &cfg, Some(8), Execution::Sequential).unwrap();
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn noncompliant_formula_is_rejected() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let f = parse_formula("<<gc>> X open", &amas).unwrap();
        let cfg = ReductionConfig::for_formulas(std::slice::from_ref(&f), C1Mode::Exact);
        assert!(matches!(
            verify_reduction(&amas, &[f], &cfg, None, Execution::Sequential),
            Err(ReductionError::NonCompliant { .. })
        ));
    }
}
