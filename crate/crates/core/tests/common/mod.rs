//! Seeded random instances and property checks shared by the acceptance
//! suite and the property tests. Each check returns how many cases it
//! examined, or a description of the first violation.

#![allow(dead_code)]

use std::collections::BTreeSet;

use amas_core::compose::{build, Model, ModelKind, StateId, TransitionGraph};
use amas_core::gen::{generate_random_amas, GenParams};
use amas_core::logic::{eval_word, ltl_to_gba, Ltl, UpWord};
use amas_core::mc::product_emptiness;
use amas_core::por::{verify_reduction, C1Mode, ReductionConfig};
use amas_core::strategy::{
    eval_path, fairness_conditions, restrict, simple_lassos, walk_lassos, FairnessKind, FairnessPredicate, Lasso,
};
use amas_core::{AgentId, Amas, Choice, Execution, JointStrategy, OutcomeMode, PathFormula, PropId, StateFormula,
    StrategySpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<usize, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random system with up to `max_agents` agents and `max_states` local
/// states each.
pub fn random_amas(seed: u64, max_agents: usize, max_states: usize) -> Amas {
    let mut r = rng(seed ^ 0x5eed);
    let agents = r.gen_range(1..=max_agents);
    let states = r.gen_range(1..=max_states);
    let sync_degree = r.gen_range(1..=agents);
    let min_events = agents.div_ceil(sync_degree);
    let events = r.gen_range(min_events..=min_events + 3);
    generate_random_amas(
        seed,
        GenParams {
            agents,
            states,
            events,
            sync_degree,
        },
    )
    .expect("parameters are feasible by construction")
}

/// Nonempty coalitions of at most `max` ordinary agents, plus the empty one.
pub fn coalitions(amas: &Amas, max: usize) -> Vec<Vec<AgentId>> {
    let ids: Vec<AgentId> = amas.agents().iter().filter(|a| !a.is_auxiliary()).map(|a| a.id()).collect();
    let mut out = vec![Vec::new()];
    for (i, &a) in ids.iter().enumerate() {
        out.push(vec![a]);
        if max >= 2 {
            for &b in &ids[i + 1..] {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// All strategies of the coalition, or `cap` evenly spread ones.
pub fn strategies(amas: &Amas, coalition: &[AgentId], cap: u64) -> Vec<JointStrategy> {
    let space = StrategySpace::new(amas, coalition).expect("small strategy space");
    let n = space.len();
    let step = n.div_ceil(cap).max(1);
    (0..n).step_by(step as usize).map(|i| space.get(i).unwrap()).collect()
}

type NamedSteps = Vec<(String, String)>;

pub fn named(model: &Model, lasso: &Lasso) -> (NamedSteps, NamedSteps) {
    let f = |v: &[(StateId, amas_core::EventId)]| {
        v.iter()
            .map(|&(s, e)| (model.state_name(s), model.event_name(e).to_string()))
            .collect()
    };
    (f(&lasso.stem), f(&lasso.cycle))
}

pub fn fair(preds: &[FairnessPredicate], model: &Model, lasso: &Lasso) -> bool {
    preds.iter().all(|p| lasso.cycle.iter().any(|&(s, e)| p.holds(model, s, e)))
}

/// `enabled_for` is never empty in the undeadlocked model, whatever subset
/// of agents fixes a choice.
pub fn prop_nonempty_enabled(amas: &Amas) -> Check {
    let m = build(amas, ModelKind::Undeadlocked).map_err(|e| e.to_string())?;
    let mut cases = 0;
    for s in 0..m.num_states() {
        let g = m.state(s);
        let options: Vec<Vec<Option<&Choice>>> = amas
            .agents()
            .iter()
            .map(|a| {
                let mut v: Vec<Option<&Choice>> = vec![None];
                v.extend(a.repertoire(g.local(a.id())).iter().map(Some));
                v
            })
            .collect();
        let mut idx = vec![0usize; options.len()];
        loop {
            let sel: Vec<Option<&Choice>> = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            cases += 1;
            if m.enabled_for_selection(s, &sel).is_empty() {
                return Err(format!("empty enabled set at {} for {:?}", m.state_name(s), idx));
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Ok(cases)
}

/// In reactive outcomes of both undeadlocked models, ε occurs only as an
/// infinite suffix of ε-steps.
pub fn prop_epsilon_suffix(amas: &Amas, max_lasso: usize) -> Check {
    let mut cases = 0;
    for kind in [ModelKind::Undeadlocked, ModelKind::EpsAmas] {
        let m = build(amas, kind).map_err(|e| e.to_string())?;
        for c in coalitions(amas, 2) {
            for sigma in strategies(amas, &c, 64) {
                let g = restrict(&m, &sigma, OutcomeMode::Reactive).map_err(|e| e.to_string())?;
                for lasso in simple_lassos(&g, m.initial(), max_lasso) {
                    cases += 1;
                    let steps: Vec<_> = lasso.steps().collect();
                    if let Some(i) = steps.iter().position(|&(_, e)| m.is_epsilon(e)) {
                        let suffix_ok = steps[i..].iter().all(|&(s, e)| m.is_epsilon(e) && s == steps[i].0)
                            && lasso.stem.len() <= i;
                        if !suffix_ok {
                            return Err(format!("{kind}: ε not a pure suffix in {}", lasso.render(&m)));
                        }
                    }
                }
            }
        }
    }
    Ok(cases)
}

type NamedEdge = (String, String, String);

fn outcome_edges<G: TransitionGraph>(m: &Model, g: &G) -> BTreeSet<NamedEdge> {
    (0..g.num_states())
        .flat_map(|s| {
            g.successors(s)
                .iter()
                .map(move |&(e, t)| (m.state_name(s), m.event_name(e).to_string(), m.state_name(t)))
        })
        .collect()
}

/// Reactive outcome graphs of `IIS^ε(S)` and `IIS(S^ε)` coincide for every
/// strategy of every coalition of at most two agents.
pub fn thm_reactive_isomorphism(amas: &Amas, cap: u64) -> Check {
    let m1 = build(amas, ModelKind::Undeadlocked).map_err(|e| e.to_string())?;
    let m2 = build(amas, ModelKind::EpsAmas).map_err(|e| e.to_string())?;
    if m1.num_states() != m2.num_states() {
        return Err(format!("state counts differ: {} vs {}", m1.num_states(), m2.num_states()));
    }
    let mut cases = 0;
    for c in coalitions(amas, 2) {
        for sigma in strategies(amas, &c, cap) {
            cases += 1;
            let g1 = restrict(&m1, &sigma, OutcomeMode::Reactive).map_err(|e| e.to_string())?;
            let g2 = restrict(&m2, &sigma, OutcomeMode::Reactive).map_err(|e| e.to_string())?;
            let (a, b) = (outcome_edges(&m1, &g1), outcome_edges(&m2, &g2));
            if a != b {
                let diff: Vec<_> = a.symmetric_difference(&b).take(3).collect();
                return Err(format!("outcome graphs differ for {:?}: {diff:?}", sigma.rows(amas)));
            }
        }
    }
    Ok(cases)
}

/// Reactive and CF-fair lassos of the undeadlocked model equal the CF-fair
/// lassos of the original model, when the original model has no deadlock.
/// Returns `Ok(None)` for models with deadlocks, where the claim does not
/// apply.
pub fn prop_reactive_cf_collapse(amas: &Amas, max_lasso: usize) -> Result<Option<usize>, String> {
    let orig = build(amas, ModelKind::Iis).map_err(|e| e.to_string())?;
    if !orig.check_serial().is_empty() {
        return Ok(None);
    }
    let und = build(amas, ModelKind::Undeadlocked).map_err(|e| e.to_string())?;
    let mut cases = 0;
    for c in coalitions(amas, 2) {
        for sigma in strategies(amas, &c, 64) {
            cases += 1;
            let collect = |m: &Model, mode| -> Result<BTreeSet<(NamedSteps, NamedSteps)>, String> {
                let g = restrict(m, &sigma, mode).map_err(|e| e.to_string())?;
                let preds = fairness_conditions(&g, FairnessKind::Cf, false);
                Ok(simple_lassos(&g, m.initial(), max_lasso)
                    .into_iter()
                    .filter(|l| fair(&preds, m, l))
                    .map(|l| named(m, &l))
                    .collect())
            };
            let a = collect(&und, OutcomeMode::Reactive)?;
            let b = collect(&orig, OutcomeMode::Plain)?;
            if a != b {
                let diff: Vec<_> = a.symmetric_difference(&b).take(2).collect();
                return Err(format!("lasso sets differ for {:?}: {diff:?}", sigma.rows(amas)));
            }
        }
    }
    Ok(Some(cases))
}

/// A random LTL formula over atoms `0..atoms`.
pub fn random_ltl<R: Rng>(r: &mut R, atoms: usize, depth: usize, allow_next: bool) -> Ltl {
    if depth == 0 || r.gen_bool(0.25) {
        return if r.gen_bool(0.1) {
            Ltl::True
        } else {
            Ltl::Atom(r.gen_range(0..atoms))
        };
    }
    let sub = |r: &mut R| random_ltl(r, atoms, depth - 1, allow_next);
    match r.gen_range(0..if allow_next { 8 } else { 7 }) {
        0 => Ltl::not(sub(r)),
        1 => Ltl::and(sub(r), sub(r)),
        2 => Ltl::or(sub(r), sub(r)),
        3 => Ltl::until(sub(r), sub(r)),
        4 => Ltl::release(sub(r), sub(r)),
        5 => Ltl::eventually(sub(r)),
        6 => Ltl::globally(sub(r)),
        _ => Ltl::next(sub(r)),
    }
}

pub fn random_word(r: &mut impl Rng, atoms: usize) -> UpWord {
    let len = r.gen_range(1..=6);
    UpWord {
        letters: (0..len).map(|_| r.gen_range(0..1u64 << atoms)).collect(),
        loop_start: r.gen_range(0..len),
    }
}

/// The GBA of a random formula accepts a random word iff the formula holds
/// on it, both directly and along a random lasso of a random model.
pub fn gba_agrees_with_eval(seed: u64) -> Check {
    let mut r = rng(seed);
    let f = random_ltl(&mut r, 3, 4, true);
    let gba = ltl_to_gba(&f).map_err(|e| e.to_string())?;
    let word = random_word(&mut r, 3);
    if gba.accepts(&word) != eval_word(&f, &word) {
        return Err(format!("{f} on {word:?}"));
    }
    let amas = random_amas(seed, 3, 3);
    let m = build(&amas, ModelKind::Undeadlocked).map_err(|e| e.to_string())?;
    let lasso = random_walk_lasso(&m, &mut r);
    let letter = |s: StateId| label_bits(&m, s);
    let direct = eval_path(&lasso, &f, letter).map_err(|e| e.to_string())?;
    if gba.accepts(&lasso.word(letter)) != direct {
        return Err(format!("{f} on lasso {}", lasso.render(&m)));
    }
    Ok(2)
}

pub fn label_bits(m: &Model, s: StateId) -> u64 {
    m.labels(s).iter().filter(|p| p.0 < 64).fold(0, |acc, p| acc | 1 << p.0)
}

/// Random walk from the initial state until a state repeats.
pub fn random_walk_lasso(m: &Model, r: &mut impl Rng) -> Lasso {
    let mut path: Vec<(StateId, amas_core::EventId)> = Vec::new();
    let mut s = m.initial();
    loop {
        if let Some(i) = path.iter().position(|&(x, _)| x == s) {
            return Lasso::new(path[..i].to_vec(), path[i..].to_vec()).unwrap();
        }
        let &(e, t) = m.successors(s).choose(r).expect("undeadlocked models are serial");
        path.push((s, e));
        s = t;
    }
}

/// `product_emptiness` on a random strategy outcome of a model with at most
/// eight states agrees with brute-force search over lassos whose cycles may
/// revisit states, up to `bound` steps. A returned lasso must itself be a
/// fair, satisfying path of the outcome.
pub fn emptiness_agrees_with_enumeration(seed: u64, bound: usize) -> Result<Option<usize>, String> {
    let mut r = rng(seed);
    let amas = random_amas(seed, 3, 3);
    let kind = *[ModelKind::Iis, ModelKind::Undeadlocked, ModelKind::EpsAmas].choose(&mut r).unwrap();
    let m = build(&amas, kind).map_err(|e| e.to_string())?;
    if m.num_states() > 8 {
        return Ok(None);
    }
    let cs = coalitions(&amas, 2);
    let c = cs.choose(&mut r).unwrap();
    let ss = strategies(&amas, c, 1 << 20);
    let sigma = ss.choose(&mut r).unwrap();
    let mode = if r.gen_bool(0.5) { OutcomeMode::Plain } else { OutcomeMode::Reactive };
    let g = restrict(&m, sigma, mode).map_err(|e| e.to_string())?;
    let fk = *[FairnessKind::None, FairnessKind::Cf, FairnessKind::Scf].choose(&mut r).unwrap();
    let preds = fairness_conditions(&g, fk, false);
    let atoms = amas.props().len().clamp(1, 3);
    let f = random_ltl(&mut r, atoms, 3, true);
    let gba = ltl_to_gba(&f).map_err(|e| e.to_string())?;
    let letter = |s: StateId| label_bits(&m, s);
    let found = product_emptiness(&m, &g, m.initial(), &gba, &letter, &preds);
    let brute = walk_lassos(&g, m.initial(), bound, |l| {
        fair(&preds, &m, l) && eval_path(l, &f, letter).unwrap()
    });
    match (&found, brute) {
        (Some(l), _) => {
            if !l.is_path_of(&g) || l.start() != m.initial() {
                return Err(format!("{f}: lasso {} is not an outcome path", l.render(&m)));
            }
            if !fair(&preds, &m, l) || !eval_path(l, &f, letter).unwrap() {
                return Err(format!("{f}: lasso {} is not an accepting path", l.render(&m)));
            }
        }
        (None, true) => return Err(format!("{f} ({fk}, {mode}): enumeration found a lasso, product did not")),
        (None, false) => {}
    }
    Ok(Some(1))
}

/// A random strategic formula without nesting or next, over coalitions
/// within `agents` and propositions within `props`.
pub fn random_satl<R: Rng>(r: &mut R, agents: &[AgentId], props: &[PropId]) -> StateFormula {
    fn path<R: Rng>(r: &mut R, props: &[PropId], depth: usize) -> PathFormula {
        if depth == 0 || r.gen_bool(0.3) {
            return PathFormula::state(match props.choose(r) {
                Some(&p) if r.gen_bool(0.9) => StateFormula::Prop(p),
                _ => StateFormula::True,
            });
        }
        let sub = |r: &mut R| path(r, props, depth - 1);
        match r.gen_range(0..6) {
            0 => PathFormula::not(sub(r)),
            1 => PathFormula::and(sub(r), sub(r)),
            2 => PathFormula::until(sub(r), sub(r)),
            3 => PathFormula::release(sub(r), sub(r)),
            4 => PathFormula::eventually(sub(r)),
            _ => PathFormula::globally(sub(r)),
        }
    }
    let coalition: Vec<AgentId> = agents.iter().copied().filter(|_| r.gen_bool(0.6)).collect();
    let modality = StateFormula::coalition(coalition, path(r, props, 3));
    match r.gen_range(0..4) {
        0 => StateFormula::not(modality),
        1 => match props.choose(r) {
            Some(&p) => StateFormula::and(StateFormula::Prop(p), modality),
            None => modality,
        },
        _ => modality,
    }
}

/// Full and reduced verdicts agree on a random compliant formula, and the
/// reduction passes the C1, C2 and C3 checkers.
pub fn por_agrees(seed: u64, max_agents: usize, max_states: usize) -> Check {
    let mut r = rng(seed);
    let amas = random_amas(seed, max_agents, max_states);
    let agents: Vec<AgentId> = amas.agents().iter().map(|a| a.id()).filter(|_| r.gen_bool(0.5)).collect();
    let props: Vec<PropId> = (0..amas.props().len()).map(PropId).filter(|_| r.gen_bool(0.5)).collect();
    let formulas: Vec<StateFormula> = (0..2).map(|_| random_satl(&mut r, &agents, &props)).collect();
    let cfg = ReductionConfig {
        coalition: agents.iter().copied().collect(),
        props: props.iter().copied().collect(),
        c1_mode: C1Mode::Exact,
    };
    let report =
        verify_reduction(&amas, &formulas, &cfg, None, Execution::Sequential).map_err(|e| e.to_string())?;
    if !report.ok() {
        return Err(format!(
            "seed {seed}: {:?} {:?}",
            report.variants,
            report.rows.iter().filter(|x| x.full != x.reduced).collect::<Vec<_>>()
        ));
    }
    Ok(report.rows.len())
}
