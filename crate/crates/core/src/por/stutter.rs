//! Bounded check that every lasso of a model has a stuttering-equivalent
//! path in a reduced model.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::amas::PropId;
use crate::compose::{Model, StateId, TransitionGraph};
use crate::mc::emptiness::{find_accepting_lasso, MarkedGraph, Marks};
use crate::strategy::simple_lassos;

use super::ReductionError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum StutterVerdict {
    /// Every simple lasso of length up to `bound` has a match; `checked`
    /// counts distinct observed words.
    Equivalent { bound: usize, checked: usize },
    /// A lasso of the full model with no stuttering-equivalent counterpart.
    Counterexample { lasso: String },
}

/// For each simple lasso of `full` with at most `bound` steps, searches
/// `reduced` for a path whose observed word (valuations restricted to
/// `props`) is stuttering-equivalent to it.
///
/// The search runs over pairs (reduced state, lasso position). Reading a
/// state with the current block's valuation stays put; reading the next
/// block's valuation advances. Advancing is accepting, and so is staying in
/// a final block that never changes, so an accepting run follows the whole
/// lasso word up to stuttering.
pub fn bounded_stutter_equiv(
    full: &Model,
    reduced: &Model,
    props: &BTreeSet<PropId>,
    bound: usize,
) -> Result<StutterVerdict, ReductionError> {
    bounded_stutter_equiv_graphs(full, full, reduced, reduced, props, bound)
}

/// [`bounded_stutter_equiv`] between sub-graphs of two models, such as the
/// outcome graphs of one strategy in a model and in its reduction. Both
/// searches start at the models' initial states.
pub fn bounded_stutter_equiv_graphs<G: TransitionGraph + ?Sized, H: TransitionGraph + ?Sized>(
    full: &Model,
    full_graph: &G,
    reduced: &Model,
    reduced_graph: &H,
    props: &BTreeSet<PropId>,
    bound: usize,
) -> Result<StutterVerdict, ReductionError> {
    if bound == 0 {
        return Err(ReductionError::BoundTooSmall);
    }
    let observe = |m: &Model, s: StateId| -> BTreeSet<PropId> { m.labels(s).intersection(props).copied().collect() };
    let reduced_labels: Vec<BTreeSet<PropId>> = (0..reduced.num_states()).map(|r| observe(reduced, r)).collect();
    let mut seen: HashSet<(Vec<BTreeSet<PropId>>, usize)> = HashSet::new();
    for lasso in simple_lassos(full_graph, full.initial(), bound) {
        let word: Vec<BTreeSet<PropId>> = lasso.steps().map(|(s, _)| observe(full, s)).collect();
        let key = (word, lasso.stem.len());
        if seen.contains(&key) {
            continue;
        }
        if !matches_word(reduced_graph, reduced.initial(), &reduced_labels, &key.0, key.1) {
            return Ok(StutterVerdict::Counterexample {
                lasso: lasso.render(full),
            });
        }
        seen.insert(key);
    }
    Ok(StutterVerdict::Equivalent {
        bound,
        checked: seen.len(),
    })
}

/// Whether `reduced` has a path from its initial state whose observed word
/// is stuttering-equivalent to `word` looping back to `loop_start`.
fn matches_word<H: TransitionGraph + ?Sized>(
    reduced: &H,
    init: StateId,
    labels: &[BTreeSet<PropId>],
    word: &[BTreeSet<PropId>],
    loop_start: usize,
) -> bool {
    let len = word.len();
    let next = |p: usize| if p + 1 == len { loop_start } else { p + 1 };
    // First later position with a different valuation, if any.
    let adv: Vec<Option<usize>> = (0..len)
        .map(|p| {
            let mut q = next(p);
            for _ in 0..len {
                if word[q] != word[p] {
                    return Some(q);
                }
                q = next(q);
            }
            None
        })
        .collect();
    if labels[init] != word[0] {
        return false;
    }
    let node = |r: StateId, p: usize| r * len + p;
    let mut graph = MarkedGraph {
        succ: vec![Vec::new(); reduced.num_states() * len],
        num_marks: 1,
    };
    for r in 0..reduced.num_states() {
        for p in 0..len {
            if labels[r] != word[p] {
                continue;
            }
            for &(_, t) in reduced.successors(r) {
                if labels[t] == word[p] {
                    let mark = if adv[p].is_none() { Marks::from_bits(1) } else { Marks::default() };
                    graph.succ[node(r, p)].push((node(t, p), mark));
                } else if let Some(q) = adv[p].filter(|&q| labels[t] == word[q]) {
                    graph.succ[node(r, p)].push((node(t, q), Marks::from_bits(1)));
                }
            }
        }
    }
    find_accepting_lasso(&graph, node(init, 0)).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::parse_amas;
    use crate::bundled;
    use crate::compose::build_undeadlocked_iis;
    use crate::por::{reduce, ReducedModel, ReductionConfig};

    #[test]
    fn reduction_of_chains_is_equivalent() {
        let amas = parse_amas(&bundled::chains(2, 3)).unwrap();
        let full = build_undeadlocked_iis(&amas).unwrap();
        let r = reduce(&full, &ReductionConfig::default()).unwrap();
        let v = bounded_stutter_equiv(&full, &r.model, &BTreeSet::new(), 10).unwrap();
        assert!(matches!(v, StutterVerdict::Equivalent { .. }), "{v:?}");
    }

    #[test]
    fn dropped_visible_branch_is_caught() {
        let amas = parse_amas(
            "agent a { init: 0; state 0 { on x -> 1; on y -> 2; } state 1 { on z -> 1; } state 2 { props: [p]; on z -> 2; } }",
        )
        .unwrap();
        let full = build_undeadlocked_iis(&amas).unwrap();
        let y = full.event_by_name("y").unwrap();
        let cut = ReducedModel::from_ample(&full, |s| {
            let mut e = full.enabled(s);
            e.remove(&y);
            e
        });
        let p: BTreeSet<PropId> = [amas.prop_by_name("p").unwrap()].into();
        let v = bounded_stutter_equiv(&full, &cut.model, &p, 6).unwrap();
        assert!(matches!(v, StutterVerdict::Counterexample { .. }), "{v:?}");
        // Without observing p the two branches look alike.
        let v = bounded_stutter_equiv(&full, &cut.model, &BTreeSet::new(), 6).unwrap();
        assert!(matches!(v, StutterVerdict::Equivalent { .. }), "{v:?}");
        let same = ReducedModel::from_ample(&full, |s| full.enabled(s));
        let v = bounded_stutter_equiv(&full, &same.model, &p, 6).unwrap();
        assert!(matches!(v, StutterVerdict::Equivalent { .. }));
    }

    #[test]
    fn stuttering_forever_needs_a_stuttering_path() {
        // Full model can stay in p forever or leave it; keeping only the
        // leaving branch must be reported.
        let amas = parse_amas(
            "agent a { init: 0; state 0 { props: [p]; on w -> 0; on x -> 1; } state 1 { on z -> 1; } }",
        )
        .unwrap();
        let full = build_undeadlocked_iis(&amas).unwrap();
        let w = full.event_by_name("w").unwrap();
        let cut = ReducedModel::from_ample(&full, |s| {
            let mut e = full.enabled(s);
            e.remove(&w);
            e
        });
        let p: BTreeSet<PropId> = [amas.prop_by_name("p").unwrap()].into();
        let v = bounded_stutter_equiv(&full, &cut.model, &p, 4).unwrap();
        assert!(matches!(v, StutterVerdict::Counterexample { .. }), "{v:?}");
    }

    #[test]
    fn zero_bound_is_an_error() {
        let amas = parse_amas(bundled::VOTING).unwrap();
        let full = build_undeadlocked_iis(&amas).unwrap();
        assert!(bounded_stutter_equiv(&full, &full, &BTreeSet::new(), 0).is_err());
    }
}
