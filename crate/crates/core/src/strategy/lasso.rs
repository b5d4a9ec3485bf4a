use serde::Serialize;
use thiserror::Error;

use crate::amas::EventId;
use crate::compose::{Model, StateId, TransitionGraph};
use crate::logic::{eval_word, Ltl, UpWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("a lasso needs a nonempty cycle")]
    EmptyCycle,
    #[error("cannot read lasso: {0}")]
    Syntax(String),
}

/// An ultimately periodic path: the stem is walked once, then the cycle
/// forever. Each step is a state and the event leaving it; the step after the
/// stem (and after the cycle's last step) is the cycle's first step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub stem: Vec<(StateId, EventId)>,
    pub cycle: Vec<(StateId, EventId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepDoc {
    pub state: String,
    pub event: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LassoDoc {
    pub stem: Vec<StepDoc>,
    pub cycle: Vec<StepDoc>,
}

impl Lasso {
    pub fn new(stem: Vec<(StateId, EventId)>, cycle: Vec<(StateId, EventId)>) -> Result<Self, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        Ok(Lasso { stem, cycle })
    }

    /// Reads `"s0 e0 s1 e1 (s2 e2 s3 e3)"`, state and event names alternating,
    /// the cycle in parentheses.
    pub fn parse(model: &Model, text: &str) -> Result<Self, LassoError> {
        let (stem_text, rest) = text
            .split_once('(')
            .ok_or_else(|| LassoError::Syntax("missing `(` before the cycle".into()))?;
        let cycle_text = rest
            .strip_suffix(')')
            .or_else(|| rest.trim_end().strip_suffix(')'))
            .ok_or_else(|| LassoError::Syntax("missing closing `)`".into()))?;
        let steps = |t: &str| -> Result<Vec<(StateId, EventId)>, LassoError> {
            let words: Vec<&str> = t.split_whitespace().collect();
            if words.len() % 2 != 0 {
                return Err(LassoError::Syntax(format!("`{t}` is not a list of state/event pairs")));
            }
            words
                .chunks(2)
                .map(|pair| {
                    let s = model
                        .state_by_name(pair[0])
                        .map_err(|e| LassoError::Syntax(e.to_string()))?;
                    let e = model
                        .event_by_name(pair[1])
                        .ok_or_else(|| LassoError::Syntax(format!("unknown event `{}`", pair[1])))?;
                    Ok((s, e))
                })
                .collect()
        };
        Lasso::new(steps(stem_text)?, steps(cycle_text)?)
    }

    pub fn render(&self, model: &Model) -> String {
        let part = |steps: &[(StateId, EventId)]| -> String {
            steps
                .iter()
                .map(|&(s, e)| format!("{} {}", model.state_name(s), model.event_name(e)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.stem.is_empty() {
            format!("({})", part(&self.cycle))
        } else {
            format!("{} ({})", part(&self.stem), part(&self.cycle))
        }
    }

    pub fn doc(&self, model: &Model) -> LassoDoc {
        let steps = |v: &[(StateId, EventId)]| {
            v.iter()
                .map(|&(s, e)| StepDoc {
                    state: model.state_name(s),
                    event: model.event_name(e).to_string(),
                })
                .collect()
        };
        LassoDoc {
            stem: steps(&self.stem),
            cycle: steps(&self.cycle),
        }
    }

    /// The same infinite path with the shortest stem and cycle: stem steps
    /// that repeat the cycle's last step are folded in, and a cycle made of
    /// repeated copies of a shorter one is cut down to it.
    pub fn normalized(mut self) -> Self {
        let n = self.cycle.len();
        if let Some(p) = (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| self.cycle[i] == self.cycle[i - p])) {
            self.cycle.truncate(p);
        }
        while self.stem.last().is_some_and(|s| s == self.cycle.last().unwrap()) {
            self.stem.pop();
            self.cycle.rotate_right(1);
        }
        self
    }

    pub fn start(&self) -> StateId {
        self.stem.first().unwrap_or(&self.cycle[0]).0
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// All steps, stem first; position `stem.len()` is where the cycle starts.
    pub fn steps(&self) -> impl Iterator<Item = (StateId, EventId)> + '_ {
        self.stem.iter().chain(self.cycle.iter()).copied()
    }

    /// Whether every step is an edge of `graph`.
    pub fn is_path_of<G: TransitionGraph + ?Sized>(&self, graph: &G) -> bool {
        if self.cycle.is_empty() {
            return false;
        }
        let steps: Vec<_> = self.steps().collect();
        let loop_head = self.cycle[0].0;
        steps.iter().enumerate().all(|(i, &(s, e))| {
            let next = steps.get(i + 1).map(|&(t, _)| t).unwrap_or(loop_head);
            graph.successors(s).contains(&(e, next))
        })
    }

    /// The word of letters read along the path.
    pub fn word(&self, letter: impl Fn(StateId) -> u64) -> UpWord {
        UpWord {
            letters: self.steps().map(|(s, _)| letter(s)).collect(),
            loop_start: self.stem.len(),
        }
    }
}

/// Truth of `gamma` on the path of `lasso`, reading `letter(s)` at each state.
pub fn eval_path(lasso: &Lasso, gamma: &Ltl, letter: impl Fn(StateId) -> u64) -> Result<bool, LassoError> {
    if lasso.cycle.is_empty() {
        return Err(LassoError::EmptyCycle);
    }
    Ok(eval_word(gamma, &lasso.word(letter)))
}

/// Lassos from `start` whose states are pairwise distinct apart from the
/// closing edge, with at most `max_len` steps.
pub fn simple_lassos<G: TransitionGraph + ?Sized>(graph: &G, start: StateId, max_len: usize) -> Vec<Lasso> {
    fn go<G: TransitionGraph + ?Sized>(
        graph: &G,
        s: StateId,
        path: &mut Vec<(StateId, EventId)>,
        on_path: &mut Vec<Option<usize>>,
        max_len: usize,
        out: &mut Vec<Lasso>,
    ) {
        if path.len() >= max_len {
            return;
        }
        on_path[s] = Some(path.len());
        for &(e, t) in graph.successors(s) {
            path.push((s, e));
            if let Some(j) = on_path[t] {
                out.push(Lasso {
                    stem: path[..j].to_vec(),
                    cycle: path[j..].to_vec(),
                });
            } else {
                go(graph, t, path, on_path, max_len, out);
            }
            path.pop();
        }
        on_path[s] = None;
    }
    let mut out = Vec::new();
    let mut on_path = vec![None; graph.num_states()];
    go(graph, start, &mut Vec::new(), &mut on_path, max_len, &mut out);
    out
}

/// Every lasso from `start` with at most `max_len` steps whose cycle may
/// revisit states (closed walks). Calls `visit` on each; stops early when it
/// returns true, and reports whether it did.
pub fn walk_lassos<G: TransitionGraph + ?Sized>(
    graph: &G,
    start: StateId,
    max_len: usize,
    mut visit: impl FnMut(&Lasso) -> bool,
) -> bool {
    fn go<G: TransitionGraph + ?Sized>(
        graph: &G,
        s: StateId,
        path: &mut Vec<(StateId, EventId)>,
        max_len: usize,
        visit: &mut dyn FnMut(&Lasso) -> bool,
    ) -> bool {
        if path.len() >= max_len {
            return false;
        }
        for &(e, t) in graph.successors(s) {
            path.push((s, e));
            for j in 0..path.len() {
                if path[j].0 == t {
                    let lasso = Lasso {
                        stem: path[..j].to_vec(),
                        cycle: path[j..].to_vec(),
                    };
                    if visit(&lasso) {
                        return true;
                    }
                }
            }
            if go(graph, t, path, max_len, visit) {
                return true;
            }
            path.pop();
        }
        false
    }
    go(graph, start, &mut Vec::new(), max_len, &mut visit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_keeps_the_path() {
        let (a, b, c) = ((0, EventId(0)), (1, EventId(1)), (2, EventId(2)));
        let l = Lasso::new(vec![a, b, c], vec![b, c, b, c]).unwrap().normalized();
        assert_eq!(l, Lasso::new(vec![a], vec![b, c]).unwrap());
        let l = Lasso::new(vec![c, a], vec![b, a]).unwrap().normalized();
        assert_eq!(l, Lasso::new(vec![c], vec![a, b]).unwrap());
    }
    use crate::amas::parse_amas;
    use crate::bundled;
    use crate::compose::{build_iis, build_undeadlocked_iis};

    fn open_letter(model: &Model) -> impl Fn(StateId) -> u64 + '_ {
        let open = model.amas().prop_by_name("open").unwrap();
        move |s| model.labels(s).contains(&open) as u64
    }

    fn g_not_open() -> Ltl {
        Ltl::globally(Ltl::not(Ltl::Atom(0)))
    }

    #[test]
    fn giveup_loop_never_opens() {
        let m = build_iis(&parse_amas(bundled::CONFERENCE).unwrap());
        let l = Lasso::parse(&m, "000 giveup (002 giveup)").unwrap();
        assert!(l.is_path_of(&m));
        assert!(eval_path(&l, &g_not_open(), open_letter(&m)).unwrap());
    }

    #[test]
    fn epsilon_loop_at_101_opens() {
        let m = build_undeadlocked_iis(&parse_amas(bundled::CONFERENCE).unwrap()).unwrap();
        let l = Lasso::parse(&m, "000 proceed (101 ε)").unwrap();
        assert!(l.is_path_of(&m));
        assert!(!eval_path(&l, &g_not_open(), open_letter(&m)).unwrap());
    }

    #[test]
    fn eventually_true_holds_everywhere() {
        let m = build_iis(&parse_amas(bundled::CONFERENCE).unwrap());
        for l in simple_lassos(&m, 0, 8) {
            assert!(eval_path(&l, &Ltl::eventually(Ltl::True), |_| 0).unwrap());
        }
    }

    #[test]
    fn empty_cycle_is_malformed() {
        let l = Lasso {
            stem: vec![(0, EventId(0))],
            cycle: vec![],
        };
        assert_eq!(eval_path(&l, &Ltl::True, |_| 0), Err(LassoError::EmptyCycle));
    }

    #[test]
    fn render_parse_round_trip() {
        let m = build_iis(&parse_amas(bundled::CONFERENCE).unwrap());
        for l in simple_lassos(&m, 0, 8) {
            assert_eq!(Lasso::parse(&m, &l.render(&m)).unwrap(), l);
        }
    }

    #[test]
    fn walks_include_simple_lassos() {
        let m = build_iis(&parse_amas(bundled::CONFERENCE).unwrap());
        let simple = simple_lassos(&m, 0, 6);
        let mut walks = Vec::new();
        walk_lassos(&m, 0, 6, |l| {
            walks.push(l.clone());
            false
        });
        for l in &simple {
            assert!(walks.contains(l));
        }
        assert!(walks.iter().all(|l| l.is_path_of(&m)));
    }
}
