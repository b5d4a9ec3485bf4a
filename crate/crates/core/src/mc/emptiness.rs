//! Generalized Büchi emptiness on explicit edge-marked graphs, and the
//! product of a model graph with an LTL automaton.

use std::collections::VecDeque;

use crate::amas::EventId;
use crate::compose::{Model, StateId, TransitionGraph};
use crate::logic::Gba;
use crate::strategy::{FairnessPredicate, Lasso};

/// A set of acceptance marks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Marks(Vec<u64>);

impl Marks {
    pub fn from_bits(bits: u64) -> Self {
        Marks(vec![bits])
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn union_with(&mut self, other: &Marks) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    /// Whether marks `0..n` are all present.
    pub fn covers(&self, n: usize) -> bool {
        (0..n).all(|i| self.contains(i))
    }
}

/// An explicit graph whose edges carry acceptance marks `0..num_marks`.
#[derive(Clone, Debug, Default)]
pub struct MarkedGraph {
    pub succ: Vec<Vec<(usize, Marks)>>,
    pub num_marks: usize,
}

/// A lasso in a marked graph, as `(node, edge index)` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLasso {
    pub stem: Vec<(usize, usize)>,
    pub cycle: Vec<(usize, usize)>,
}

/// Tarjan's algorithm over the part reachable from `init`. Components come
/// out in reverse topological order.
fn sccs(graph: &MarkedGraph, init: usize) -> Vec<Vec<usize>> {
    let n = graph.succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    let mut call: Vec<(usize, usize)> = vec![(init, 0)];
    index[init] = counter;
    low[init] = counter;
    counter += 1;
    stack.push(init);
    on_stack[init] = true;
    while let Some(&mut (v, ref mut next)) = call.last_mut() {
        if *next < graph.succ[v].len() {
            let w = graph.succ[v][*next].0;
            *next += 1;
            if index[w] == usize::MAX {
                index[w] = counter;
                low[w] = counter;
                counter += 1;
                stack.push(w);
                on_stack[w] = true;
                call.push((w, 0));
            } else if on_stack[w] {
                low[v] = low[v].min(index[w]);
            }
        } else {
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

/// Shortest edge path from `from` to any node satisfying `goal`, moving only
/// through nodes accepted by `allowed`. An empty path means `from` is a goal.
fn bfs(
    graph: &MarkedGraph,
    from: usize,
    allowed: impl Fn(usize) -> bool,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<(usize, usize)>> {
    if goal(from) {
        return Some(Vec::new());
    }
    let mut parent: std::collections::HashMap<usize, (usize, usize)> = Default::default();
    let mut queue = VecDeque::from([from]);
    parent.insert(from, (usize::MAX, 0));
    while let Some(v) = queue.pop_front() {
        for (k, (w, _)) in graph.succ[v].iter().enumerate() {
            if !allowed(*w) || parent.contains_key(w) {
                continue;
            }
            parent.insert(*w, (v, k));
            if goal(*w) {
                let mut path = Vec::new();
                let mut cur = *w;
                while cur != from {
                    let (p, k) = parent[&cur];
                    path.push((p, k));
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(*w);
        }
    }
    None
}

/// A lasso from `init` whose cycle carries every mark, if one exists.
///
/// Nonempty iff some reachable nontrivial SCC has, for every mark, an
/// internal edge carrying it. The cycle visits such an edge for each mark
/// in turn and then returns to its entry node.
pub fn find_accepting_lasso(graph: &MarkedGraph, init: usize) -> Option<EdgeLasso> {
    let comps = sccs(graph, init);
    let mut member = vec![usize::MAX; graph.succ.len()];
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            member[v] = c;
        }
    }
    // Prefer components closest to the initial node (Tarjan emits them last).
    for c in (0..comps.len()).rev() {
        let comp = &comps[c];
        let mut marks = Marks::default();
        let mut internal = false;
        for &v in comp {
            for (w, m) in &graph.succ[v] {
                if member[*w] == c {
                    internal = true;
                    marks.union_with(m);
                }
            }
        }
        if !internal || !marks.covers(graph.num_marks) {
            continue;
        }
        let inside = |v: usize| member[v] == c;
        let stem = bfs(graph, init, |_| true, inside).expect("component is reachable");
        let entry = stem.last().map(|&(v, k)| graph.succ[v][k].0).unwrap_or(init);

        let mut cycle: Vec<(usize, usize)> = Vec::new();
        let mut covered = Marks::default();
        let mut cur = entry;
        for mark in 0..graph.num_marks {
            if covered.contains(mark) {
                continue;
            }
            let has_edge = |v: usize| graph.succ[v].iter().any(|(w, m)| inside(*w) && m.contains(mark));
            let path = bfs(graph, cur, inside, has_edge).expect("mark is inside the component");
            for &(v, k) in &path {
                covered.union_with(&graph.succ[v][k].1);
            }
            cycle.extend(path);
            let from = cycle.last().map(|&(v, k)| graph.succ[v][k].0).unwrap_or(cur);
            let k = graph.succ[from]
                .iter()
                .position(|(w, m)| inside(*w) && m.contains(mark))
                .expect("edge found by search");
            covered.union_with(&graph.succ[from][k].1);
            cycle.push((from, k));
            cur = graph.succ[from][k].0;
        }
        if cycle.is_empty() {
            let k = graph.succ[entry]
                .iter()
                .position(|(w, _)| inside(*w))
                .expect("nontrivial component");
            cycle.push((entry, k));
            cur = graph.succ[entry][k].0;
        }
        let back = bfs(graph, cur, inside, |v| v == entry).expect("strongly connected");
        cycle.extend(back);
        return Some(EdgeLasso { stem, cycle });
    }
    None
}

/// Whether `graph` (restricted to `model`'s state space) has a path from
/// `start` that the automaton accepts and that satisfies every fairness
/// predicate infinitely often. Returns such a path as a model lasso.
///
/// Product states pair a model state with an automaton state; the automaton
/// reads the valuation `letter(s)` of the model state being left.
pub fn product_emptiness<G: TransitionGraph + ?Sized>(
    model: &Model,
    graph: &G,
    start: StateId,
    gba: &Gba,
    letter: &dyn Fn(StateId) -> u64,
    fairness: &[FairnessPredicate],
) -> Option<Lasso> {
    let q = gba.num_states();
    let mut ids = std::collections::HashMap::new();
    let mut nodes: Vec<(StateId, usize)> = Vec::new();
    let mut succ: Vec<Vec<(usize, Marks)>> = Vec::new();
    let mut labels: Vec<Vec<EventId>> = Vec::new();
    let base = gba.num_acceptance;
    let mut intern = |s: StateId, a: usize, nodes: &mut Vec<(StateId, usize)>| -> (usize, bool) {
        let key = s * q + a;
        if let Some(&id) = ids.get(&key) {
            return (id, false);
        }
        ids.insert(key, nodes.len());
        nodes.push((s, a));
        (nodes.len() - 1, true)
    };
    let (init, _) = intern(start, gba.initial, &mut nodes);
    let mut k = 0;
    while k < nodes.len() {
        let (s, a) = nodes[k];
        let l = letter(s);
        let mut row = Vec::new();
        let mut row_events = Vec::new();
        for &(e, t) in graph.successors(s) {
            let mut fair = Marks::default();
            for (i, p) in fairness.iter().enumerate() {
                if p.holds(model, s, e) {
                    fair.insert(base + i);
                }
            }
            for edge in gba.edges[a].iter().filter(|edge| edge.matches(l)) {
                let (id, _) = intern(t, edge.target, &mut nodes);
                let mut m = Marks::from_bits(edge.acc);
                m.union_with(&fair);
                row.push((id, m));
                row_events.push(e);
            }
        }
        succ.push(row);
        labels.push(row_events);
        k += 1;
    }
    let graph = MarkedGraph {
        succ,
        num_marks: base + fairness.len(),
    };
    let lasso = find_accepting_lasso(&graph, init)?;
    let project = |steps: &[(usize, usize)]| -> Vec<(StateId, EventId)> {
        steps.iter().map(|&(v, k)| (nodes[v].0, labels[v][k])).collect()
    };
    Some(
        Lasso {
            stem: project(&lasso.stem),
            cycle: project(&lasso.cycle),
        }
        .normalized(),
    )
}
