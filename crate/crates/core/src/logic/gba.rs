//! Tableau translation of LTL to transition-based generalized Büchi automata.
//!
//! A state is the set of obligations for the next step. Expanding a state
//! yields covers, each a propositional constraint on the current letter plus
//! the obligations it defers. Every until gets one acceptance set, containing
//! the transitions on which it is not deferred.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::ltl::{Ltl, UpWord};
use crate::mc::emptiness::{find_accepting_lasso, MarkedGraph, Marks};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbaError {
    #[error("formula uses {0} atoms; at most 64 are supported")]
    TooManyAtoms(usize),
    #[error("formula has {0} until subformulas; at most 64 are supported")]
    TooManyUntils(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

#[derive(Default)]
struct Pool {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
}

impl Pool {
    fn intern(&mut self, n: Node) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n);
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Negation normal form of `f`, negated when `neg` is set.
    fn nnf(&mut self, f: &Ltl, neg: bool) -> usize {
        let node = match (f, neg) {
            (Ltl::True, false) => Node::True,
            (Ltl::True, true) => Node::False,
            (Ltl::Atom(a), _) => Node::Lit(*a, !neg),
            (Ltl::Not(x), _) => return self.nnf(x, !neg),
            (Ltl::And(a, b), false) => Node::And(self.nnf(a, false), self.nnf(b, false)),
            (Ltl::And(a, b), true) => Node::Or(self.nnf(a, true), self.nnf(b, true)),
            (Ltl::Next(x), _) => Node::Next(self.nnf(x, neg)),
            (Ltl::Until(a, b), false) => Node::Until(self.nnf(a, false), self.nnf(b, false)),
            (Ltl::Until(a, b), true) => Node::Release(self.nnf(a, true), self.nnf(b, true)),
        };
        self.intern(node)
    }
}

/// A transition: enabled on letters containing all of `pos` and none of
/// `neg`; `acc` has bit `k` set when it belongs to acceptance set `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GbaEdge {
    pub pos: u64,
    pub neg: u64,
    pub target: usize,
    pub acc: u64,
}

impl GbaEdge {
    pub fn matches(&self, letter: u64) -> bool {
        letter & self.pos == self.pos && letter & self.neg == 0
    }
}

/// Transition-based generalized Büchi automaton with a single initial state.
#[derive(Clone, Debug)]
pub struct Gba {
    pub initial: usize,
    pub edges: Vec<Vec<GbaEdge>>,
    pub num_acceptance: usize,
}

#[derive(Clone)]
struct Cover {
    pos: u64,
    neg: u64,
    next: BTreeSet<usize>,
    postponed: BTreeSet<usize>,
    done: BTreeSet<usize>,
}

fn expand(pool: &Pool, mut todo: Vec<usize>, mut cover: Cover, out: &mut Vec<Cover>) {
    while let Some(f) = todo.pop() {
        if !cover.done.insert(f) {
            continue;
        }
        match pool.nodes[f] {
            Node::True => {}
            Node::False => return,
            Node::Lit(a, positive) => {
                let bit = 1u64 << a;
                if positive {
                    if cover.neg & bit != 0 {
                        return;
                    }
                    cover.pos |= bit;
                } else {
                    if cover.pos & bit != 0 {
                        return;
                    }
                    cover.neg |= bit;
                }
            }
            Node::And(a, b) => {
                todo.push(a);
                todo.push(b);
            }
            Node::Or(a, b) => {
                let mut left = todo.clone();
                left.push(a);
                expand(pool, left, cover.clone(), out);
                todo.push(b);
            }
            Node::Next(a) => {
                cover.next.insert(a);
            }
            Node::Until(a, b) => {
                let mut now = todo.clone();
                now.push(b);
                expand(pool, now, cover.clone(), out);
                todo.push(a);
                cover.next.insert(f);
                cover.postponed.insert(f);
            }
            Node::Release(a, b) => {
                let mut now = todo.clone();
                now.push(a);
                now.push(b);
                expand(pool, now, cover.clone(), out);
                todo.push(b);
                cover.next.insert(f);
            }
        }
    }
    out.push(cover);
}

/// Builds an automaton accepting exactly the words satisfying `f`.
pub fn ltl_to_gba(f: &Ltl) -> Result<Gba, GbaError> {
    let atoms = f.atom_bound();
    if atoms > 64 {
        return Err(GbaError::TooManyAtoms(atoms));
    }
    let mut pool = Pool::default();
    let root = pool.nnf(f, false);
    let untils: Vec<usize> = (0..pool.nodes.len())
        .filter(|&i| matches!(pool.nodes[i], Node::Until(..)))
        .collect();
    if untils.len() > 64 {
        return Err(GbaError::TooManyUntils(untils.len()));
    }

    let mut states: Vec<BTreeSet<usize>> = vec![BTreeSet::from([root])];
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::from([(states[0].clone(), 0)]);
    let mut edges: Vec<Vec<GbaEdge>> = Vec::new();
    let mut k = 0;
    while k < states.len() {
        let mut covers = Vec::new();
        let start = Cover {
            pos: 0,
            neg: 0,
            next: BTreeSet::new(),
            postponed: BTreeSet::new(),
            done: BTreeSet::new(),
        };
        expand(&pool, states[k].iter().copied().collect(), start, &mut covers);
        let mut row = BTreeSet::new();
        for c in covers {
            let target = *index.entry(c.next.clone()).or_insert_with(|| {
                states.push(c.next.clone());
                states.len() - 1
            });
            let acc = untils
                .iter()
                .enumerate()
                .filter(|(_, u)| !c.postponed.contains(u))
                .fold(0u64, |m, (i, _)| m | 1 << i);
            row.insert(GbaEdge {
                pos: c.pos,
                neg: c.neg,
                target,
                acc,
            });
        }
        edges.push(row.into_iter().collect());
        k += 1;
    }
    Ok(Gba {
        initial: 0,
        edges,
        num_acceptance: untils.len(),
    })
}

impl Gba {
    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    /// Language membership of an ultimately periodic word, by emptiness of
    /// the product with the word's position graph.
    pub fn accepts(&self, word: &UpWord) -> bool {
        let n = word.letters.len();
        let q = self.num_states();
        let node = |i: usize, s: usize| i * q + s;
        let mut succ = vec![Vec::new(); n * q];
        for i in 0..n {
            let next = if i + 1 < n { i + 1 } else { word.loop_start };
            for s in 0..q {
                for e in &self.edges[s] {
                    if e.matches(word.letters[i]) {
                        succ[node(i, s)].push((node(next, e.target), Marks::from_bits(e.acc)));
                    }
                }
            }
        }
        let graph = MarkedGraph {
            succ,
            num_marks: self.num_acceptance,
        };
        find_accepting_lasso(&graph, node(0, self.initial)).is_some()
    }
}
