//! Strategic formulas, their parser and classifier, and the LTL machinery
//! used to check path formulas.

mod gba;
mod ltl;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::amas::{AgentId, Amas, PropId};

pub use gba::{ltl_to_gba, Gba, GbaEdge, GbaError};
pub use ltl::{eval_word, Ltl, UpWord};
pub use parse::parse_formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula syntax error at column {col}: {message}")]
    Syntax { col: usize, message: String },
    #[error("unknown agent `{0}` in coalition")]
    UnknownAgent(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("temporal operator outside a strategic modality")]
    TemporalOutsideModality,
}

/// `φ ::= ⊤ | p | ¬φ | φ ∧ φ | ⟨⟨A⟩⟩γ`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateFormula {
    True,
    Prop(PropId),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    /// Coalition sorted and deduplicated.
    Coalition(Vec<AgentId>, Box<PathFormula>),
}

/// `γ ::= φ | ¬γ | γ ∧ γ | Xγ | γ U γ`; F, G, R, ∨ and → are stored expanded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PathFormula {
    State(Box<StateFormula>),
    Not(Box<PathFormula>),
    And(Box<PathFormula>, Box<PathFormula>),
    Next(Box<PathFormula>),
    Until(Box<PathFormula>, Box<PathFormula>),
}

impl StateFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: StateFormula) -> Self {
        StateFormula::Not(Box::new(a))
    }

    pub fn and(a: StateFormula, b: StateFormula) -> Self {
        StateFormula::And(Box::new(a), Box::new(b))
    }

    pub fn coalition(mut agents: Vec<AgentId>, gamma: PathFormula) -> Self {
        agents.sort();
        agents.dedup();
        StateFormula::Coalition(agents, Box::new(gamma))
    }

    /// Renders in the concrete syntax accepted by [`parse_formula`].
    pub fn display<'a>(&'a self, amas: &'a Amas) -> impl fmt::Display + 'a {
        Shown(Node::State(self), amas)
    }
}

impl PathFormula {
    pub fn state(a: StateFormula) -> Self {
        PathFormula::State(Box::new(a))
    }

    /// Boolean combinations of state formulas stay state formulas, so that
    /// printing and reparsing give back the same tree.
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: PathFormula) -> Self {
        match a {
            PathFormula::State(s) => PathFormula::state(StateFormula::not(*s)),
            a => PathFormula::Not(Box::new(a)),
        }
    }

    pub fn and(a: PathFormula, b: PathFormula) -> Self {
        match (a, b) {
            (PathFormula::State(x), PathFormula::State(y)) => PathFormula::state(StateFormula::and(*x, *y)),
            (a, b) => PathFormula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn next(a: PathFormula) -> Self {
        PathFormula::Next(Box::new(a))
    }

    pub fn until(a: PathFormula, b: PathFormula) -> Self {
        PathFormula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(a: PathFormula) -> Self {
        PathFormula::until(PathFormula::state(StateFormula::True), a)
    }

    pub fn globally(a: PathFormula) -> Self {
        PathFormula::not(PathFormula::eventually(PathFormula::not(a)))
    }

    pub fn release(a: PathFormula, b: PathFormula) -> Self {
        PathFormula::not(PathFormula::until(PathFormula::not(a), PathFormula::not(b)))
    }

    /// Translates to LTL, mapping each maximal strategic subformula and each
    /// proposition to an atom through `atom`.
    pub fn to_ltl(&self, atom: &mut impl FnMut(&StateFormula) -> usize) -> Ltl {
        match self {
            PathFormula::State(s) => state_to_ltl(s, atom),
            PathFormula::Not(a) => Ltl::not(a.to_ltl(atom)),
            PathFormula::And(a, b) => Ltl::and(a.to_ltl(atom), b.to_ltl(atom)),
            PathFormula::Next(a) => Ltl::next(a.to_ltl(atom)),
            PathFormula::Until(a, b) => Ltl::until(a.to_ltl(atom), b.to_ltl(atom)),
        }
    }
}

fn state_to_ltl(s: &StateFormula, atom: &mut impl FnMut(&StateFormula) -> usize) -> Ltl {
    match s {
        StateFormula::True => Ltl::True,
        StateFormula::Not(a) => Ltl::not(state_to_ltl(a, atom)),
        StateFormula::And(a, b) => Ltl::and(state_to_ltl(a, atom), state_to_ltl(b, atom)),
        StateFormula::Prop(_) | StateFormula::Coalition(..) => Ltl::Atom(atom(s)),
    }
}

enum Node<'a> {
    State(&'a StateFormula),
    Path(&'a PathFormula),
}

struct Shown<'a>(Node<'a>, &'a Amas);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let amas = self.1;
        let s = |x: &'_ StateFormula| Shown(Node::State(x), amas).to_string();
        let p = |x: &'_ PathFormula| Shown(Node::Path(x), amas).to_string();
        match self.0 {
            Node::State(StateFormula::True) => write!(f, "true"),
            Node::State(StateFormula::Prop(q)) => write!(f, "{}", amas.prop_name(*q)),
            Node::State(StateFormula::Not(a)) => write!(f, "!{}", s(a)),
            Node::State(StateFormula::And(a, b)) => write!(f, "({} & {})", s(a), s(b)),
            Node::State(StateFormula::Coalition(agents, g)) => {
                let names: Vec<&str> = agents.iter().map(|&a| amas.agent(a).name()).collect();
                write!(f, "<<{}>>({})", names.join(","), p(g))
            }
            Node::Path(PathFormula::State(a)) => write!(f, "{}", s(a)),
            Node::Path(PathFormula::Not(a)) => write!(f, "!{}", p(a)),
            Node::Path(PathFormula::And(a, b)) => write!(f, "({} & {})", p(a), p(b)),
            Node::Path(PathFormula::Next(a)) => write!(f, "X {}", p(a)),
            Node::Path(PathFormula::Until(a, b)) => write!(f, "({} U {})", p(a), p(b)),
        }
    }
}

/// Result of [`classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// No nested strategic modality and no next operator.
    pub compliant: bool,
    pub has_next: bool,
    pub nested: bool,
    pub coalitions: Vec<Vec<AgentId>>,
    pub props: BTreeSet<PropId>,
}

/// Checks membership in the fragment preserved by the reduction and lists
/// the coalitions and propositions mentioned.
pub fn classify(phi: &StateFormula) -> Classification {
    let mut c = Classification {
        compliant: true,
        has_next: false,
        nested: false,
        coalitions: Vec::new(),
        props: BTreeSet::new(),
    };
    fn state(f: &StateFormula, depth: usize, c: &mut Classification) {
        match f {
            StateFormula::True => {}
            StateFormula::Prop(p) => {
                c.props.insert(*p);
            }
            StateFormula::Not(a) => state(a, depth, c),
            StateFormula::And(a, b) => {
                state(a, depth, c);
                state(b, depth, c);
            }
            StateFormula::Coalition(agents, g) => {
                if depth > 0 {
                    c.nested = true;
                }
                if !c.coalitions.contains(agents) {
                    c.coalitions.push(agents.clone());
                }
                path(g, depth + 1, c);
            }
        }
    }
    fn path(g: &PathFormula, depth: usize, c: &mut Classification) {
        match g {
            PathFormula::State(s) => state(s, depth, c),
            PathFormula::Not(a) => path(a, depth, c),
            PathFormula::And(a, b) | PathFormula::Until(a, b) => {
                path(a, depth, c);
                path(b, depth, c);
            }
            PathFormula::Next(a) => {
                c.has_next = true;
                path(a, depth, c);
            }
        }
    }
    state(phi, 0, &mut c);
    c.compliant = !c.has_next && !c.nested;
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::parse_amas;
    use crate::bundled;

    #[test]
    fn classification_examples() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        let gc = amas.agent_by_name("gc").unwrap();
        let oc = amas.agent_by_name("oc").unwrap();
        let c = classify(&parse_formula("<<gc,oc>> G !epid", &amas).unwrap());
        assert!(c.compliant);
        assert_eq!(c.coalitions, [vec![gc, oc]]);
        assert_eq!(c.props, BTreeSet::from([amas.prop_by_name("epid").unwrap()]));

        let c = classify(&parse_formula("<<gc>> X open", &amas).unwrap());
        assert!(!c.compliant && c.has_next);

        let c = classify(&parse_formula("<<gc>> F <<oc>> G epid", &amas).unwrap());
        assert!(!c.compliant && c.nested);
    }

    #[test]
    fn display_reparses() {
        let amas = parse_amas(bundled::CONFERENCE).unwrap();
        for text in [
            "<<gc,oc>> G !epid",
            "<<sc>> F open",
            "!<<gc>> (open U closed) & epid",
            "<<>> X X (open -> F closed)",
            "<<oc>> (epid R !closed) | false",
        ] {
            let f = parse_formula(text, &amas).unwrap();
            let shown = f.display(&amas).to_string();
            assert_eq!(parse_formula(&shown, &amas).unwrap(), f, "{shown}");
        }
    }
}
