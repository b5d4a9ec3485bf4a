use serde::Serialize;
use thiserror::Error;

use super::emptiness::product_emptiness;
use crate::amas::AgentId;
use crate::compose::{Model, StateId, TransitionGraph};
use crate::logic::{ltl_to_gba, Gba, GbaEdge, GbaError, Ltl, PathFormula, StateFormula};
use crate::par::{self, Execution};
use crate::strategy::{
    fairness_conditions, restrict, FairnessKind, FairnessPredicate, JointStrategy, Lasso, LassoDoc,
    OutcomeMode, StrategyError, StrategyRow, StrategySpace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Automaton(#[from] GbaError),
    #[error("path formula has {0} distinct state subformulas; at most 64 are supported")]
    TooManyAtoms(usize),
    #[error("state {0} is not a state of the model")]
    UnknownState(StateId),
}

/// Which outcome paths the coalition must handle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Semantics {
    pub mode: OutcomeMode,
    pub fairness: FairnessKind,
    /// Demand a nonempty (filtered) outcome from the witnessing strategy.
    pub require_nonempty: bool,
    /// Let ε act as a fairness witness event.
    pub epsilon_witness: bool,
}

impl Default for Semantics {
    fn default() -> Self {
        Semantics {
            mode: OutcomeMode::Plain,
            fairness: FairnessKind::None,
            require_nonempty: true,
            epsilon_witness: false,
        }
    }
}

impl Semantics {
    pub fn plain() -> Self {
        Self::default()
    }

    pub fn reactive() -> Self {
        Semantics {
            mode: OutcomeMode::Reactive,
            ..Self::default()
        }
    }

    pub fn with_fairness(self, fairness: FairnessKind) -> Self {
        Semantics { fairness, ..self }
    }

    /// Legal but suspicious combinations.
    pub fn warnings(&self, model: &Model) -> Vec<String> {
        let mut w = Vec::new();
        if self.mode == OutcomeMode::Reactive && model.epsilon().is_none() {
            w.push("opponent-reactive semantics on a model without ε-transitions coincides with plain semantics".into());
        }
        if self.epsilon_witness && model.epsilon().is_none() {
            w.push("ε as a fairness witness has no effect on a model without ε".into());
        }
        w
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub index: u64,
    pub strategy: JointStrategy,
}

/// Why a particular strategy fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refutation {
    /// The strategy has no (fair/reactive) infinite outcome path.
    EmptyOutcome { index: u64, strategy: JointStrategy },
    /// An outcome path violating the path formula.
    Path {
        index: u64,
        strategy: JointStrategy,
        lasso: Lasso,
    },
}

impl Refutation {
    pub fn lasso(&self) -> Option<&Lasso> {
        match self {
            Refutation::Path { lasso, .. } => Some(lasso),
            Refutation::EmptyOutcome { .. } => None,
        }
    }
}

/// Outcome of a check. For a modality the witness is the first strategy (in
/// enumeration order) that works; if none does, the refutation is for the
/// last strategy tried. Negations pass the details of their operand through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub value: bool,
    pub witness: Option<Witness>,
    pub refutation: Option<Refutation>,
    pub strategies: u64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefutationDoc {
    pub strategy_index: u64,
    pub strategy: Vec<StrategyRow>,
    pub empty_outcome: bool,
    pub lasso: Option<LassoDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictDoc {
    pub value: bool,
    pub strategies: u64,
    pub witness_index: Option<u64>,
    pub witness: Option<Vec<StrategyRow>>,
    pub counterexample: Option<RefutationDoc>,
    pub warnings: Vec<String>,
}

impl Verdict {
    pub fn doc(&self, model: &Model) -> VerdictDoc {
        let amas = model.amas();
        VerdictDoc {
            value: self.value,
            strategies: self.strategies,
            witness_index: self.witness.as_ref().map(|w| w.index),
            witness: self.witness.as_ref().map(|w| w.strategy.rows(amas)),
            counterexample: self.refutation.as_ref().map(|r| match r {
                Refutation::EmptyOutcome { index, strategy } => RefutationDoc {
                    strategy_index: *index,
                    strategy: strategy.rows(amas),
                    empty_outcome: true,
                    lasso: None,
                },
                Refutation::Path {
                    index,
                    strategy,
                    lasso,
                } => RefutationDoc {
                    strategy_index: *index,
                    strategy: strategy.rows(amas),
                    empty_outcome: false,
                    lasso: Some(lasso.doc(model)),
                },
            }),
            warnings: self.warnings.clone(),
        }
    }
}

/// The automaton accepting every word.
fn universal_gba() -> Gba {
    Gba {
        initial: 0,
        edges: vec![vec![GbaEdge {
            pos: 0,
            neg: 0,
            target: 0,
            acc: 0,
        }]],
        num_acceptance: 0,
    }
}

/// Whether every fair path of `graph` from `s` satisfies `gamma`; otherwise a
/// fair violating path.
pub fn check_universal<G: TransitionGraph + ?Sized>(
    model: &Model,
    graph: &G,
    s: StateId,
    gamma: &Ltl,
    letter: &dyn Fn(StateId) -> u64,
    fairness: &[FairnessPredicate],
) -> Result<(bool, Option<Lasso>), CheckError> {
    let gba = ltl_to_gba(&Ltl::not(gamma.clone()))?;
    let lasso = product_emptiness(model, graph, s, &gba, letter, fairness);
    Ok((lasso.is_none(), lasso))
}

enum Trial {
    Works,
    Empty,
    Violated(Lasso),
}

/// Evaluates state formulas on one model under one semantics.
pub struct Checker<'m> {
    model: &'m Model,
    sem: Semantics,
    exec: Execution,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m Model, sem: Semantics) -> Self {
        Checker {
            model,
            sem,
            exec: Execution::default(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn check(&self, s: StateId, phi: &StateFormula) -> Result<Verdict, CheckError> {
        if s >= self.model.num_states() {
            return Err(CheckError::UnknownState(s));
        }
        let mut v = self.eval(s, phi)?;
        v.warnings = self.sem.warnings(self.model);
        Ok(v)
    }

    /// Truth of `phi` at every state (bottom-up labelling).
    pub fn sat(&self, phi: &StateFormula) -> Result<Vec<bool>, CheckError> {
        let states: Vec<StateId> = (0..self.model.num_states()).collect();
        par::map(self.exec, &states, |&s| self.eval(s, phi).map(|v| v.value))
            .into_iter()
            .collect()
    }

    fn eval(&self, s: StateId, phi: &StateFormula) -> Result<Verdict, CheckError> {
        let plain = |value| Verdict {
            value,
            witness: None,
            refutation: None,
            strategies: 0,
            warnings: Vec::new(),
        };
        Ok(match phi {
            StateFormula::True => plain(true),
            StateFormula::Prop(p) => plain(self.model.labels(s).contains(p)),
            StateFormula::Not(a) => {
                let v = self.eval(s, a)?;
                Verdict { value: !v.value, ..v }
            }
            StateFormula::And(a, b) => {
                let va = self.eval(s, a)?;
                if !va.value {
                    return Ok(va);
                }
                self.eval(s, b)?
            }
            StateFormula::Coalition(agents, gamma) => self.coalition(s, agents, gamma)?,
        })
    }

    /// Atom truth tables for the maximal state subformulas of `gamma`.
    fn atoms(&self, gamma: &PathFormula) -> Result<(Ltl, Vec<u64>), CheckError> {
        let mut table: Vec<StateFormula> = Vec::new();
        let ltl = gamma.to_ltl(&mut |f| match table.iter().position(|g| g == f) {
            Some(i) => i,
            None => {
                table.push(f.clone());
                table.len() - 1
            }
        });
        if table.len() > 64 {
            return Err(CheckError::TooManyAtoms(table.len()));
        }
        let mut letters = vec![0u64; self.model.num_states()];
        for (i, f) in table.iter().enumerate() {
            let truth = match f {
                StateFormula::Prop(p) => (0..self.model.num_states())
                    .map(|s| self.model.labels(s).contains(p))
                    .collect(),
                _ => self.sat(f)?,
            };
            for (s, t) in truth.into_iter().enumerate() {
                if t {
                    letters[s] |= 1 << i;
                }
            }
        }
        Ok((ltl, letters))
    }

    fn coalition(&self, s: StateId, agents: &[AgentId], gamma: &PathFormula) -> Result<Verdict, CheckError> {
        let (ltl, letters) = self.atoms(gamma)?;
        let letter = |x: StateId| letters[x];
        let negated = ltl_to_gba(&Ltl::not(ltl))?;
        let universal = universal_gba();
        let space = StrategySpace::new(self.model.amas(), agents)?;

        let trial = |index: u64| -> Result<(JointStrategy, Trial), CheckError> {
            let sigma = space.get(index)?;
            let graph = restrict(self.model, &sigma, self.sem.mode)?;
            let fairness = match self.sem.fairness {
                FairnessKind::None => Vec::new(),
                kind => fairness_conditions(&graph, kind, self.sem.epsilon_witness),
            };
            if self.sem.require_nonempty
                && product_emptiness(self.model, &graph, s, &universal, &letter, &fairness).is_none()
            {
                return Ok((sigma, Trial::Empty));
            }
            let result = match product_emptiness(self.model, &graph, s, &negated, &letter, &fairness) {
                None => Trial::Works,
                Some(lasso) => Trial::Violated(lasso),
            };
            Ok((sigma, result))
        };

        let n = space.len();
        let found = par::find_first(self.exec, n, |i| match trial(i) {
            Ok((sigma, Trial::Works)) => Some(Ok(sigma)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        });
        match found {
            Some((index, Ok(strategy))) => Ok(Verdict {
                value: true,
                witness: Some(Witness { index, strategy }),
                refutation: None,
                strategies: n,
                warnings: Vec::new(),
            }),
            Some((_, Err(e))) => Err(e),
            None => {
                let index = n - 1;
                let refutation = match trial(index)? {
                    (strategy, Trial::Empty) => Refutation::EmptyOutcome { index, strategy },
                    (strategy, Trial::Violated(lasso)) => Refutation::Path {
                        index,
                        strategy,
                        lasso,
                    },
                    (_, Trial::Works) => unreachable!("strategy {index} was rejected before"),
                };
                Ok(Verdict {
                    value: false,
                    witness: None,
                    refutation: Some(refutation),
                    strategies: n,
                    warnings: Vec::new(),
                })
            }
        }
    }
}

/// `M, g ⊨ φ` under `sem`.
pub fn check(model: &Model, s: StateId, phi: &StateFormula, sem: Semantics) -> Result<Verdict, CheckError> {
    Checker::new(model, sem).check(s, phi)
}
