//! Propositional LTL over atom indices, and its evaluation on ultimately
//! periodic words.

use std::fmt;

/// Core LTL. Atoms are bit positions in a letter (`u64`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    Atom(usize),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn falsum() -> Ltl {
        Ltl::not(Ltl::True)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Ltl) -> Ltl {
        Ltl::Not(Box::new(a))
    }

    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::not(Ltl::and(Ltl::not(a), Ltl::not(b)))
    }

    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::not(Ltl::and(a, Ltl::not(b)))
    }

    pub fn next(a: Ltl) -> Ltl {
        Ltl::Next(Box::new(a))
    }

    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::not(Ltl::until(Ltl::not(a), Ltl::not(b)))
    }

    pub fn eventually(a: Ltl) -> Ltl {
        Ltl::until(Ltl::True, a)
    }

    pub fn globally(a: Ltl) -> Ltl {
        Ltl::not(Ltl::eventually(Ltl::not(a)))
    }

    /// One more than the largest atom index used.
    pub fn atom_bound(&self) -> usize {
        match self {
            Ltl::True => 0,
            Ltl::Atom(a) => a + 1,
            Ltl::Not(x) | Ltl::Next(x) => x.atom_bound(),
            Ltl::And(a, b) | Ltl::Until(a, b) => a.atom_bound().max(b.atom_bound()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::Atom(_) => 1,
            Ltl::Not(x) | Ltl::Next(x) => 1 + x.size(),
            Ltl::And(a, b) | Ltl::Until(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::Atom(a) => write!(f, "p{a}"),
            Ltl::Not(x) => write!(f, "!{x}"),
            Ltl::And(a, b) => write!(f, "({a} & {b})"),
            Ltl::Next(x) => write!(f, "X {x}"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}

/// `letters[0..loop_start]` once, then `letters[loop_start..]` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpWord {
    pub letters: Vec<u64>,
    pub loop_start: usize,
}

impl UpWord {
    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.letters.len() {
            i + 1
        } else {
            self.loop_start
        }
    }
}

/// Truth of `f` at position 0 of `word`.
///
/// Each subformula is evaluated at every position; until is the least
/// fixpoint of its expansion over the finite position graph.
pub fn eval_word(f: &Ltl, word: &UpWord) -> bool {
    assert!(
        word.loop_start < word.letters.len(),
        "ultimately periodic word needs a nonempty loop"
    );
    eval_all(f, word)[0]
}

fn eval_all(f: &Ltl, w: &UpWord) -> Vec<bool> {
    let n = w.letters.len();
    match f {
        Ltl::True => vec![true; n],
        Ltl::Atom(a) => w.letters.iter().map(|&l| l >> a & 1 == 1).collect(),
        Ltl::Not(x) => eval_all(x, w).into_iter().map(|v| !v).collect(),
        Ltl::And(a, b) => {
            let (a, b) = (eval_all(a, w), eval_all(b, w));
            a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
        }
        Ltl::Next(x) => {
            let x = eval_all(x, w);
            (0..n).map(|i| x[w.succ(i)]).collect()
        }
        Ltl::Until(a, b) => {
            let (a, b) = (eval_all(a, w), eval_all(b, w));
            let mut v = b.clone();
            loop {
                let mut changed = false;
                for i in (0..n).rev() {
                    if !v[i] && a[i] && v[w.succ(i)] {
                        v[i] = true;
                        changed = true;
                    }
                }
                if !changed {
                    return v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(letters: &[u64], loop_start: usize) -> UpWord {
        UpWord {
            letters: letters.to_vec(),
            loop_start,
        }
    }

    #[test]
    fn eventually_and_globally() {
        let p = || Ltl::Atom(0);
        let w = word(&[0, 0, 1], 2);
        assert!(eval_word(&Ltl::eventually(p()), &w));
        assert!(!eval_word(&Ltl::globally(p()), &w));
        assert!(eval_word(&Ltl::eventually(Ltl::globally(p())), &w));
        let w = word(&[1, 0], 0);
        assert!(eval_word(&Ltl::globally(Ltl::eventually(p())), &w));
        assert!(!eval_word(&Ltl::eventually(Ltl::globally(p())), &w));
    }

    #[test]
    fn until_needs_the_goal() {
        let u = Ltl::until(Ltl::Atom(0), Ltl::Atom(1));
        assert!(!eval_word(&u, &word(&[1], 0)));
        assert!(eval_word(&u, &word(&[1, 1, 2], 2)));
        assert!(!eval_word(&u, &word(&[1, 0, 2], 2)));
    }

    #[test]
    fn next_wraps_into_the_loop() {
        let x = Ltl::next(Ltl::Atom(0));
        let w = word(&[0, 1], 1);
        assert!(eval_word(&x, &w));
        assert!(eval_word(&Ltl::next(x), &w));
    }

    #[test]
    fn release_is_dual_of_until() {
        let w = word(&[2, 2, 3, 0], 3);
        let r = Ltl::release(Ltl::Atom(0), Ltl::Atom(1));
        assert!(eval_word(&r, &w));
        let w = word(&[2, 0], 1);
        assert!(!eval_word(&r, &w));
    }
}
