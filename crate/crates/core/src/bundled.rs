//! Case-study models shipped with the library, and the expectations they
//! document in `#!` comment lines.

use std::fmt::Write;

use crate::compose::ModelKind;
use crate::strategy::{FairnessKind, OutcomeMode};

pub const CONFERENCE: &str = include_str!("../models/conference.amas");
pub const VOTING: &str = include_str!("../models/voting.amas");
pub const VOTING_EXPLICIT: &str = include_str!("../models/voting_explicit.amas");

pub fn all() -> [(&'static str, &'static str); 3] {
    [
        ("conference", CONFERENCE),
        ("voting", VOTING),
        ("voting_explicit", VOTING_EXPLICIT),
    ]
}

pub fn by_name(name: &str) -> Option<&'static str> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

/// `k` agents, each a private chain `0 -> 1 -> ... -> len` ending in a
/// self-loop. No propositions, so every event is invisible to an empty
/// coalition.
pub fn chains(k: usize, len: usize) -> String {
    let mut out = String::new();
    for i in 0..k {
        let _ = writeln!(out, "agent c{i} {{\n  init: 0;");
        for j in 0..len {
            let _ = writeln!(out, "  state {j} {{ on step{i}_{j} -> {}; }}", j + 1);
        }
        let _ = writeln!(out, "  state {len} {{ on done{i} -> {len}; }}\n}}");
    }
    out
}

/// A documented fact about a bundled model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    Check {
        model: ModelKind,
        mode: OutcomeMode,
        fairness: FairnessKind,
        state: String,
        formula: String,
        expected: bool,
    },
    States {
        model: ModelKind,
        count: usize,
    },
    Epsilon {
        model: ModelKind,
        states: Vec<String>,
    },
}

/// Reads the `#!` directives of a model source.
pub fn expectations(src: &str) -> Result<Vec<Expectation>, String> {
    let mut out = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let Some(rest) = line.trim().strip_prefix("#!") else {
            continue;
        };
        let bad = |what: &str| format!("line {}: {what}", n + 1);
        let words: Vec<&str> = rest.split_whitespace().collect();
        let model = |w: Option<&&str>| -> Result<ModelKind, String> {
            w.ok_or_else(|| bad("missing model kind"))?
                .parse()
                .map_err(|e: String| bad(&e))
        };
        match words.first().copied() {
            Some("check") => {
                let (body, value) = rest
                    .rsplit_once('=')
                    .ok_or_else(|| bad("missing `= <bool>`"))?;
                let words: Vec<&str> = body.split_whitespace().collect();
                if words.len() < 6 {
                    return Err(bad("expected `check <model> <semantics> <fairness> <state> <formula> = <bool>`"));
                }
                out.push(Expectation::Check {
                    model: model(words.get(1))?,
                    mode: words[2].parse().map_err(|e: String| bad(&e))?,
                    fairness: words[3].parse().map_err(|e: String| bad(&e))?,
                    state: words[4].to_string(),
                    formula: words[5..].join(" "),
                    expected: value.trim().parse().map_err(|_| bad("expected true or false"))?,
                });
            }
            Some("states") => out.push(Expectation::States {
                model: model(words.get(1))?,
                count: words
                    .get(2)
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| bad("expected a state count"))?,
            }),
            Some("epsilon") => out.push(Expectation::Epsilon {
                model: model(words.get(1))?,
                states: words[2..].iter().map(|s| s.to_string()).collect(),
            }),
            _ => return Err(bad("unknown directive")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::parse_amas;

    #[test]
    fn bundled_models_parse_cleanly() {
        for (name, src) in all() {
            let amas = parse_amas(src).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(amas.lint().is_empty(), "{name}");
            assert!(!expectations(src).unwrap().is_empty(), "{name}");
        }
    }

    #[test]
    fn chain_benchmark_shape() {
        let amas = parse_amas(&chains(3, 3)).unwrap();
        assert_eq!(amas.num_agents(), 3);
        assert!(amas.agents().iter().all(|a| a.states().len() == 4));
        assert!(amas.props().is_empty());
    }

    #[test]
    fn directives_are_read() {
        let exp = expectations(CONFERENCE).unwrap();
        assert!(exp.contains(&Expectation::States {
            model: ModelKind::Iis,
            count: 7
        }));
        assert!(exp.iter().any(|e| matches!(
            e,
            Expectation::Check { formula, fairness: FairnessKind::Cf, .. } if formula == "<<gc,oc>> F closed"
        )));
    }
}
