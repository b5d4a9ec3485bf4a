//! Seeded generator of random, validation-clean AMAS instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::amas::{AgentDecl, Amas, StateDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
}

/// Parameters for [`generate_random_amas`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub agents: usize,
    pub states: usize,
    pub events: usize,
    /// Upper bound on the number of owners of any event.
    pub sync_degree: usize,
}

/// Deterministic for a given seed. Agent `a` always owns event `a mod events`;
/// extra owners are drawn at random up to `sync_degree`. Every local state
/// gets one or two outgoing events grouped into random choices, and agent `a`
/// labels a random subset of its states with proposition `p<a>`.
pub fn generate_random_amas(seed: u64, params: GenParams) -> Result<Amas, GenError> {
    let GenParams {
        agents,
        states,
        events,
        sync_degree,
    } = params;
    if agents == 0 || states == 0 || events == 0 || sync_degree == 0 {
        return Err(GenError::Infeasible("all counts must be positive".into()));
    }
    if sync_degree > agents {
        return Err(GenError::Infeasible(format!(
            "sync degree {sync_degree} exceeds agent count {agents}"
        )));
    }
    if agents.div_ceil(events) > sync_degree {
        return Err(GenError::Infeasible(format!(
            "{agents} agents cannot each own one of {events} events with at most {sync_degree} owners per event"
        )));
    }
    if states > 10 {
        return Err(GenError::Infeasible("at most 10 local states per agent".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); events];
    for a in 0..agents {
        owners[a % events].push(a);
    }
    for owned in owners.iter_mut() {
        let target = rng.gen_range(owned.len().max(1)..=sync_degree);
        let mut pool: Vec<usize> = (0..agents).filter(|a| !owned.contains(a)).collect();
        pool.shuffle(&mut rng);
        while owned.len() < target {
            match pool.pop() {
                Some(a) => owned.push(a),
                None => break,
            }
        }
        owned.sort_unstable();
    }

    let decls = (0..agents)
        .map(|a| {
            let alphabet: Vec<usize> = (0..events).filter(|&e| owners[e].contains(&a)).collect();
            let state_decls = (0..states)
                .map(|l| {
                    let mut out = vec![alphabet[l % alphabet.len()]];
                    if alphabet.len() > 1 && rng.gen_bool(0.5) {
                        let extra = *alphabet.choose(&mut rng).expect("nonempty");
                        if !out.contains(&extra) {
                            out.push(extra);
                        }
                    }
                    let transitions: Vec<(String, String)> = out
                        .iter()
                        .map(|&e| (format!("e{e}"), rng.gen_range(0..states).to_string()))
                        .collect();
                    let names: Vec<String> = out.iter().map(|e| format!("e{e}")).collect();
                    let choices = if names.len() == 2 && rng.gen_bool(0.5) {
                        vec![names]
                    } else {
                        names.into_iter().map(|n| vec![n]).collect()
                    };
                    StateDecl {
                        name: l.to_string(),
                        props: if rng.gen_bool(0.5) {
                            vec![format!("p{a}")]
                        } else {
                            Vec::new()
                        },
                        choices: Some(choices),
                        transitions,
                    }
                })
                .collect();
            AgentDecl {
                name: format!("a{a}"),
                init: Some("0".into()),
                states: state_decls,
            }
        })
        .collect();

    Amas::new(decls).map_err(|e| GenError::Infeasible(format!("generated an invalid system: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::print_amas;

    fn params(agents: usize, states: usize, events: usize, sync_degree: usize) -> GenParams {
        GenParams {
            agents,
            states,
            events,
            sync_degree,
        }
    }

    #[test]
    fn same_seed_same_system() {
        let a = generate_random_amas(1, params(2, 3, 4, 2)).unwrap();
        let b = generate_random_amas(1, params(2, 3, 4, 2)).unwrap();
        assert_eq!(print_amas(&a), print_amas(&b));
    }

    #[test]
    fn sync_degree_one_means_private_events() {
        for seed in 0..50 {
            let amas = generate_random_amas(seed, params(3, 3, 4, 1)).unwrap();
            for e in 0..amas.events().len() {
                assert_eq!(amas.owners(crate::amas::EventId(e)).len(), 1);
            }
        }
    }

    #[test]
    fn many_seeds_validate() {
        for seed in 0..1000 {
            let p = params(1 + (seed as usize % 4), 1 + (seed as usize % 4), 2 + seed as usize % 3, 1 + seed as usize % 2);
            let p = GenParams {
                sync_degree: p.sync_degree.min(p.agents),
                ..p
            };
            if let Ok(amas) = generate_random_amas(seed, p) {
                for agent in amas.agents() {
                    for l in 0..agent.states().len() {
                        assert!(!agent.repertoire(l).is_empty());
                    }
                }
            } else {
                assert!(p.agents.div_ceil(p.events) > p.sync_degree);
            }
        }
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        assert!(generate_random_amas(0, params(0, 1, 1, 1)).is_err());
        assert!(generate_random_amas(0, params(2, 1, 1, 3)).is_err());
        assert!(generate_random_amas(0, params(4, 2, 1, 1)).is_err());
    }
}
