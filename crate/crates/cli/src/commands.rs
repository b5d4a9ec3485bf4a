//! One function per subcommand. Each fills in the report and returns a
//! one-line summary.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use amas_core::bundled::{self, Expectation};
use amas_core::compose::{build, Model, TransitionGraph};
use amas_core::gen::{generate_random_amas, GenParams};
use amas_core::mc::{Checker, Semantics};
use amas_core::por::{self, ReductionConfig};
use amas_core::strategy::{fairness_conditions, outcome_nonempty, restrict, StrategySpace};
use amas_core::{par, parse_amas, parse_formula, AgentId, Amas, Execution, JointStrategy, ModelKind, StateFormula};
use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use crate::report::{Input, ModelStats, RunReport};
use crate::{FormulaArgs, Outcome, PorArgs, SemanticsArgs};

fn load(report: &mut RunReport, source: &str) -> Result<Amas> {
    let input = Input::model(source)?;
    report.inputs.push(input.digest());
    let amas = parse_amas(&input.text).with_context(|| format!("`{}`", input.name))?;
    report.warnings.extend(amas.lint());
    Ok(amas)
}

fn compose_model(report: &mut RunReport, amas: &Amas, kind: ModelKind) -> Result<Model> {
    let model = build(amas, kind)?;
    report.model = Some(ModelStats::of(&model));
    Ok(model)
}

fn ok(report: RunReport, summary: String) -> Result<Outcome> {
    Ok(Outcome {
        report,
        summary,
        violated: false,
    })
}

fn to_value(v: impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn agents(amas: &Amas, names: &[String]) -> Result<Vec<AgentId>> {
    let mut ids: Vec<AgentId> = names
        .iter()
        .filter(|n| !n.is_empty())
        .map(|n| amas.agent_by_name(n).ok_or_else(|| anyhow!("unknown agent `{n}`")))
        .collect::<Result<_>>()?;
    ids.sort();
    ids.dedup();
    Ok(ids)
}

fn state(model: &Model, name: Option<&str>) -> Result<usize> {
    match name {
        Some(n) => Ok(model.state_by_name(n)?),
        None => Ok(model.initial()),
    }
}

fn formulas(report: &mut RunReport, amas: &Amas, args: &FormulaArgs) -> Result<Vec<(String, StateFormula)>> {
    let mut texts = args.inline.clone();
    if let Some(path) = &args.formula_file {
        let input = Input::file(path)?;
        report.inputs.push(input.digest());
        texts.extend(
            input
                .text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        );
    }
    if texts.is_empty() {
        bail!("no formulas given (use --formula or --formula-file)");
    }
    texts
        .into_iter()
        .map(|t| {
            let phi = parse_formula(&t, amas).with_context(|| format!("formula `{t}`"))?;
            Ok((t, phi))
        })
        .collect()
}

pub fn compose(mut report: RunReport, source: &str, kind: ModelKind) -> Result<Outcome> {
    let amas = load(&mut report, source)?;
    let model = compose_model(&mut report, &amas, kind)?;
    let stats = report.model.clone().expect("just set");
    report.result = to_value(model.to_doc());
    ok(
        report,
        format!("{kind}: {} states, {} transitions", stats.states, stats.transitions),
    )
}

pub fn undeadlock(mut report: RunReport, source: &str) -> Result<Outcome> {
    let amas = load(&mut report, source)?;
    let model = compose_model(&mut report, &amas, ModelKind::Undeadlocked)?;
    let eps_amas = build(&amas, ModelKind::EpsAmas)?;
    let stats = report.model.clone().expect("just set");
    report.result = json!({
        "epsilon_states": stats.epsilon_states,
        "model": to_value(model.to_doc()),
        "eps_amas": to_value(ModelStats::of(&eps_amas)),
    });
    ok(
        report,
        format!(
            "ε-loops at {{{}}} ({} of {} states)",
            stats.epsilon_states.join(", "),
            stats.epsilon_states.len(),
            stats.states
        ),
    )
}

pub fn enumerate(mut report: RunReport, source: &str, coalition: &[String], limit: u64) -> Result<Outcome> {
    let amas = load(&mut report, source)?;
    let coalition = agents(&amas, coalition)?;
    let space = StrategySpace::new(&amas, &coalition)?;
    let shown = space.len().min(limit);
    let strategies: Vec<_> = (0..shown)
        .map(|i| Ok(json!({ "index": i, "strategy": to_value(space.get(i)?.rows(&amas)) })))
        .collect::<Result<_>>()?;
    let names: Vec<&str> = coalition.iter().map(|&a| amas.agent(a).name()).collect();
    report.result = json!({
        "coalition": names,
        "count": space.len(),
        "truncated": shown < space.len(),
        "strategies": strategies,
    });
    ok(
        report,
        format!("{} strategies for {{{}}}, {shown} listed", space.len(), names.join(", ")),
    )
}

pub fn outcome(
    mut report: RunReport,
    source: &str,
    sem: &SemanticsArgs,
    coalition: &[String],
    index: Option<u64>,
    table: Option<&str>,
) -> Result<Outcome> {
    let amas = load(&mut report, source)?;
    let model = compose_model(&mut report, &amas, sem.model)?;
    let start = state(&model, sem.state.as_deref())?;
    let (sigma, index) = match table {
        Some(path) => {
            let input = Input::file(path)?;
            report.inputs.push(input.digest());
            let table: BTreeMap<String, BTreeMap<String, Vec<String>>> =
                serde_json::from_str(&input.text).with_context(|| format!("strategy table `{path}`"))?;
            let sigma = JointStrategy::from_table(&amas, &table)?;
            let index = StrategySpace::new(&amas, &sigma.coalition())?.index_of(&sigma)?;
            (sigma, index)
        }
        None => {
            let space = StrategySpace::new(&amas, &agents(&amas, coalition)?)?;
            let index = index.unwrap_or(0);
            (space.get(index)?, index)
        }
    };
    let graph = restrict(&model, &sigma, sem.semantics)?;
    let mut reach = vec![false; graph.num_states()];
    reach[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for &(_, t) in graph.successors(s) {
            if !reach[t] {
                reach[t] = true;
                queue.push_back(t);
            }
        }
    }
    let nonempty = outcome_nonempty(&graph, start);
    let fairness: Vec<_> = fairness_conditions(&graph, sem.fairness, false)
        .into_iter()
        .filter_map(|p| {
            let active: Vec<String> = (0..graph.num_states())
                .filter(|&s| reach[s] && p.active_at(s))
                .map(|s| model.state_name(s))
                .collect();
            (!active.is_empty()).then(|| json!({ "event": model.event_name(p.event), "active_at": active }))
        })
        .collect();
    let reachable = reach.iter().filter(|&&r| r).count();
    report.result = json!({
        "state": model.state_name(start),
        "semantics": sem.semantics,
        "fairness": sem.fairness,
        "strategy_index": index,
        "strategy": to_value(sigma.rows(&amas)),
        "nonempty": nonempty,
        "graph": to_value(model.doc_of(&graph, |s| reach[s])),
        "fairness_predicates": fairness,
    });
    ok(
        report,
        format!(
            "strategy {index}: {reachable} reachable states, outcome {}",
            if nonempty { "nonempty" } else { "empty" }
        ),
    )
}

pub fn check(
    mut report: RunReport,
    source: &str,
    sem: &SemanticsArgs,
    args: &FormulaArgs,
    require_nonempty: bool,
    epsilon_witness: bool,
    exec: Execution,
) -> Result<Outcome> {
    let amas = load(&mut report, source)?;
    let model = compose_model(&mut report, &amas, sem.model)?;
    let s = state(&model, sem.state.as_deref())?;
    let phis = formulas(&mut report, &amas, args)?;
    let semantics = Semantics {
        mode: sem.semantics,
        fairness: sem.fairness,
        require_nonempty,
        epsilon_witness,
    };
    report.warnings.extend(semantics.warnings(&model));
    let checker = Checker::new(&model, semantics).with_execution(exec);
    let verdicts = par::map(exec, &phis, |(_, phi)| checker.check(s, phi));
    let mut rows = Vec::new();
    let mut failed = 0;
    for ((text, _), verdict) in phis.iter().zip(verdicts) {
        let verdict = verdict.with_context(|| format!("formula `{text}`"))?;
        failed += usize::from(!verdict.value);
        let mut row = to_value(verdict.doc(&model));
        row["formula"] = json!(text);
        rows.push(row);
    }
    report.result = json!({
        "state": model.state_name(s),
        "semantics": sem.semantics,
        "fairness": sem.fairness,
        "require_nonempty": require_nonempty,
        "epsilon_witness": epsilon_witness,
        "verdicts": rows,
    });
    let summary = if phis.len() == 1 {
        format!("{} at {}: {}", phis[0].0, model.state_name(s), failed == 0)
    } else {
        format!("{} of {} formulas hold at {}", phis.len() - failed, phis.len(), model.state_name(s))
    };
    Ok(Outcome {
        report,
        summary,
        violated: failed > 0,
    })
}

fn config(report: &mut RunReport, amas: &Amas, args: &PorArgs) -> Result<(Vec<(String, StateFormula)>, ReductionConfig)> {
    let phis = if args.formulas.inline.is_empty() && args.formulas.formula_file.is_none() {
        Vec::new()
    } else {
        formulas(report, amas, &args.formulas)?
    };
    let only: Vec<StateFormula> = phis.iter().map(|(_, f)| f.clone()).collect();
    let mut cfg = ReductionConfig::for_formulas(&only, args.c1_mode);
    cfg.coalition.extend(agents(amas, &args.coalition)?);
    for p in args.props.iter().filter(|p| !p.is_empty()) {
        cfg.props
            .insert(amas.prop_by_name(p).ok_or_else(|| anyhow!("unknown proposition `{p}`"))?);
    }
    Ok((phis, cfg))
}

fn config_doc(amas: &Amas, cfg: &ReductionConfig) -> serde_json::Value {
    json!({
        "coalition": cfg.coalition.iter().map(|&a| amas.agent(a).name()).collect::<Vec<_>>(),
        "props": cfg.props.iter().map(|&p| amas.prop_name(p)).collect::<Vec<_>>(),
        "c1_mode": cfg.c1_mode,
    })
}

pub fn reduce(mut report: RunReport, source: &str, args: &PorArgs, kind: ModelKind) -> Result<Outcome> {
    let amas = load(&mut report, source)?;
    let (_, cfg) = config(&mut report, &amas, args)?;
    let full = compose_model(&mut report, &amas, kind)?;
    let reduced = por::reduce(&full, &cfg)?;
    let indep = por::independence(&full, &cfg.coalition, &cfg.props);
    let conditions = json!({
        "c1": por::check_c1_all(&full, &reduced, &indep),
        "c2": por::check_c2(&full, &reduced, &indep),
        "c3": por::check_c3(&reduced),
    });
    let holds = conditions.as_object().expect("object").values().all(|v| v == true);
    let stats = reduced.stats(&full);
    let mut ample: Vec<_> = (0..reduced.model.num_states())
        .map(|s| {
            let events: BTreeSet<&str> = reduced.ample[s].iter().map(|&e| full.event_name(e)).collect();
            (
                reduced.model.state_name(s),
                json!({ "events": events, "fully_expanded": reduced.fully_expanded[s] }),
            )
        })
        .collect();
    ample.sort_by(|a, b| a.0.cmp(&b.0));
    report.result = json!({
        "config": config_doc(&amas, &cfg),
        "stats": to_value(stats),
        "conditions": conditions,
        "ample": ample.into_iter().collect::<serde_json::Map<_, _>>(),
        "model": to_value(reduced.model.to_doc()),
    });
    Ok(Outcome {
        report,
        summary: format!(
            "{} -> {} states, {} -> {} transitions{}",
            stats.full_states,
            stats.reduced_states,
            stats.full_transitions,
            stats.reduced_transitions,
            if holds { "" } else { "; C1-C3 violated" }
        ),
        violated: !holds,
    })
}

pub fn verify_reduction(
    mut report: RunReport,
    source: &str,
    args: &PorArgs,
    stutter_bound: Option<usize>,
    exec: Execution,
) -> Result<Outcome> {
    let amas = load(&mut report, source)?;
    let (phis, cfg) = config(&mut report, &amas, args)?;
    if phis.is_empty() {
        bail!("no formulas given (use --formula or --formula-file)");
    }
    let only: Vec<StateFormula> = phis.into_iter().map(|(_, f)| f).collect();
    let result = por::verify_reduction(&amas, &only, &cfg, stutter_bound, exec)?;
    let ok = result.ok();
    let summary = format!(
        "{} checks, {} disagreements{}",
        result.rows.len(),
        result.disagreements,
        if ok { "" } else { "; reduction is unsound here" }
    );
    report.result = to_value(result);
    Ok(Outcome {
        report,
        summary,
        violated: !ok,
    })
}

fn run_expectation(amas: &Amas, exp: &Expectation, exec: Execution) -> Result<(String, String, String)> {
    Ok(match exp {
        Expectation::Check {
            model,
            mode,
            fairness,
            state: at,
            formula,
            expected,
        } => {
            let m = build(amas, *model)?;
            let s = m.state_by_name(at)?;
            let phi = parse_formula(formula, amas)?;
            let sem = Semantics {
                mode: *mode,
                fairness: *fairness,
                ..Semantics::default()
            };
            let got = Checker::new(&m, sem).with_execution(exec).check(s, &phi)?.value;
            (
                format!("check {model} {mode} {fairness} {at} {formula}"),
                expected.to_string(),
                got.to_string(),
            )
        }
        Expectation::States { model, count } => (
            format!("states {model}"),
            count.to_string(),
            build(amas, *model)?.num_states().to_string(),
        ),
        Expectation::Epsilon { model, states } => {
            let mut want = states.clone();
            want.sort();
            (
                format!("epsilon {model}"),
                want.join(" "),
                ModelStats::of(&build(amas, *model)?).epsilon_states.join(" "),
            )
        }
    })
}

pub fn selftest(mut report: RunReport, exec: Execution) -> Result<Outcome> {
    let mut items = Vec::new();
    let mut failed = 0;
    let mut push = |model: &str, what: String, expected: String, got: String| {
        let pass = expected == got;
        failed += usize::from(!pass);
        items.push(json!({ "model": model, "item": what, "expected": expected, "got": got, "pass": pass }));
    };
    for (name, src) in bundled::all() {
        report.inputs.push(
            Input {
                name: name.to_string(),
                origin: "bundled",
                text: src.to_string(),
            }
            .digest(),
        );
        let amas = parse_amas(src).with_context(|| format!("bundled `{name}`"))?;
        let exps = bundled::expectations(src).map_err(|e| anyhow!("bundled `{name}`: {e}"))?;
        for exp in &exps {
            let (what, expected, got) = run_expectation(&amas, exp, exec)?;
            push(name, what, expected, got);
        }
    }
    let amas = parse_amas(&bundled::chains(3, 3))?;
    let full = build(&amas, ModelKind::Undeadlocked)?;
    let stats = por::reduce(&full, &ReductionConfig::default())?.stats(&full);
    push(
        "chains:3:3",
        "reduce undeadlocked".into(),
        "64 -> at most 10 states".into(),
        if stats.full_states == 64 && stats.reduced_states <= 10 {
            "64 -> at most 10 states".into()
        } else {
            format!("{} -> {} states", stats.full_states, stats.reduced_states)
        },
    );
    let total = items.len();
    report.result = json!({ "passed": total - failed, "failed": failed, "items": items });
    Ok(Outcome {
        report,
        summary: format!("selftest: {} of {total} passed", total - failed),
        violated: failed > 0,
    })
}

pub fn generate(
    mut report: RunReport,
    seed: u64,
    agents: usize,
    states: usize,
    events: usize,
    sync_degree: usize,
    raw: bool,
) -> Result<Outcome> {
    let params = GenParams {
        agents,
        states,
        events,
        sync_degree,
    };
    let amas = generate_random_amas(seed, params)?;
    let source = amas_core::amas::print_amas(&amas);
    let summary = format!("seed {seed}: {agents} agents, {} events", amas.events().len());
    if raw {
        let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), source.as_bytes());
        return ok(report, summary);
    }
    report.seed = Some(seed);
    report.result = json!({
        "agents": agents,
        "states": states,
        "events": events,
        "sync_degree": sync_degree,
        "source": source,
    });
    ok(report, summary)
}
