use std::fmt::Write;

use super::Amas;

/// Renders an AMAS in source form with explicit `choices` everywhere.
/// The auxiliary ε-agent is omitted, since ε cannot be written in source.
pub fn print_amas(amas: &Amas) -> String {
    let mut out = String::new();
    for decl in amas.to_decls() {
        let _ = writeln!(out, "agent {} {{", decl.name);
        if let Some(init) = &decl.init {
            let _ = writeln!(out, "  init: {init};");
        }
        for s in &decl.states {
            let _ = write!(out, "  state {} {{", s.name);
            if !s.props.is_empty() {
                let _ = write!(out, " props: [{}];", s.props.join(", "));
            }
            if let Some(choices) = &s.choices {
                let sets: Vec<String> = choices.iter().map(|c| format!("{{{}}}", c.join(", "))).collect();
                let _ = write!(out, " choices: [{}];", sets.join(", "));
            }
            for (e, t) in &s.transitions {
                let _ = write!(out, " on {e} -> {t};");
            }
            out.push_str(" }\n");
        }
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::parse_amas;
    use crate::bundled;

    #[test]
    fn bundled_models_round_trip() {
        for (name, src) in bundled::all() {
            let a = parse_amas(src).unwrap();
            let printed = print_amas(&a);
            let b = parse_amas(&printed).unwrap();
            assert_eq!(a.to_decls(), b.to_decls(), "{name}");
            assert_eq!(printed, print_amas(&b), "{name}");
        }
    }

    #[test]
    fn epsilon_agent_is_not_printed() {
        let a = parse_amas(bundled::VOTING).unwrap();
        let eps = a.add_epsilon_agent().unwrap();
        assert_eq!(print_amas(&a), print_amas(&eps));
    }
}
