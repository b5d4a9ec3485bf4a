//! Concrete syntax:
//!
//! ```text
//! imp   := or ("->" imp)?
//! or    := and ("|" and)*
//! and   := bin ("&" bin)*
//! bin   := unary (("U" | "R") bin)?
//! unary := ("!" | "X" | "F" | "G") unary | "<<" agents ">>" bin | atom
//! atom  := "true" | "false" | ident | "(" imp ")"
//! ```

use super::{FormulaError, PathFormula, StateFormula};
use crate::amas::Amas;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Open,
    Close,
    Comma,
    Eof,
}

/// Untyped syntax tree; typing into state/path formulas happens afterwards.
#[derive(Clone, Debug)]
enum Raw {
    True,
    False,
    Prop(String),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Next(Box<Raw>),
    Finally(Box<Raw>),
    Globally(Box<Raw>),
    Until(Box<Raw>, Box<Raw>),
    Release(Box<Raw>, Box<Raw>),
    Coalition(Vec<String>, Box<Raw>),
}

fn syntax(col: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let two = chars.get(i + 1).copied();
        let (tok, width) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '-' if two == Some('>') => (Tok::Implies, 2),
            '<' if two == Some('<') => (Tok::Open, 2),
            '>' if two == Some('>') => (Tok::Close, 2),
            c if c.is_alphanumeric() && c != 'ε' || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() && chars[j] != 'ε' || matches!(chars[j], '_' | '.' | '\'')) {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => return Err(syntax(col, format!("unexpected character `{other}`"))),
        };
        out.push((tok, col));
        i += width;
    }
    out.push((Tok::Eof, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn imp(&mut self) -> Result<Raw, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(Raw::Implies(Box::new(lhs), Box::new(self.imp()?)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Raw, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Raw::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Raw, FormulaError> {
        let mut lhs = self.bin()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Raw::And(Box::new(lhs), Box::new(self.bin()?));
        }
        Ok(lhs)
    }

    fn bin(&mut self) -> Result<Raw, FormulaError> {
        let lhs = self.unary()?;
        if self.is_keyword("U") {
            self.bump();
            return Ok(Raw::Until(Box::new(lhs), Box::new(self.bin()?)));
        }
        if self.is_keyword("R") {
            self.bump();
            return Ok(Raw::Release(Box::new(lhs), Box::new(self.bin()?)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Raw, FormulaError> {
        let col = self.col();
        match self.bump() {
            Tok::Not => Ok(Raw::Not(Box::new(self.unary()?))),
            Tok::Ident(s) if s == "X" => Ok(Raw::Next(Box::new(self.unary()?))),
            Tok::Ident(s) if s == "F" => Ok(Raw::Finally(Box::new(self.unary()?))),
            Tok::Ident(s) if s == "G" => Ok(Raw::Globally(Box::new(self.unary()?))),
            Tok::Ident(s) if s == "true" => Ok(Raw::True),
            Tok::Ident(s) if s == "false" => Ok(Raw::False),
            Tok::Ident(s) if s == "U" || s == "R" => {
                Err(syntax(col, format!("`{s}` needs a left operand")))
            }
            Tok::Ident(s) => Ok(Raw::Prop(s)),
            Tok::LParen => {
                let inner = self.imp()?;
                if self.bump() != Tok::RParen {
                    return Err(syntax(self.toks[self.pos.saturating_sub(1)].1, "expected `)`"));
                }
                Ok(inner)
            }
            Tok::Open => {
                let mut agents = Vec::new();
                loop {
                    let col = self.col();
                    match self.bump() {
                        Tok::Close => break,
                        Tok::Ident(a) => {
                            agents.push(a);
                            match self.bump() {
                                Tok::Comma => continue,
                                Tok::Close => break,
                                _ => return Err(syntax(self.toks[self.pos - 1].1, "expected `,` or `>>`")),
                            }
                        }
                        _ => return Err(syntax(col, "expected an agent name or `>>`")),
                    }
                }
                Ok(Raw::Coalition(agents, Box::new(self.bin()?)))
            }
            Tok::Eof => Err(syntax(col, "unexpected end of formula")),
            other => Err(syntax(col, format!("unexpected {other:?}"))),
        }
    }
}

fn is_state(r: &Raw) -> bool {
    match r {
        Raw::True | Raw::False | Raw::Prop(_) | Raw::Coalition(..) => true,
        Raw::Not(a) => is_state(a),
        Raw::And(a, b) | Raw::Or(a, b) | Raw::Implies(a, b) => is_state(a) && is_state(b),
        Raw::Next(_) | Raw::Finally(_) | Raw::Globally(_) | Raw::Until(..) | Raw::Release(..) => false,
    }
}

fn to_state(r: &Raw, amas: &Amas) -> Result<StateFormula, FormulaError> {
    use StateFormula as S;
    Ok(match r {
        Raw::True => S::True,
        Raw::False => S::not(S::True),
        Raw::Prop(p) => S::Prop(
            amas.prop_by_name(p)
                .ok_or_else(|| FormulaError::UnknownProp(p.clone()))?,
        ),
        Raw::Not(a) => S::not(to_state(a, amas)?),
        Raw::And(a, b) => S::and(to_state(a, amas)?, to_state(b, amas)?),
        Raw::Or(a, b) => S::not(S::and(S::not(to_state(a, amas)?), S::not(to_state(b, amas)?))),
        Raw::Implies(a, b) => S::not(S::and(to_state(a, amas)?, S::not(to_state(b, amas)?))),
        Raw::Coalition(names, body) => {
            let agents = names
                .iter()
                .map(|n| {
                    amas.agent_by_name(n)
                        .filter(|&a| !amas.agent(a).is_auxiliary())
                        .ok_or_else(|| FormulaError::UnknownAgent(n.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            S::coalition(agents, to_path(body, amas)?)
        }
        _ => return Err(FormulaError::TemporalOutsideModality),
    })
}

fn to_path(r: &Raw, amas: &Amas) -> Result<PathFormula, FormulaError> {
    use PathFormula as P;
    if is_state(r) {
        return Ok(P::state(to_state(r, amas)?));
    }
    Ok(match r {
        Raw::Not(a) => P::not(to_path(a, amas)?),
        Raw::And(a, b) => P::and(to_path(a, amas)?, to_path(b, amas)?),
        Raw::Or(a, b) => P::not(P::and(P::not(to_path(a, amas)?), P::not(to_path(b, amas)?))),
        Raw::Implies(a, b) => P::not(P::and(to_path(a, amas)?, P::not(to_path(b, amas)?))),
        Raw::Next(a) => P::next(to_path(a, amas)?),
        Raw::Finally(a) => P::eventually(to_path(a, amas)?),
        Raw::Globally(a) => P::globally(to_path(a, amas)?),
        Raw::Until(a, b) => P::until(to_path(a, amas)?, to_path(b, amas)?),
        Raw::Release(a, b) => P::release(to_path(a, amas)?, to_path(b, amas)?),
        _ => unreachable!("state formulas handled above"),
    })
}

/// Parses a state formula, resolving agent and proposition names in `amas`.
pub fn parse_formula(text: &str, amas: &Amas) -> Result<StateFormula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let raw = p.imp()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(p.col(), format!("unexpected {:?} after formula", p.peek())));
    }
    to_state(&raw, amas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amas::parse_amas;
    use crate::bundled;

    fn conf() -> Amas {
        parse_amas(bundled::CONFERENCE).unwrap()
    }

    #[test]
    fn coalition_and_globally() {
        let amas = conf();
        let f = parse_formula("<<gc,oc>> G !epid", &amas).unwrap();
        let epid = StateFormula::Prop(amas.prop_by_name("epid").unwrap());
        let expected = StateFormula::coalition(
            vec![amas.agent_by_name("oc").unwrap(), amas.agent_by_name("gc").unwrap()],
            PathFormula::globally(PathFormula::state(StateFormula::not(epid))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn eventually_examples() {
        let amas = conf();
        let f = parse_formula("<<sc>> F open", &amas).unwrap();
        let open = StateFormula::Prop(amas.prop_by_name("open").unwrap());
        assert_eq!(
            f,
            StateFormula::coalition(
                vec![amas.agent_by_name("sc").unwrap()],
                PathFormula::eventually(PathFormula::state(open))
            )
        );
        let voting = parse_amas(bundled::VOTING).unwrap();
        assert!(parse_formula("<<v>> F voted_a", &voting).is_ok());
    }

    #[test]
    fn precedence() {
        let amas = conf();
        // `<<A>>` binds at until level, so `&` ends its operand.
        let f = parse_formula("<<gc>> F open & epid", &amas).unwrap();
        assert!(matches!(f, StateFormula::And(..)));
        let g = parse_formula("<<gc>> (open U epid U closed)", &amas).unwrap();
        let h = parse_formula("<<gc>> (open U (epid U closed))", &amas).unwrap();
        assert_eq!(g, h);
        let i = parse_formula("open -> epid -> closed", &amas).unwrap();
        let j = parse_formula("open -> (epid -> closed)", &amas).unwrap();
        assert_eq!(i, j);
    }

    #[test]
    fn errors() {
        let amas = conf();
        assert_eq!(
            parse_formula("<<xx>> F open", &amas),
            Err(FormulaError::UnknownAgent("xx".into()))
        );
        assert_eq!(
            parse_formula("<<gc>> F nope", &amas),
            Err(FormulaError::UnknownProp("nope".into()))
        );
        assert_eq!(
            parse_formula("F open", &amas),
            Err(FormulaError::TemporalOutsideModality)
        );
        assert!(matches!(
            parse_formula("<<gc>> F (open", &amas),
            Err(FormulaError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("<<gc>> F open )", &amas),
            Err(FormulaError::Syntax { col: 15, .. })
        ));
    }

    #[test]
    fn empty_coalition() {
        let amas = conf();
        let f = parse_formula("<<>> G true", &amas).unwrap();
        assert!(matches!(f, StateFormula::Coalition(ref a, _) if a.is_empty()));
    }
}
