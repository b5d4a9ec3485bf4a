//! Reader for the `.amas` source format.
//!
//! ```text
//! agent <name> {
//!   init: <state>;
//!   state <s> { props: [p, q]; choices: [{e1, e2}, {e3}]; on e1 -> <t>; }
//! }
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use thiserror::Error;

use super::{AgentDecl, Amas, StateDecl, ValidationError, ValidationOptions, EPSILON};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmasError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("invalid AMAS: {0}")]
    Validation(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(char),
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.' || c == '\''
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, col: usize, message: impl Into<String>) -> AmasError {
        AmasError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, AmasError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c == '#' {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                '{' | '}' | '[' | ']' | ':' | ';' | ',' => Tok::Sym(c),
                '-' => {
                    if self.chars.peek() == Some(&'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err(self.error(line, col, "expected `->`"));
                    }
                }
                c if c.to_string() == EPSILON => {
                    return Err(self.error(line, col, "`ε` is reserved for the silent event"));
                }
                c if is_ident_char(c) => {
                    let mut s = String::from(c);
                    while let Some(&n) = self.chars.peek() {
                        if n.to_string() == EPSILON {
                            return Err(self.error(
                                self.line,
                                self.col,
                                "`ε` is reserved for the silent event",
                            ));
                        }
                        if !is_ident_char(n) {
                            break;
                        }
                        s.push(n);
                        self.bump();
                    }
                    Tok::Ident(s)
                }
                other => return Err(self.error(line, col, format!("unexpected character `{other}`"))),
            };
            out.push((tok, line, col));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> AmasError {
        let (_, line, col) = self.toks[self.pos];
        AmasError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), AmasError> {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", self.peek().describe())))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, AmasError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.error(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), AmasError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            other => Err(self.error(format!("expected `{kw}`, found {}", other.describe()))),
        }
    }

    /// Comma-separated identifiers up to (not including) `close`.
    fn ident_list(&mut self, close: char, what: &str) -> Result<Vec<String>, AmasError> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Sym(close) {
            items.push(self.ident(what)?);
            if !self.eat_sym(',') {
                break;
            }
        }
        Ok(items)
    }

    fn file(&mut self) -> Result<Vec<AgentDecl>, AmasError> {
        let mut agents = Vec::new();
        while *self.peek() != Tok::Eof {
            agents.push(self.agent()?);
        }
        Ok(agents)
    }

    fn agent(&mut self) -> Result<AgentDecl, AmasError> {
        self.keyword("agent")?;
        let name = self.ident("agent name")?;
        self.expect_sym('{')?;
        let mut decl = AgentDecl {
            name,
            ..AgentDecl::default()
        };
        loop {
            match self.peek().clone() {
                Tok::Sym('}') => {
                    self.next();
                    return Ok(decl);
                }
                Tok::Ident(kw) if kw == "init" => {
                    if decl.init.is_some() {
                        return Err(self.error("duplicate `init`"));
                    }
                    self.next();
                    self.expect_sym(':')?;
                    decl.init = Some(self.ident("state name")?);
                    self.expect_sym(';')?;
                }
                Tok::Ident(kw) if kw == "state" => {
                    self.next();
                    decl.states.push(self.state()?);
                }
                other => {
                    return Err(self.error(format!(
                        "expected `init`, `state` or `}}`, found {}",
                        other.describe()
                    )))
                }
            }
        }
    }

    fn state(&mut self) -> Result<StateDecl, AmasError> {
        let name = self.ident("state name")?;
        self.expect_sym('{')?;
        let mut decl = StateDecl {
            name,
            ..StateDecl::default()
        };
        loop {
            match self.peek().clone() {
                Tok::Sym('}') => {
                    self.next();
                    return Ok(decl);
                }
                Tok::Ident(kw) if kw == "props" => {
                    self.next();
                    self.expect_sym(':')?;
                    self.expect_sym('[')?;
                    decl.props.extend(self.ident_list(']', "proposition")?);
                    self.expect_sym(']')?;
                    self.expect_sym(';')?;
                }
                Tok::Ident(kw) if kw == "choices" => {
                    if decl.choices.is_some() {
                        return Err(self.error("duplicate `choices`"));
                    }
                    self.next();
                    self.expect_sym(':')?;
                    self.expect_sym('[')?;
                    let mut choices = Vec::new();
                    while *self.peek() == Tok::Sym('{') {
                        self.next();
                        choices.push(self.ident_list('}', "event")?);
                        self.expect_sym('}')?;
                        if !self.eat_sym(',') {
                            break;
                        }
                    }
                    self.expect_sym(']')?;
                    self.expect_sym(';')?;
                    decl.choices = Some(choices);
                }
                Tok::Ident(kw) if kw == "on" => {
                    self.next();
                    let event = self.ident("event")?;
                    if *self.peek() != Tok::Arrow {
                        return Err(self.error(format!(
                            "expected `->`, found {}",
                            self.peek().describe()
                        )));
                    }
                    self.next();
                    let target = self.ident("target state")?;
                    self.expect_sym(';')?;
                    decl.transitions.push((event, target));
                }
                other => {
                    return Err(self.error(format!(
                        "expected `props`, `choices`, `on` or `}}`, found {}",
                        other.describe()
                    )))
                }
            }
        }
    }
}

/// Parses source text into declarations without validating them.
pub fn parse_decls(text: &str) -> Result<Vec<AgentDecl>, AmasError> {
    let toks = Lexer::new(text).tokens()?;
    Parser { toks, pos: 0 }.file()
}

pub fn parse_amas(text: &str) -> Result<Amas, AmasError> {
    parse_amas_with(text, &ValidationOptions::default())
}

pub fn parse_amas_with(text: &str, options: &ValidationOptions) -> Result<Amas, AmasError> {
    Ok(Amas::with_options(parse_decls(text)?, options)?)
}
