//! Text formats: `.pd` rule files and ASPARTIX-style `.aaf` graphs.
//!
//! ```text
//! # p-rules
//! GoodExamScore <- HardStudy : 0.8.
//! ~Admission <- ~ExtraExp : 0.7.
//! HighIQ <- : 0.5.
//! ```
//!
//! ```text
//! arg(a). arg(b).
//! att(a,b).
//! ```

use std::fmt;

use thiserror::Error;

use crate::model::{Literal, PDFramework, PRule};

/// 1-based line and column plus byte offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Tilde,
    Arrow,
    Comma,
    Colon,
    Dot,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("name `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Tilde => "`~`".into(),
            Tok::Arrow => "`<-`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
    /// Identifiers may start with a digit (AA argument names).
    digit_names: bool,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, digit_names: bool) -> Self {
        Lexer { src, pos: 0, line: 1, column: 1, digit_names }
    }

    fn span(&self) -> SourceSpan {
        SourceSpan { line: self.line, column: self.column, offset: self.pos }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' || c == '%' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }

    fn next(&mut self) -> Result<Option<(Tok, SourceSpan)>, ParseError> {
        self.skip_trivia();
        let span = self.span();
        let Some(c) = self.peek() else { return Ok(None) };
        let name_char = |c: char| c.is_ascii_alphanumeric() || c == '_';
        let tok = match c {
            '~' => {
                self.bump();
                Tok::Tilde
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            ':' => {
                self.bump();
                Tok::Colon
            }
            '(' => {
                self.bump();
                Tok::LParen
            }
            ')' => {
                self.bump();
                Tok::RParen
            }
            '<' => {
                self.bump();
                if self.peek() == Some('-') {
                    self.bump();
                    Tok::Arrow
                } else {
                    return Err(ParseError::new(span, "expected `<-`"));
                }
            }
            '.' if self.peek2().is_some_and(|d| d.is_ascii_digit()) && !self.digit_names => {
                self.bump();
                let frac = self.take_while(|d| d.is_ascii_digit());
                Tok::Number(format!("0.{frac}"))
            }
            '.' => {
                self.bump();
                Tok::Dot
            }
            c if c.is_ascii_digit() && !self.digit_names => {
                let mut text = self.take_while(|d| d.is_ascii_digit());
                if self.peek() == Some('.') && self.peek2().is_some_and(|d| d.is_ascii_digit()) {
                    self.bump();
                    text.push('.');
                    text.push_str(&self.take_while(|d| d.is_ascii_digit()));
                }
                Tok::Number(text)
            }
            c if c.is_ascii_alphabetic() || c == '_' || (self.digit_names && c.is_ascii_digit()) => {
                Tok::Ident(self.take_while(name_char))
            }
            other => {
                return Err(ParseError::new(span, format!("unexpected character `{other}`")));
            }
        };
        Ok(Some((tok, span)))
    }
}

struct Tokens {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: SourceSpan,
}

impl Tokens {
    fn lex(src: &str, digit_names: bool) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src, digit_names);
        let mut toks = Vec::new();
        while let Some(t) = lexer.next()? {
            toks.push(t);
        }
        Ok(Tokens { toks, pos: 0, end: lexer.span() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|(_, s)| *s).unwrap_or(self.end)
    }

    fn next(&mut self, what: &str) -> Result<(Tok, SourceSpan), ParseError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(ParseError::new(self.end, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        let (tok, span) = self.next(what)?;
        if tok == want {
            Ok(span)
        } else {
            Err(ParseError::new(span, format!("expected {what}, found {}", tok.describe())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.next(what)? {
            (Tok::Ident(s), span) => Ok((s, span)),
            (tok, span) => Err(ParseError::new(span, format!("expected {what}, found {}", tok.describe()))),
        }
    }
}

fn parse_literal(toks: &mut Tokens, fw: &mut PDFramework) -> Result<Literal, ParseError> {
    let positive = if toks.peek() == Some(&Tok::Tilde) {
        toks.next("`~`")?;
        false
    } else {
        true
    };
    let (name, _) = toks.ident("a literal")?;
    Ok(Literal { atom: fw.intern(&name), positive })
}

/// Parses a `.pd` document. Atoms are numbered in order of first appearance.
pub fn parse_pd(text: &str) -> Result<PDFramework, ParseError> {
    let mut toks = Tokens::lex(text, false)?;
    let mut fw = PDFramework::new();
    while toks.peek().is_some() {
        let start = toks.span();
        let head = parse_literal(&mut toks, &mut fw)?;
        toks.expect(Tok::Arrow, "`<-`")?;
        let mut body = Vec::new();
        if toks.peek() != Some(&Tok::Colon) {
            body.push(parse_literal(&mut toks, &mut fw)?);
            while toks.peek() == Some(&Tok::Comma) {
                toks.next("`,`")?;
                body.push(parse_literal(&mut toks, &mut fw)?);
            }
        }
        toks.expect(Tok::Colon, "`:`")?;
        let theta = match toks.next("a probability")? {
            (Tok::Number(s), span) => {
                let v: f64 = s.parse().map_err(|_| ParseError::new(span, format!("bad number `{s}`")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(ParseError::new(span, format!("probability {s} is outside [0, 1]")));
                }
                v
            }
            (tok, span) => {
                return Err(ParseError::new(span, format!("expected a probability, found {}", tok.describe())))
            }
        };
        toks.expect(Tok::Dot, "`.` ending the rule")?;
        let rule = PRule::new(head, body, theta).map_err(|e| ParseError::new(start, e.to_string()))?;
        fw.rules.push(rule);
    }
    Ok(fw)
}

/// Writes `theta` with at most six significant digits and no exponent.
fn format_theta(theta: f64) -> String {
    let rounded: f64 = format!("{theta:.5e}").parse().unwrap_or(theta);
    format!("{rounded}")
}

/// One rule per line; the inverse of [`parse_pd`] on frameworks whose atoms
/// all occur in rules, in first-appearance order.
pub fn serialize_pd(fw: &PDFramework) -> String {
    let mut out = String::new();
    for rule in &fw.rules {
        let body: Vec<String> = rule.body.iter().map(|l| fw.literal_name(*l)).collect();
        let sep = if body.is_empty() { "" } else { " " };
        out.push_str(&format!(
            "{} <- {}{sep}: {}.\n",
            fw.literal_name(rule.head),
            body.join(", "),
            format_theta(rule.theta)
        ));
    }
    out
}

/// Abstract argumentation graph; attacks are index pairs `(attacker, attacked)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AAGraph {
    pub arguments: Vec<String>,
    pub attacks: Vec<(usize, usize)>,
}

impl AAGraph {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.arguments.iter().position(|a| a == name)
    }

    /// Attackers of `arg` in argument declaration order.
    pub fn attackers(&self, arg: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.attacks.iter().filter(|(_, b)| *b == arg).map(|(a, _)| *a).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn parse_aa(text: &str) -> Result<AAGraph, ParseError> {
    let mut toks = Tokens::lex(text, true)?;
    let mut graph = AAGraph::default();
    let mut pending: Vec<(String, String, SourceSpan)> = Vec::new();
    while toks.peek().is_some() {
        let (kw, span) = toks.ident("`arg` or `att`")?;
        toks.expect(Tok::LParen, "`(`")?;
        match kw.as_str() {
            "arg" => {
                let (name, nspan) = toks.ident("an argument name")?;
                if graph.index(&name).is_some() {
                    return Err(ParseError::new(nspan, format!("argument `{name}` declared twice")));
                }
                graph.arguments.push(name);
            }
            "att" => {
                let (a, _) = toks.ident("an argument name")?;
                toks.expect(Tok::Comma, "`,`")?;
                let (b, _) = toks.ident("an argument name")?;
                pending.push((a, b, span));
            }
            other => return Err(ParseError::new(span, format!("unknown statement `{other}`"))),
        }
        toks.expect(Tok::RParen, "`)`")?;
        toks.expect(Tok::Dot, "`.`")?;
    }
    for (a, b, span) in pending {
        let resolve = |n: &str| {
            graph
                .index(n)
                .ok_or_else(|| ParseError::new(span, format!("attack refers to undeclared argument `{n}`")))
        };
        let edge = (resolve(&a)?, resolve(&b)?);
        if !graph.attacks.contains(&edge) {
            graph.attacks.push(edge);
        }
    }
    Ok(graph)
}

pub fn serialize_aa(graph: &AAGraph) -> String {
    let mut out = String::new();
    for a in &graph.arguments {
        out.push_str(&format!("arg({a}).\n"));
    }
    for &(a, b) in &graph.attacks {
        out.push_str(&format!("att({},{}).\n", graph.arguments[a], graph.arguments[b]));
    }
    out
}
