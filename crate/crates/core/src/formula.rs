//! Modal propositional formulas: the AST, Dyckhoff-style weight, and the
//! ASCII concrete syntax.
//!
//! Grammar (whitespace insignificant, `->` right-associative, `\/` and `/\`
//! left-associative):
//!
//! ```text
//! formula := imp
//! imp     := or ("->" imp)?
//! or      := and ("\/" and)*
//! and     := unary ("/\" unary)*
//! unary   := "[]" unary | "~" unary | atom
//! atom    := ident | "#" | "(" formula ")"
//! ident   := [a-z][a-zA-Z0-9_]*
//! ```
//!
//! `#` is falsum and `~a` is sugar for `a -> #`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A formula of the modal language with `□` as the only modality.
///
/// The derived `Ord` ranks constructors in declaration order and then
/// compares children left to right; variables compare by name. Multisets
/// rely on this order for their canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(Arc<str>),
    Bot,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Arc::from(name))
    }

    pub fn bot() -> Formula {
        Formula::Bot
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Arc::new(l), Arc::new(r))
    }

    pub fn boxed(body: Formula) -> Formula {
        Formula::Box(Arc::new(body))
    }

    /// `f -> #`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bot)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    pub fn is_boxed(&self) -> bool {
        matches!(self, Formula::Box(_))
    }

    /// The body of a boxed formula.
    pub fn unboxed(&self) -> Option<&Formula> {
        match self {
            Formula::Box(b) => Some(b),
            _ => None,
        }
    }

    /// Strips one top-level box if present.
    pub fn unbox_once(&self) -> &Formula {
        self.unboxed().unwrap_or(self)
    }

    /// Weight: atoms and `#` weigh 1, `\/` and `->` add 1, `/\` adds 2,
    /// `[]` adds 1.
    pub fn weight(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 1,
            Formula::Or(a, b) | Formula::Imp(a, b) => a.weight() + b.weight() + 1,
            Formula::And(a, b) => a.weight() + b.weight() + 2,
            Formula::Box(a) => a.weight() + 1,
        }
    }

    /// Height of the syntax tree; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Box(a) => 1 + a.depth(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Box(a) => a.collect_vars(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Simultaneous substitution of variables; unmapped variables stay.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Var(v) => map(v).unwrap_or_else(|| self.clone()),
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(a.substitute(map), b.substitute(map)),
            Formula::Or(a, b) => Formula::or(a.substitute(map), b.substitute(map)),
            Formula::Imp(a, b) => Formula::imp(a.substitute(map), b.substitute(map)),
            Formula::Box(a) => Formula::boxed(a.substitute(map)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Var(_) | Formula::Bot | Formula::Box(_) => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Var(v) => f.write_str(v)?,
            Formula::Bot => f.write_str("#")?,
            Formula::And(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" /\\ ")?;
                b.write_at(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" \\/ ")?;
                b.write_at(f, 3)?;
            }
            Formula::Imp(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" -> ")?;
                b.write_at(f, 1)?;
            }
            Formula::Box(a) => {
                f.write_str("[]")?;
                a.write_at(f, 4)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Canonical text of a formula with minimal parentheses.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    Hash,
    LParen,
    RParen,
    Arrow,
    Or,
    And,
    Box,
    Tilde,
    Comma,
    Turnstile,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Hash => f.write_str("`#`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Arrow => f.write_str("`->`"),
            Token::Or => f.write_str("`\\/`"),
            Token::And => f.write_str("`/\\`"),
            Token::Box => f.write_str("`[]`"),
            Token::Tilde => f.write_str("`~`"),
            Token::Comma => f.write_str("`,`"),
            Token::Turnstile => f.write_str("`=>`"),
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |position: usize, message: String| ParseError { position, message };
    while i < bytes.len() {
        let c = bytes[i];
        let two = bytes.get(i..i + 2);
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            b'#' => Token::Hash,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'~' => Token::Tilde,
            b',' => Token::Comma,
            _ => match two {
                Some(b"->") => Token::Arrow,
                Some(b"\\/") => Token::Or,
                Some(b"/\\") => Token::And,
                Some(b"[]") => Token::Box,
                Some(b"=>") => Token::Turnstile,
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(err(i, format!("unexpected character `{ch}`")));
                }
            },
        };
        let len = match tok {
            Token::Arrow | Token::Or | Token::And | Token::Box | Token::Turnstile => 2,
            _ => 1,
        };
        out.push((i, tok));
        i += len;
    }
    Ok(out)
}

/// Recursive-descent parser over a token slice. Shared with the sequent
/// parser, which adds `,` and `=>` on top.
pub(crate) struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(tokens: &'a [(usize, Token)], end: usize) -> Self {
        Parser { tokens, pos: 0, end }
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    pub(crate) fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { position: self.offset(), message: message.into() }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Token::Arrow) {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.bump();
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Token::Box) => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Some(Token::Tilde) => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Token::Ident(name)) => {
                let f = Formula::var(name);
                self.bump();
                Ok(f)
            }
            Some(Token::Hash) => {
                self.bump();
                Ok(Formula::Bot)
            }
            Some(Token::LParen) => {
                self.bump();
                let inner = self.formula()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

/// Parses a single formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser::new(&tokens, text.len());
    let f = p.formula()?;
    if !p.at_end() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}
