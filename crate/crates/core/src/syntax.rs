//! Abstract syntax, parser and printer for finite asynchronous CCS terms.
//!
//! Concrete syntax:
//!
//! ```text
//! term   := sum ;
//! sum    := par { "+" par } ;
//! par    := prefix { "|" prefix } ;
//! prefix := "0" | "'" ident [ "." "0" ] | ("tau" | ident) "." prefix | "(" term ")" ;
//! ident  := letter { letter | digit | "_" } ;
//! ```
//!
//! `+` binds loosest, then `|`, then prefixing. Both binary operators are
//! left-associative. An output may also be written `'c.0`; it has no other
//! continuation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// A channel name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid channel name {0:?}")]
pub struct InvalidChannel(pub String);

impl Channel {
    pub fn new(name: &str) -> Result<Self, InvalidChannel> {
        if is_identifier(name) && name != "tau" {
            Ok(Channel(Arc::from(name)))
        } else {
            Err(InvalidChannel(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Channel {
    type Err = InvalidChannel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Channel::new(s)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite CCS agent.
///
/// Equality, hashing and ordering are structural: `P | 0` and `P` are
/// different terms. Subterms are reference counted so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Nil,
    Tau(Arc<Process>),
    Input(Channel, Arc<Process>),
    Output(Channel),
    Par(Arc<Process>, Arc<Process>),
    Sum(Arc<Process>, Arc<Process>),
}

impl Process {
    pub fn nil() -> Self {
        Process::Nil
    }

    pub fn tau(cont: Process) -> Self {
        Process::Tau(Arc::new(cont))
    }

    pub fn input(chan: Channel, cont: Process) -> Self {
        Process::Input(chan, Arc::new(cont))
    }

    pub fn output(chan: Channel) -> Self {
        Process::Output(chan)
    }

    pub fn par(left: Process, right: Process) -> Self {
        Process::Par(Arc::new(left), Arc::new(right))
    }

    pub fn sum(left: Process, right: Process) -> Self {
        Process::Sum(Arc::new(left), Arc::new(right))
    }

    /// Every channel occurring in input or output position.
    pub fn channels(&self) -> BTreeSet<Channel> {
        let mut out = BTreeSet::new();
        self.collect_channels(&mut out);
        out
    }

    fn collect_channels(&self, out: &mut BTreeSet<Channel>) {
        match self {
            Process::Nil => {}
            Process::Tau(p) => p.collect_channels(out),
            Process::Input(c, p) => {
                out.insert(c.clone());
                p.collect_channels(out);
            }
            Process::Output(c) => {
                out.insert(c.clone());
            }
            Process::Par(p, q) | Process::Sum(p, q) => {
                p.collect_channels(out);
                q.collect_channels(out);
            }
        }
    }

    /// `(n_active, n_out)`: the number of `Tau`/`Input` prefixes and the
    /// number of `Output` atoms. Every transition of the operational and
    /// dialgebraic semantics strictly decreases this pair lexicographically.
    pub fn prefix_measure(&self) -> PrefixMeasure {
        match self {
            Process::Nil => PrefixMeasure::default(),
            Process::Tau(p) | Process::Input(_, p) => {
                let m = p.prefix_measure();
                PrefixMeasure { n_active: m.n_active + 1, ..m }
            }
            Process::Output(_) => PrefixMeasure { n_active: 0, n_out: 1 },
            Process::Par(p, q) | Process::Sum(p, q) => {
                let (a, b) = (p.prefix_measure(), q.prefix_measure());
                PrefixMeasure {
                    n_active: a.n_active + b.n_active,
                    n_out: a.n_out + b.n_out,
                }
            }
        }
    }

    /// Number of constructors in the term.
    pub fn size(&self) -> usize {
        match self {
            Process::Nil | Process::Output(_) => 1,
            Process::Tau(p) | Process::Input(_, p) => 1 + p.size(),
            Process::Par(p, q) | Process::Sum(p, q) => 1 + p.size() + q.size(),
        }
    }

    /// Canonical, minimally parenthesized concrete syntax.
    pub fn render(&self) -> String {
        self.to_string()
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        let own = match self {
            Process::Sum(..) => 0,
            Process::Par(..) => 1,
            _ => 2,
        };
        if own < level {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Process::Nil => f.write_str("0"),
            Process::Tau(p) => {
                f.write_str("tau.")?;
                p.write_at(f, 2)
            }
            Process::Input(c, p) => {
                write!(f, "{c}.")?;
                p.write_at(f, 2)
            }
            Process::Output(c) => write!(f, "'{c}"),
            Process::Par(p, q) => {
                p.write_at(f, 1)?;
                f.write_str(" | ")?;
                q.write_at(f, 2)
            }
            Process::Sum(p, q) => {
                p.write_at(f, 0)?;
                f.write_str(" + ")?;
                q.write_at(f, 1)
            }
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

// Debug output is the constructor tree, e.g. `Sum(Input(a, Nil), Tau(Nil))`.
impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Nil => f.write_str("Nil"),
            Process::Tau(p) => write!(f, "Tau({p:?})"),
            Process::Input(c, p) => write!(f, "Input({c}, {p:?})"),
            Process::Output(c) => write!(f, "Output({c})"),
            Process::Par(p, q) => write!(f, "Par({p:?}, {q:?})"),
            Process::Sum(p, q) => write!(f, "Sum({p:?}, {q:?})"),
        }
    }
}

impl FromStr for Process {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixMeasure {
    pub n_active: usize,
    pub n_out: usize,
}

/// A syntax error, positioned at the offending token (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Zero,
    Tau,
    Ident(String),
    Quote,
    Dot,
    Plus,
    Bar,
    LParen,
    RParen,
    Eof,
    Bad(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Zero => "\"0\"".into(),
            Tok::Tau => "\"tau\"".into(),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Quote => "\"'\"".into(),
            Tok::Dot => "\".\"".into(),
            Tok::Plus => "\"+\"".into(),
            Tok::Bar => "\"|\"".into(),
            Tok::LParen => "\"(\"".into(),
            Tok::RParen => "\")\"".into(),
            Tok::Eof => "end of input".into(),
            Tok::Bad(c) => format!("character {c:?}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() {
            let mut ident = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    ident.push(d);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            if ident == "tau" {
                Tok::Tau
            } else {
                Tok::Ident(ident)
            }
        } else {
            chars.next();
            column += 1;
            match c {
                '0' => Tok::Zero,
                '\'' => Tok::Quote,
                '.' => Tok::Dot,
                '+' => Tok::Plus,
                '|' => Tok::Bar,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => Tok::Bad(other),
            }
        };
        out.push(Spanned { tok, line: l, column: col });
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    out
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

const PREFIX_START: &[&str] = &["\"0\"", "\"'\"", "\"tau\"", "identifier", "\"(\""];

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn term(&mut self) -> Result<Process, ParseError> {
        let mut acc = self.par()?;
        while self.peek().tok == Tok::Plus {
            self.bump();
            acc = Process::sum(acc, self.par()?);
        }
        Ok(acc)
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut acc = self.prefix()?;
        while self.peek().tok == Tok::Bar {
            self.bump();
            acc = Process::par(acc, self.prefix()?);
        }
        Ok(acc)
    }

    fn expect_dot(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Dot {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&["\".\""]))
        }
    }

    fn prefix(&mut self) -> Result<Process, ParseError> {
        match self.peek().tok.clone() {
            Tok::Zero => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::Quote => {
                self.bump();
                match self.peek().tok.clone() {
                    Tok::Ident(name) => {
                        self.bump();
                        // `'c.0` is accepted as a spelling of `'c`
                        if self.peek().tok == Tok::Dot {
                            self.bump();
                            if self.peek().tok != Tok::Zero {
                                return Err(self.error(&["\"0\""]));
                            }
                            self.bump();
                        }
                        Ok(Process::Output(Channel(Arc::from(name.as_str()))))
                    }
                    _ => Err(self.error(&["identifier"])),
                }
            }
            Tok::Tau => {
                self.bump();
                self.expect_dot()?;
                Ok(Process::tau(self.prefix()?))
            }
            Tok::Ident(name) => {
                self.bump();
                self.expect_dot()?;
                let chan = Channel(Arc::from(name.as_str()));
                Ok(Process::input(chan, self.prefix()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                if self.peek().tok == Tok::RParen {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.error(&["\"+\"", "\"|\"", "\")\""]))
                }
            }
            _ => Err(self.error(PREFIX_START)),
        }
    }
}

/// Parses a term. Whitespace between tokens is ignored.
pub fn parse(text: &str) -> Result<Process, ParseError> {
    let mut parser = Parser { toks: lex(text), pos: 0 };
    let p = parser.term()?;
    if parser.peek().tok != Tok::Eof {
        return Err(parser.error(&["\"+\"", "\"|\"", "end of input"]));
    }
    Ok(p)
}
