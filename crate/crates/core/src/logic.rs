//! Statement-level logic: negation pushed through connectives and
//! quantifiers, converse and contrapositive.
//!
//! Statements serialize as a nested prefix notation:
//!
//! ```text
//! stmt := SYMBOL
//!       | "(" "atom" SYMBOL STRING ")"
//!       | "(" "not" stmt ")"
//!       | "(" ("and" | "or") stmt stmt+ ")"
//!       | "(" ("implies" | "iff") stmt stmt ")"
//!       | "(" ("forall" | "exists") SYMBOL STRING stmt ")"
//! ```
//!
//! Quantifier domains are opaque text; statements with quantifiers are not
//! evaluated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogicStatement {
    Atom {
        label: String,
        text: String,
    },
    Not(Box<LogicStatement>),
    And(Vec<LogicStatement>),
    Or(Vec<LogicStatement>),
    Implies(Box<LogicStatement>, Box<LogicStatement>),
    Iff(Box<LogicStatement>, Box<LogicStatement>),
    ForAll {
        var: String,
        domain: String,
        body: Box<LogicStatement>,
    },
    Exists {
        var: String,
        domain: String,
        body: Box<LogicStatement>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("statement is not an implication")]
    NotAnImplication,
    #[error("at offset {position}: {message}")]
    Syntax { position: usize, message: String },
}

use LogicStatement as S;

impl LogicStatement {
    pub fn atom(label: &str) -> Self {
        S::Atom {
            label: label.to_string(),
            text: String::new(),
        }
    }

    pub fn atom_with_text(label: &str, text: &str) -> Self {
        S::Atom {
            label: label.to_string(),
            text: text.to_string(),
        }
    }

    /// Negation without pushing inwards, collapsing a double `not`.
    pub fn not(s: LogicStatement) -> Self {
        match s {
            S::Not(inner) => *inner,
            other => S::Not(Box::new(other)),
        }
    }

    pub fn and(parts: Vec<LogicStatement>) -> Self {
        Self::flatten(parts, true)
    }

    pub fn or(parts: Vec<LogicStatement>) -> Self {
        Self::flatten(parts, false)
    }

    fn flatten(parts: Vec<LogicStatement>, conj: bool) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match (p, conj) {
                (S::And(inner), true) | (S::Or(inner), false) => flat.extend(inner),
                (other, _) => flat.push(other),
            }
        }
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        if conj {
            S::And(flat)
        } else {
            S::Or(flat)
        }
    }

    pub fn implies(h: LogicStatement, c: LogicStatement) -> Self {
        S::Implies(Box::new(h), Box::new(c))
    }

    pub fn iff(a: LogicStatement, b: LogicStatement) -> Self {
        S::Iff(Box::new(a), Box::new(b))
    }

    pub fn for_all(var: &str, domain: &str, body: LogicStatement) -> Self {
        S::ForAll {
            var: var.to_string(),
            domain: domain.to_string(),
            body: Box::new(body),
        }
    }

    pub fn exists(var: &str, domain: &str, body: LogicStatement) -> Self {
        S::Exists {
            var: var.to_string(),
            domain: domain.to_string(),
            body: Box::new(body),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            S::Atom { .. } => true,
            S::Not(s) => s.is_quantifier_free(),
            S::And(xs) | S::Or(xs) => xs.iter().all(Self::is_quantifier_free),
            S::Implies(a, b) | S::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            S::ForAll { .. } | S::Exists { .. } => false,
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            S::Atom { label, .. } => {
                out.insert(label.clone());
            }
            S::Not(s) => s.collect_atoms(out),
            S::And(xs) | S::Or(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            S::Implies(a, b) | S::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            S::ForAll { body, .. } | S::Exists { body, .. } => body.collect_atoms(out),
        }
    }

    /// Truth value under an assignment of atom labels. `None` for quantified
    /// statements or unassigned atoms.
    pub fn evaluate(&self, assignment: &BTreeMap<String, bool>) -> Option<bool> {
        Some(match self {
            S::Atom { label, .. } => *assignment.get(label)?,
            S::Not(s) => !s.evaluate(assignment)?,
            S::And(xs) => {
                let mut v = true;
                for x in xs {
                    v &= x.evaluate(assignment)?;
                }
                v
            }
            S::Or(xs) => {
                let mut v = false;
                for x in xs {
                    v |= x.evaluate(assignment)?;
                }
                v
            }
            S::Implies(a, b) => !a.evaluate(assignment)? || b.evaluate(assignment)?,
            S::Iff(a, b) => a.evaluate(assignment)? == b.evaluate(assignment)?,
            S::ForAll { .. } | S::Exists { .. } => return None,
        })
    }

    /// Removes directly stacked negations everywhere.
    pub fn normalize(&self) -> LogicStatement {
        match self {
            S::Atom { .. } => self.clone(),
            S::Not(inner) => S::not(inner.normalize()),
            S::And(xs) => S::and(xs.iter().map(Self::normalize).collect()),
            S::Or(xs) => S::or(xs.iter().map(Self::normalize).collect()),
            S::Implies(a, b) => S::implies(a.normalize(), b.normalize()),
            S::Iff(a, b) => S::iff(a.normalize(), b.normalize()),
            S::ForAll { var, domain, body } => S::for_all(var, domain, body.normalize()),
            S::Exists { var, domain, body } => S::exists(var, domain, body.normalize()),
        }
    }

    pub fn hypothesis(&self) -> Option<&LogicStatement> {
        match self {
            S::Implies(h, _) => Some(h),
            _ => None,
        }
    }

    pub fn conclusion(&self) -> Option<&LogicStatement> {
        match self {
            S::Implies(_, c) => Some(c),
            _ => None,
        }
    }
}

/// Negation in pushed-in form: quantifiers are dualised, De Morgan is
/// applied to conjunctions and disjunctions, `¬(A → B)` becomes `A ∧ ¬B`,
/// `¬(A ↔ B)` becomes `A ↔ ¬B`, and double negations vanish.
pub fn negate(s: &LogicStatement) -> LogicStatement {
    match s {
        S::Atom { .. } => S::Not(Box::new(s.clone())),
        S::Not(inner) => inner.normalize(),
        S::And(xs) => S::or(xs.iter().map(negate).collect()),
        S::Or(xs) => S::and(xs.iter().map(negate).collect()),
        S::Implies(a, b) => S::and(vec![a.normalize(), negate(b)]),
        S::Iff(a, b) => S::iff(a.normalize(), negate(b)),
        S::ForAll { var, domain, body } => S::exists(var, domain, negate(body)),
        S::Exists { var, domain, body } => S::for_all(var, domain, negate(body)),
    }
}

/// `A → B` becomes `¬B → ¬A`, with both negations pushed in.
pub fn contrapositive(s: &LogicStatement) -> Result<LogicStatement, LogicError> {
    match s {
        S::Implies(h, c) => Ok(S::implies(negate(c), negate(h))),
        _ => Err(LogicError::NotAnImplication),
    }
}

/// `A → B` becomes `B → A`.
pub fn converse(s: &LogicStatement) -> Result<LogicStatement, LogicError> {
    match s {
        S::Implies(h, c) => Ok(S::implies((**c).clone(), (**h).clone())),
        _ => Err(LogicError::NotAnImplication),
    }
}

/// `A → B` becomes `¬A → ¬B`. Used only as a distractor.
pub fn inverse(s: &LogicStatement) -> Result<LogicStatement, LogicError> {
    match s {
        S::Implies(h, c) => Ok(S::implies(negate(h), negate(c))),
        _ => Err(LogicError::NotAnImplication),
    }
}

// ---------------------------------------------------------------------------
// prefix notation

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn is_symbol_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')' && c != '"'
}

fn write_prefix(s: &LogicStatement, out: &mut String) {
    match s {
        S::Atom { label, text } if text.is_empty() => out.push_str(label),
        S::Atom { label, text } => {
            out.push_str("(atom ");
            out.push_str(label);
            out.push(' ');
            out.push_str(&quote(text));
            out.push(')');
        }
        S::Not(inner) => {
            out.push_str("(not ");
            write_prefix(inner, out);
            out.push(')');
        }
        S::And(xs) | S::Or(xs) => {
            out.push_str(if matches!(s, S::And(_)) {
                "(and"
            } else {
                "(or"
            });
            for x in xs {
                out.push(' ');
                write_prefix(x, out);
            }
            out.push(')');
        }
        S::Implies(a, b) | S::Iff(a, b) => {
            out.push_str(if matches!(s, S::Implies(..)) {
                "(implies "
            } else {
                "(iff "
            });
            write_prefix(a, out);
            out.push(' ');
            write_prefix(b, out);
            out.push(')');
        }
        S::ForAll { var, domain, body } | S::Exists { var, domain, body } => {
            out.push_str(if matches!(s, S::ForAll { .. }) {
                "(forall "
            } else {
                "(exists "
            });
            out.push_str(var);
            out.push(' ');
            out.push_str(&quote(domain));
            out.push(' ');
            write_prefix(body, out);
            out.push(')');
        }
    }
}

impl LogicStatement {
    pub fn to_prefix(&self) -> String {
        let mut out = String::new();
        write_prefix(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Sym(String),
    Str(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Tok::Open, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::Close, i));
                i += 1;
            }
            '"' => {
                let start = i;
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(LogicError::Syntax {
                                position: start,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') if i + 1 < chars.len() => {
                            s.push(chars[i + 1]);
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push((Tok::Str(s), start));
            }
            _ => {
                let start = i;
                while i < chars.len() && is_symbol_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Sym(chars[start..i].iter().collect()), start));
            }
        }
    }
    Ok(out)
}

struct PrefixParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl PrefixParser {
    fn err<T>(&self, message: &str) -> Result<T, LogicError> {
        let position = self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.len);
        Err(LogicError::Syntax {
            position,
            message: message.to_string(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn symbol(&mut self) -> Result<String, LogicError> {
        match self.peek() {
            Some(Tok::Sym(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a symbol"),
        }
    }

    fn string(&mut self) -> Result<String, LogicError> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a quoted string"),
        }
    }

    fn close(&mut self) -> Result<(), LogicError> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err("expected `)`"),
        }
    }

    fn statement(&mut self) -> Result<LogicStatement, LogicError> {
        match self.peek() {
            Some(Tok::Sym(_)) => {
                let label = self.symbol()?;
                Ok(S::atom(&label))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let head = self.symbol()?;
                let stmt = match head.as_str() {
                    "atom" => {
                        let label = self.symbol()?;
                        let text = self.string()?;
                        S::atom_with_text(&label, &text)
                    }
                    "not" => S::Not(Box::new(self.statement()?)),
                    "and" | "or" => {
                        let mut parts = vec![self.statement()?];
                        while !matches!(self.peek(), Some(Tok::Close) | None) {
                            parts.push(self.statement()?);
                        }
                        if parts.len() < 2 {
                            return self.err("`and`/`or` need at least two operands");
                        }
                        if head == "and" {
                            S::And(parts)
                        } else {
                            S::Or(parts)
                        }
                    }
                    "implies" | "iff" => {
                        let a = self.statement()?;
                        let b = self.statement()?;
                        if head == "implies" {
                            S::implies(a, b)
                        } else {
                            S::iff(a, b)
                        }
                    }
                    "forall" | "exists" => {
                        let var = self.symbol()?;
                        let domain = self.string()?;
                        let body = self.statement()?;
                        if head == "forall" {
                            S::for_all(&var, &domain, body)
                        } else {
                            S::exists(&var, &domain, body)
                        }
                    }
                    _ => {
                        self.pos -= 1;
                        return self.err(&format!("unknown connective `{head}`"));
                    }
                };
                self.close()?;
                Ok(stmt)
            }
            _ => self.err("expected a statement"),
        }
    }
}

pub fn parse_statement(text: &str) -> Result<LogicStatement, LogicError> {
    let mut p = PrefixParser {
        toks: lex(text)?,
        pos: 0,
        len: text.chars().count(),
    };
    let s = p.statement()?;
    if p.next().is_some() {
        p.pos -= 1;
        return p.err("trailing input");
    }
    Ok(s)
}

impl std::str::FromStr for LogicStatement {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_statement(s)
    }
}

impl Serialize for LogicStatement {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        s.serialize_str(&self.to_prefix())
    }
}

impl<'de> Deserialize<'de> for LogicStatement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_statement(&text).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// human-readable rendering

fn prec(s: &LogicStatement) -> u8 {
    match s {
        S::Iff(..) => 1,
        S::Implies(..) => 2,
        S::Or(_) => 3,
        S::And(_) => 4,
        S::ForAll { .. } | S::Exists { .. } => 0,
        S::Not(_) | S::Atom { .. } => 5,
    }
}

fn write_human(f: &mut fmt::Formatter<'_>, s: &LogicStatement, min: u8) -> fmt::Result {
    let wrap = prec(s) < min;
    if wrap {
        f.write_str("(")?;
    }
    match s {
        S::Atom { label, text } => f.write_str(if text.is_empty() { label } else { text })?,
        S::Not(inner) => {
            f.write_str("¬")?;
            write_human(f, inner, 5)?;
        }
        S::And(xs) | S::Or(xs) => {
            let sep = if matches!(s, S::And(_)) {
                " ∧ "
            } else {
                " ∨ "
            };
            let own = prec(s);
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write_human(f, x, own + 1)?;
            }
        }
        S::Implies(a, b) => {
            write_human(f, a, 3)?;
            f.write_str(" → ")?;
            write_human(f, b, 3)?;
        }
        S::Iff(a, b) => {
            write_human(f, a, 2)?;
            f.write_str(" ↔ ")?;
            write_human(f, b, 2)?;
        }
        S::ForAll { var, domain, body } | S::Exists { var, domain, body } => {
            f.write_str(if matches!(s, S::ForAll { .. }) {
                "∀"
            } else {
                "∃"
            })?;
            f.write_str(var)?;
            if !domain.is_empty() {
                write!(f, " ({domain})")?;
            }
            f.write_str(": ")?;
            write_human(f, body, 0)?;
        }
    }
    if wrap {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for LogicStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_human(f, self, 0)
    }
}
