//! Recursive-descent parser for the linear expression syntax.
//!
//! ```text
//! answer   := expr [ "=" expr ]
//! expr     := term { ("+" | "-") term }
//! term     := unary { ("*" | "/") unary }
//! unary    := "-" unary | power
//! power    := atom [ "^" exponent ]
//! exponent := ["-"] INT | "(" ["-"] INT ")"
//! atom     := INT | IDENT | IDENT "(" expr { "," expr } ")" | "(" expr ")"
//!           | "sum" "(" expr "," IDENT "," expr "," expr ")"
//! ```
//!
//! Multiplication is always explicit: `2n` is rejected.

use std::fmt;

use num_bigint::BigInt;

use super::{Equation, Expr, Formula};

/// Exponents beyond this magnitude are rejected at parse time.
const MAX_EXPONENT: i64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Zero-based character offset of the offending token.
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at column {}: expected {}, found {}",
            self.position + 1,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            toks.push((Tok::Int(digits.parse().unwrap()), start));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^(),=".contains(c) {
            toks.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(ParseError {
                position: i,
                expected: vec!["expression".into()],
                found: format!("`{c}`"),
            });
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            position: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{c}`")]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut ops = vec![self.term()?];
        loop {
            if self.eat('+') {
                ops.push(self.term()?);
            } else if self.eat('-') {
                ops.push(Expr::neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(Expr::add(ops))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = Expr::mul(vec![acc, rhs]);
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = Expr::div(acc, rhs);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.exponent()?;
            Ok(Expr::pow(base, exp))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = self.eat('(');
        let negative = self.eat('-');
        let at = self.offset();
        let value = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                n
            }
            _ => return Err(self.error(&["integer exponent"])),
        };
        if paren {
            self.expect(')')?;
        }
        let magnitude: i64 = i64::try_from(&value)
            .ok()
            .filter(|m| *m <= MAX_EXPONENT)
            .ok_or(ParseError {
                position: at,
                expected: vec![format!("exponent of magnitude at most {MAX_EXPONENT}")],
                found: format!("`{value}`"),
            })?;
        Ok(if negative { -magnitude } else { magnitude })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(name) => {
                self.bump();
                if !self.eat('(') {
                    return Ok(Expr::Var(name));
                }
                if name == "sum" {
                    return self.sum_args();
                }
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                self.expect_close(&[",", ")"])?;
                Ok(Expr::Func(name, args))
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ => Err(self.error(&["integer", "identifier", "`(`", "`-`"])),
        }
    }

    fn expect_close(&mut self, expected: &[&str]) -> Result<(), ParseError> {
        if self.eat(')') {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn sum_args(&mut self) -> Result<Expr, ParseError> {
        let body = self.expr()?;
        self.expect(',')?;
        let index = match self.peek().clone() {
            Tok::Ident(name) if name != "sum" => {
                self.bump();
                name
            }
            _ => return Err(self.error(&["index variable"])),
        };
        self.expect(',')?;
        let lower = self.expr()?;
        self.expect(',')?;
        let upper = self.expr()?;
        self.expect_close(&["`)`"])?;
        Ok(Expr::sum(body, &index, lower, upper))
    }

    fn finish(&mut self, allow_eq: bool) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else if allow_eq {
            Err(self.error(&["operator", "`=`", "end of input"]))
        } else {
            Err(self.error(&["operator", "end of input"]))
        }
    }
}

fn parser_for(text: &str) -> Result<Parser, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError {
            position: 0,
            expected: vec!["expression".into()],
            found: "end of input".into(),
        });
    }
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
    })
}

/// Parses a bare expression; `=` is rejected.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = parser_for(text)?;
    let e = p.expr()?;
    p.finish(false)?;
    Ok(e)
}

/// Parses `lhs = rhs`; a missing `=` is an error.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    match parse_answer(text)? {
        Formula::Equation(eq) => Ok(eq),
        Formula::Expr(_) => Err(ParseError {
            position: text.chars().count(),
            expected: vec!["`=`".into()],
            found: "end of input".into(),
        }),
    }
}

/// Parses either an expression or a single equation.
pub fn parse_answer(text: &str) -> Result<Formula, ParseError> {
    let mut p = parser_for(text)?;
    let lhs = p.expr()?;
    if p.eat('=') {
        let rhs = p.expr()?;
        p.finish(false)?;
        Ok(Formula::Equation(Equation::new(lhs, rhs)))
    } else {
        p.finish(true)?;
        Ok(Formula::Expr(lhs))
    }
}
