//! Exact symbolic expressions over the rationals.
//!
//! Expressions are trees of integers, variables, n-ary sums and products,
//! negation, binary division, integer powers, finite sums with a bound index,
//! and uninterpreted function applications such as `a(k)` or `sqrt(2)`.
//! The linear syntax accepted by [`parse_expr`] is also the wire format for
//! student answers.

mod canon;
mod equiv;
mod parse;
mod render;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use canon::{Atom, Poly, RatFunc};
pub use equiv::{equivalent, expand_sum, Equivalence, PowerRule};
pub use parse::{parse_answer, parse_equation, parse_expr, ParseError};

/// Largest number of terms a single finite sum may expand into.
pub const MAX_SUM_TERMS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    /// n-ary, at least two operands, never directly nested.
    Add(Vec<Expr>),
    /// n-ary, at least two operands, never directly nested.
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Sum {
        body: Box<Expr>,
        index: String,
        lower: Box<Expr>,
        upper: Box<Expr>,
    },
    Func(String, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

/// Either a bare expression or an equation. Student answers and inline proof
/// formulas are one of these, and the two are never conflated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Expr(Expr),
    Equation(Equation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("sum bound `{0}` is not a concrete integer")]
    NonConcreteBound(String),
    #[error("sum range {0}..={1} is too large to expand")]
    RangeTooLarge(BigInt, BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("invalid rewrite rule: {0}")]
    InvalidRule(String),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Int(BigInt::from(n))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    /// Builds a flattened sum. Zero operands give `0`, one operand is returned as is.
    pub fn add(operands: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(operands.len());
        for op in operands {
            match op {
                Expr::Add(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::int(0),
            1 => flat.pop().unwrap(),
            _ => Expr::Add(flat),
        }
    }

    /// Builds a flattened product. Zero operands give `1`.
    pub fn mul(operands: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(operands.len());
        for op in operands {
            match op {
                Expr::Mul(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expr::int(1),
            1 => flat.pop().unwrap(),
            _ => Expr::Mul(flat),
        }
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn div(num: Expr, den: Expr) -> Expr {
        Expr::Div(Box::new(num), Box::new(den))
    }

    pub fn pow(base: Expr, exp: i64) -> Expr {
        Expr::Pow(Box::new(base), exp)
    }

    pub fn sum(body: Expr, index: &str, lower: Expr, upper: Expr) -> Expr {
        Expr::Sum {
            body: Box::new(body),
            index: index.to_string(),
            lower: Box::new(lower),
            upper: Box::new(upper),
        }
    }

    pub fn func(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Func(name.to_string(), args)
    }

    pub fn contains_sum(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Var(_) => false,
            Expr::Sum { .. } => true,
            Expr::Add(ops) | Expr::Mul(ops) | Expr::Func(_, ops) => {
                ops.iter().any(Expr::contains_sum)
            }
            Expr::Neg(e) | Expr::Pow(e, _) => e.contains_sum(),
            Expr::Div(a, b) => a.contains_sum() || b.contains_sum(),
        }
    }

    /// Variables occurring free, i.e. not bound by an enclosing sum index.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Expr::Add(ops) | Expr::Mul(ops) | Expr::Func(_, ops) => {
                ops.iter().for_each(|o| o.collect_free(bound, out))
            }
            Expr::Neg(e) | Expr::Pow(e, _) => e.collect_free(bound, out),
            Expr::Div(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Sum {
                body,
                index,
                lower,
                upper,
            } => {
                lower.collect_free(bound, out);
                upper.collect_free(bound, out);
                bound.push(index.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Replaces every free occurrence of `var` with `value`.
    ///
    /// A sum whose index is `var` keeps its body untouched; only its limits
    /// are rewritten. Sum indices are renamed when `value` would otherwise be
    /// captured.
    pub fn substitute(&self, var: &str, value: &Expr) -> Expr {
        let value_vars = value.free_vars();
        self.subst_inner(var, value, &value_vars)
    }

    fn subst_inner(&self, var: &str, value: &Expr, value_vars: &BTreeSet<String>) -> Expr {
        match self {
            Expr::Int(_) => self.clone(),
            Expr::Var(v) if v == var => value.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Add(ops) => Expr::add(
                ops.iter()
                    .map(|o| o.subst_inner(var, value, value_vars))
                    .collect(),
            ),
            Expr::Mul(ops) => Expr::mul(
                ops.iter()
                    .map(|o| o.subst_inner(var, value, value_vars))
                    .collect(),
            ),
            Expr::Func(name, args) => Expr::Func(
                name.clone(),
                args.iter()
                    .map(|o| o.subst_inner(var, value, value_vars))
                    .collect(),
            ),
            Expr::Neg(e) => Expr::neg(e.subst_inner(var, value, value_vars)),
            Expr::Pow(e, k) => Expr::pow(e.subst_inner(var, value, value_vars), *k),
            Expr::Div(a, b) => Expr::div(
                a.subst_inner(var, value, value_vars),
                b.subst_inner(var, value, value_vars),
            ),
            Expr::Sum {
                body,
                index,
                lower,
                upper,
            } => {
                let lower = lower.subst_inner(var, value, value_vars);
                let upper = upper.subst_inner(var, value, value_vars);
                if index == var {
                    return Expr::sum((**body).clone(), index, lower, upper);
                }
                let body_vars = body.free_vars();
                if value_vars.contains(index) && body_vars.contains(var) {
                    let mut avoid = value_vars.clone();
                    avoid.extend(body_vars);
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(index, &avoid);
                    let renamed = body.substitute(index, &Expr::Var(fresh.clone()));
                    let body = renamed.subst_inner(var, value, value_vars);
                    Expr::sum(body, &fresh, lower, upper)
                } else {
                    let body = body.subst_inner(var, value, value_vars);
                    Expr::sum(body, index, lower, upper)
                }
            }
        }
    }

    /// Structural normal form: nested sums and products are flattened,
    /// commutative operands are sorted and negated integer literals are folded.
    /// Nothing is expanded or cancelled.
    pub fn normalize(&self) -> Expr {
        match self {
            Expr::Int(_) | Expr::Var(_) => self.clone(),
            Expr::Add(ops) => {
                let mut flat = Vec::new();
                for op in ops {
                    match op.normalize() {
                        Expr::Add(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                flat.sort();
                Expr::Add(flat)
            }
            Expr::Mul(ops) => {
                let mut flat = Vec::new();
                for op in ops {
                    match op.normalize() {
                        Expr::Mul(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                flat.sort();
                Expr::Mul(flat)
            }
            Expr::Neg(e) => match e.normalize() {
                Expr::Int(n) => Expr::Int(-n),
                other => Expr::neg(other),
            },
            Expr::Div(a, b) => Expr::div(a.normalize(), b.normalize()),
            Expr::Pow(e, k) => Expr::pow(e.normalize(), *k),
            Expr::Sum {
                body,
                index,
                lower,
                upper,
            } => Expr::sum(
                body.normalize(),
                index,
                lower.normalize(),
                upper.normalize(),
            ),
            Expr::Func(name, args) => {
                Expr::Func(name.clone(), args.iter().map(Expr::normalize).collect())
            }
        }
    }

    /// Visits every integer literal mutably, in a fixed left-to-right order.
    pub fn for_each_int_mut(&mut self, f: &mut dyn FnMut(&mut BigInt)) {
        match self {
            Expr::Int(n) => f(n),
            Expr::Var(_) => {}
            Expr::Add(ops) | Expr::Mul(ops) | Expr::Func(_, ops) => {
                ops.iter_mut().for_each(|o| o.for_each_int_mut(f))
            }
            Expr::Neg(e) | Expr::Pow(e, _) => e.for_each_int_mut(f),
            Expr::Div(a, b) => {
                a.for_each_int_mut(f);
                b.for_each_int_mut(f);
            }
            Expr::Sum {
                body, lower, upper, ..
            } => {
                body.for_each_int_mut(f);
                lower.for_each_int_mut(f);
                upper.for_each_int_mut(f);
            }
        }
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|candidate| !avoid.contains(candidate))
        .unwrap()
}

/// True iff `e` and `target` agree after [`Expr::normalize`]: only operand
/// order and flattening are forgiven, so `(n+1)+1` does not match `n+2`.
pub fn matches_form(e: &Expr, target: &Expr) -> bool {
    e.normalize() == target.normalize()
}

impl Equation {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Equation { lhs, rhs }
    }

    pub fn substitute(&self, var: &str, value: &Expr) -> Equation {
        Equation::new(
            self.lhs.substitute(var, value),
            self.rhs.substitute(var, value),
        )
    }
}

impl Formula {
    pub fn is_equation(&self) -> bool {
        matches!(self, Formula::Equation(_))
    }

    pub fn as_equation(&self) -> Option<&Equation> {
        match self {
            Formula::Equation(eq) => Some(eq),
            Formula::Expr(_) => None,
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Expr(e) => e.fmt(f),
            Formula::Equation(eq) => eq.fmt(f),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_answer(s)
    }
}

// Expressions travel through JSON in their linear syntax.
impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_expr(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Equation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Equation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_equation(&text).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_answer(&text).map_err(serde::de::Error::custom)
    }
}
