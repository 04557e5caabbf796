//! Linear-syntax rendering. The output always re-parses to the same tree up
//! to [`Expr::normalize`].

use std::fmt::{self, Write};

use num_traits::Signed;

use super::Expr;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(_) => PREC_ADD,
        Expr::Mul(_) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Int(n) if n.is_negative() => PREC_UNARY,
        Expr::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        f.write_char('(')?;
        write_expr(f, e)?;
        f.write_char(')')
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Int(n) => write!(f, "{n}"),
        Expr::Var(v) => f.write_str(v),
        Expr::Add(ops) => {
            for (i, op) in ops.iter().enumerate() {
                match op {
                    Expr::Neg(inner) if i > 0 => {
                        f.write_str(" - ")?;
                        write_at(f, inner, PREC_MUL)?;
                    }
                    _ if i > 0 => {
                        f.write_str(" + ")?;
                        write_at(f, op, PREC_MUL)?;
                    }
                    _ => write_at(f, op, PREC_MUL)?,
                }
            }
            Ok(())
        }
        Expr::Mul(ops) => {
            for (i, op) in ops.iter().enumerate() {
                if i > 0 {
                    f.write_str(" * ")?;
                    write_at(f, op, PREC_UNARY)?;
                } else {
                    write_at(f, op, PREC_MUL)?;
                }
            }
            Ok(())
        }
        Expr::Div(a, b) => {
            write_at(f, a, PREC_MUL)?;
            f.write_str(" / ")?;
            write_at(f, b, PREC_UNARY)
        }
        Expr::Neg(inner) => {
            f.write_char('-')?;
            write_at(f, inner, PREC_UNARY)
        }
        Expr::Pow(base, k) => {
            write_at(f, base, PREC_ATOM)?;
            if *k < 0 {
                write!(f, "^({k})")
            } else {
                write!(f, "^{k}")
            }
        }
        Expr::Sum {
            body,
            index,
            lower,
            upper,
        } => write!(f, "sum({body}, {index}, {lower}, {upper})"),
        Expr::Func(name, args) => {
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(f, a)?;
            }
            f.write_char(')')
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
