//! Numeric reference for expression equivalence: evaluate both sides at
//! random rational points, independently of the canonical-form engine.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proofcomp::expr::Expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Env = BTreeMap<String, BigRational>;

/// Value of `e`, or None where it is undefined (division by zero, a sum
/// with non-integer limits, an uninterpreted function).
pub fn eval(e: &Expr, env: &Env) -> Option<BigRational> {
    Some(match e {
        Expr::Int(n) => BigRational::from_integer(n.clone()),
        Expr::Var(v) => env.get(v)?.clone(),
        Expr::Add(ops) => {
            let mut acc = BigRational::zero();
            for o in ops {
                acc += eval(o, env)?;
            }
            acc
        }
        Expr::Mul(ops) => {
            let mut acc = BigRational::one();
            for o in ops {
                acc *= eval(o, env)?;
            }
            acc
        }
        Expr::Neg(x) => -eval(x, env)?,
        Expr::Div(a, b) => {
            let d = eval(b, env)?;
            if d.is_zero() {
                return None;
            }
            eval(a, env)? / d
        }
        Expr::Pow(b, k) => {
            let base = eval(b, env)?;
            if *k < 0 && base.is_zero() {
                return None;
            }
            let mut acc = BigRational::one();
            for _ in 0..k.unsigned_abs() {
                acc *= &base;
            }
            if *k < 0 {
                acc.recip()
            } else {
                acc
            }
        }
        Expr::Sum {
            body,
            index,
            lower,
            upper,
        } => {
            let lo = eval(lower, env)?;
            let hi = eval(upper, env)?;
            if !lo.is_integer() || !hi.is_integer() {
                return None;
            }
            let (lo, hi) = (lo.to_integer().to_i64()?, hi.to_integer().to_i64()?);
            if hi - lo > 10_000 {
                return None;
            }
            let mut acc = BigRational::zero();
            let mut inner = env.clone();
            for k in lo..=hi {
                inner.insert(index.clone(), BigRational::from_integer(BigInt::from(k)));
                acc += eval(body, &inner)?;
            }
            acc
        }
        Expr::Func(..) => return None,
    })
}

fn vars_of(e: &Expr, out: &mut Vec<String>) {
    for v in e.free_vars() {
        if !out.contains(&v) {
            out.push(v);
        }
    }
}

/// Some(true) if `a` and `b` agree at every sampled point where both are
/// defined, Some(false) on a disagreement, None if no point was defined.
pub fn agree(a: &Expr, b: &Expr, points: usize, seed: u64) -> Option<bool> {
    let mut vars = Vec::new();
    vars_of(a, &mut vars);
    vars_of(b, &mut vars);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defined = 0;
    for _ in 0..points {
        let env: Env = vars
            .iter()
            .map(|v| {
                let num: i64 = rng.gen_range(-97..=97);
                let den: i64 = rng.gen_range(1..=13);
                (
                    v.clone(),
                    BigRational::new(BigInt::from(num), BigInt::from(den)),
                )
            })
            .collect();
        match (eval(a, &env), eval(b, &env)) {
            (Some(x), Some(y)) => {
                defined += 1;
                if x != y {
                    return Some(false);
                }
            }
            _ => continue,
        }
    }
    (defined > 0).then_some(true)
}

/// Integer points only; used where sum limits must be integers.
pub fn agree_on_integers(
    a: &Expr,
    b: &Expr,
    values: std::ops::RangeInclusive<i64>,
) -> Option<bool> {
    let mut vars = Vec::new();
    vars_of(a, &mut vars);
    vars_of(b, &mut vars);
    let mut defined = 0;
    for n in values {
        let env: Env = vars
            .iter()
            .map(|v| (v.clone(), BigRational::from_integer(BigInt::from(n))))
            .collect();
        if let (Some(x), Some(y)) = (eval(a, &env), eval(b, &env)) {
            defined += 1;
            if x != y {
                return Some(false);
            }
        }
    }
    (defined > 0).then_some(true)
}
