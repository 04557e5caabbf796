//! Equivalence checking and finite-sum expansion.
//!
//! Sum-free expressions are compared exactly: both sides are brought to a
//! ratio of expanded polynomials and cross-multiplied. When a sum has a
//! symbolic limit, every variable occurring free in such a limit is
//! instantiated at each value in `1..=6`, the sums are expanded, and the
//! instances are compared exactly. That rejects soundly but accepts only
//! heuristically: it is a proof for summands of degree at most five and a
//! strong check beyond that.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::canon::{Atom, Poly, RatFunc};
use super::{Equation, Expr, ExprError, MAX_SUM_TERMS};

/// Sample values used to instantiate symbolic sum limits.
pub const DEFAULT_SAMPLES: [i64; 6] = [1, 2, 3, 4, 5, 6];

/// More variables than this in symbolic sum limits is reported as undecidable.
const MAX_LIMIT_VARS: usize = 3;

/// A rewrite `base^power -> replacement`, e.g. `sqrt(2)^2 = 2`. The engine
/// knows nothing about radicals unless such a rule is registered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerRule {
    pub base: Expr,
    pub power: u32,
    pub replacement: Expr,
}

impl PowerRule {
    /// Reads a rule written as an equation whose left side is `atom^k`.
    pub fn from_equation(eq: &Equation) -> Result<PowerRule, ExprError> {
        match &eq.lhs {
            Expr::Pow(base, k) if *k >= 1 && matches!(**base, Expr::Var(_) | Expr::Func(..)) => Ok(PowerRule {
                base: (**base).clone(),
                power: *k as u32,
                replacement: eq.rhs.clone(),
            }),
            other => Err(ExprError::InvalidRule(format!(
                "left side must be a variable or function application raised to a positive integer power, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Equivalence {
    rules: Vec<(Atom, u32, Poly)>,
    samples: Vec<i64>,
}

impl Default for Equivalence {
    fn default() -> Self {
        Equivalence {
            rules: Vec::new(),
            samples: DEFAULT_SAMPLES.to_vec(),
        }
    }
}

struct Canon<'a> {
    rules: &'a [(Atom, u32, Poly)],
    /// Set when a function argument had no polynomial canonical form.
    opaque: bool,
}

impl Canon<'_> {
    fn reduce(&self, r: RatFunc) -> RatFunc {
        if self.rules.is_empty() {
            return r;
        }
        RatFunc {
            num: r.num.reduce(self.rules),
            den: r.den.reduce(self.rules),
        }
        .normalized()
    }

    fn run(&mut self, e: &Expr) -> Result<RatFunc, ExprError> {
        Ok(match e {
            Expr::Int(n) => RatFunc::from_poly(Poly::integer(n.clone())),
            Expr::Var(v) => self.reduce(RatFunc::from_poly(Poly::atom(Atom::Var(v.clone())))),
            Expr::Add(ops) => {
                let mut acc = RatFunc::from_poly(Poly::zero());
                for op in ops {
                    acc = acc.add(&self.run(op)?);
                }
                acc
            }
            Expr::Mul(ops) => {
                let mut acc = RatFunc::from_poly(Poly::one());
                for op in ops {
                    let term = self.run(op)?;
                    acc = self.reduce(acc.mul(&term));
                }
                acc
            }
            Expr::Neg(inner) => self.run(inner)?.neg(),
            Expr::Div(a, b) => {
                let num = self.run(a)?;
                let den = self.run(b)?;
                let den = self.reduce(den);
                let inv = den.recip().ok_or(ExprError::DivisionByZero)?;
                self.reduce(num.mul(&inv))
            }
            Expr::Pow(base, k) => {
                let base = self.run(base)?;
                let base = self.reduce(base);
                let base = if *k < 0 {
                    base.recip().ok_or(ExprError::DivisionByZero)?
                } else {
                    base
                };
                self.reduce(base.pow(k.unsigned_abs() as u32))
            }
            Expr::Func(name, args) => {
                let mut canon_args = Vec::with_capacity(args.len());
                for a in args {
                    let c = self.run(a)?;
                    let c = self.reduce(c);
                    if !c.is_polynomial() {
                        self.opaque = true;
                    }
                    canon_args.push(c);
                }
                self.reduce(RatFunc::from_poly(Poly::atom(Atom::Func(
                    name.clone(),
                    canon_args,
                ))))
            }
            Expr::Sum {
                body,
                index,
                lower,
                upper,
            } => {
                let lo = concrete_bound(lower)?;
                let hi = concrete_bound(upper)?;
                let mut acc = RatFunc::from_poly(Poly::zero());
                for k in sum_range(&lo, &hi)? {
                    acc = acc.add(&self.run(&body.substitute(index, &Expr::Int(k)))?);
                }
                acc
            }
        })
    }
}

fn concrete_bound(bound: &Expr) -> Result<BigInt, ExprError> {
    let mut canon = Canon {
        rules: &[],
        opaque: false,
    };
    let value = canon
        .run(bound)
        .ok()
        .and_then(|r| r.as_constant())
        .filter(|q| q.is_integer());
    value
        .map(|q| q.to_integer())
        .ok_or_else(|| ExprError::NonConcreteBound(bound.to_string()))
}

fn sum_range(lo: &BigInt, hi: &BigInt) -> Result<Vec<BigInt>, ExprError> {
    if hi < lo {
        return Ok(Vec::new());
    }
    let count = (hi - lo + 1u32).to_usize().filter(|c| *c <= MAX_SUM_TERMS);
    let count = count.ok_or_else(|| ExprError::RangeTooLarge(lo.clone(), hi.clone()))?;
    Ok((0..count).map(|i| lo + BigInt::from(i)).collect())
}

/// Free variables occurring in the limits of sums, skipping enclosing indices.
fn limit_vars(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match e {
        Expr::Int(_) | Expr::Var(_) => {}
        Expr::Add(ops) | Expr::Mul(ops) | Expr::Func(_, ops) => {
            ops.iter().for_each(|o| limit_vars(o, bound, out))
        }
        Expr::Neg(x) | Expr::Pow(x, _) => limit_vars(x, bound, out),
        Expr::Div(a, b) => {
            limit_vars(a, bound, out);
            limit_vars(b, bound, out);
        }
        Expr::Sum {
            body,
            index,
            lower,
            upper,
        } => {
            for limit in [lower, upper] {
                out.extend(limit.free_vars().into_iter().filter(|v| !bound.contains(v)));
                limit_vars(limit, bound, out);
            }
            bound.push(index.clone());
            limit_vars(body, bound, out);
            bound.pop();
        }
    }
}

impl Equivalence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_rules(rules: &[PowerRule]) -> Result<Self, ExprError> {
        let base = Equivalence::default();
        let mut resolved = Vec::with_capacity(rules.len());
        for rule in rules {
            let atom_poly = base.canonical(&rule.base)?;
            let terms: Vec<_> = atom_poly.num.terms().collect();
            let atom = match terms.as_slice() {
                [(mono, coeff)]
                    if atom_poly.den == Poly::one()
                        && coeff.is_one()
                        && mono.len() == 1
                        && mono[0].1 == 1 =>
                {
                    mono[0].0.clone()
                }
                _ => {
                    return Err(ExprError::InvalidRule(format!(
                        "`{}` is not an atom",
                        rule.base
                    )))
                }
            };
            let repl = base.canonical(&rule.replacement)?;
            if !repl.is_polynomial() {
                return Err(ExprError::InvalidRule(format!(
                    "replacement `{}` must be a polynomial",
                    rule.replacement
                )));
            }
            resolved.push((atom, rule.power, repl.num));
        }
        let atoms: Vec<&Atom> = resolved.iter().map(|(a, _, _)| a).collect();
        for (_, _, repl) in &resolved {
            if repl
                .terms()
                .any(|(mono, _)| mono.iter().any(|(a, _)| atoms.contains(&a)))
            {
                return Err(ExprError::InvalidRule(
                    "a replacement mentions a rewritten atom".into(),
                ));
            }
        }
        Ok(Equivalence {
            rules: resolved,
            samples: base.samples,
        })
    }

    /// Canonical rational form. Every sum must already have concrete limits.
    pub fn canonical(&self, e: &Expr) -> Result<RatFunc, ExprError> {
        let mut canon = Canon {
            rules: &self.rules,
            opaque: false,
        };
        canon.run(e)
    }

    fn compare_exact(&self, a: &Expr, b: &Expr) -> Result<bool, ExprError> {
        let mut canon = Canon {
            rules: &self.rules,
            opaque: false,
        };
        let ra = canon.run(a)?;
        let ra = canon.reduce(ra);
        let rb = canon.run(b)?;
        let rb = canon.reduce(rb);
        if ra.den.is_zero() || rb.den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let diff = ra
            .num
            .mul(&rb.den)
            .sub(&rb.num.mul(&ra.den))
            .reduce(&self.rules);
        if diff.is_zero() {
            Ok(true)
        } else if canon.opaque {
            Err(ExprError::Undecidable(
                "function arguments have no polynomial canonical form".into(),
            ))
        } else {
            Ok(false)
        }
    }

    pub fn equivalent(&self, a: &Expr, b: &Expr) -> Result<bool, ExprError> {
        let mut vars = BTreeSet::new();
        limit_vars(a, &mut Vec::new(), &mut vars);
        limit_vars(b, &mut Vec::new(), &mut vars);
        if vars.is_empty() {
            return self.compare_exact(a, b);
        }
        if vars.len() > MAX_LIMIT_VARS {
            return Err(ExprError::Undecidable(format!(
                "{} variables in sum limits",
                vars.len()
            )));
        }
        let vars: Vec<String> = vars.into_iter().collect();
        let mut defined = 0usize;
        let mut assignment = vec![0usize; vars.len()];
        loop {
            let (mut ia, mut ib) = (a.clone(), b.clone());
            for (var, &slot) in vars.iter().zip(&assignment) {
                let value = Expr::int(self.samples[slot]);
                ia = ia.substitute(var, &value);
                ib = ib.substitute(var, &value);
            }
            match self.compare_exact(&ia, &ib) {
                Ok(false) => return Ok(false),
                Ok(true) => defined += 1,
                Err(ExprError::DivisionByZero) => {}
                Err(e) => return Err(e),
            }
            // odometer over samples^vars
            let mut pos = 0;
            loop {
                if pos == assignment.len() {
                    return if defined > 0 {
                        Ok(true)
                    } else {
                        Err(ExprError::DivisionByZero)
                    };
                }
                assignment[pos] += 1;
                if assignment[pos] < self.samples.len() {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Equations are equivalent when their sides are pairwise equivalent,
    /// in either orientation.
    pub fn equivalent_equations(&self, a: &Equation, b: &Equation) -> Result<bool, ExprError> {
        if self.equivalent(&a.lhs, &b.lhs)? && self.equivalent(&a.rhs, &b.rhs)? {
            return Ok(true);
        }
        Ok(self.equivalent(&a.lhs, &b.rhs)? && self.equivalent(&a.rhs, &b.lhs)?)
    }
}

/// Decides `a ≡ b` with no rewrite rules registered.
pub fn equivalent(a: &Expr, b: &Expr) -> Result<bool, ExprError> {
    Equivalence::default().equivalent(a, b)
}

/// Replaces every sum by the explicit sum of its instantiated terms.
/// An empty range gives `0`.
pub fn expand_sum(e: &Expr) -> Result<Expr, ExprError> {
    Ok(match e {
        Expr::Int(_) | Expr::Var(_) => e.clone(),
        Expr::Add(ops) => Expr::add(ops.iter().map(expand_sum).collect::<Result<_, _>>()?),
        Expr::Mul(ops) => Expr::mul(ops.iter().map(expand_sum).collect::<Result<_, _>>()?),
        Expr::Func(name, args) => Expr::Func(
            name.clone(),
            args.iter().map(expand_sum).collect::<Result<_, _>>()?,
        ),
        Expr::Neg(x) => Expr::neg(expand_sum(x)?),
        Expr::Pow(x, k) => Expr::pow(expand_sum(x)?, *k),
        Expr::Div(a, b) => Expr::div(expand_sum(a)?, expand_sum(b)?),
        Expr::Sum {
            body,
            index,
            lower,
            upper,
        } => {
            let lo = concrete_bound(&expand_sum(lower)?)?;
            let hi = concrete_bound(&expand_sum(upper)?)?;
            let terms = sum_range(&lo, &hi)?
                .into_iter()
                .map(|k| expand_sum(&body.substitute(index, &Expr::Int(k))))
                .collect::<Result<Vec<_>, _>>()?;
            Expr::add(terms)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_equation, parse_expr};

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn eq(a: &str, b: &str) -> bool {
        equivalent(&p(a), &p(b)).unwrap()
    }

    #[test]
    fn induction_step_algebra() {
        assert!(eq("k*(k+1)*(2*k+1)/6 + (k+1)^2", "(k+1)*(k+2)*(2*k+3)/6"));
        assert!(eq("(k+1)*(2*k^2+7*k+6)/6", "(k+1)*(k+2)*(2*k+3)/6"));
        assert!(!eq("(k+1)*(2*k^2+8*k+6)/6", "(k+1)*(k+2)*(2*k+3)/6"));
    }

    #[test]
    fn reflexive_on_atoms() {
        assert!(eq("x", "x"));
        assert!(!eq("x", "y"));
    }

    #[test]
    fn index_shift_and_renaming() {
        assert!(eq("sum(a(k),k,1,n)", "sum(a(m+1),m,0,n-1)"));
        assert!(eq("sum(a(k),k,1,n)", "sum(a(m),m,1,n)"));
        assert!(!eq("sum(a(k),k,1,n)", "sum(a(k),k,0,n)"));
        assert!(!eq("sum(a(k),k,1,n)", "sum(a(k),k,1,n+1)"));
    }

    #[test]
    fn confused_sums_differ() {
        assert!(!eq("sum(k,k,1,n)", "sum(n,k,1,n)"));
        assert!(eq("sum(n,k,1,n)", "n^2"));
    }

    #[test]
    fn closed_form_against_sum() {
        assert!(eq("sum(k^2,k,1,n)", "n*(n+1)*(2*n+1)/6"));
        assert!(eq("sum(k^2,k,1,n+1)", "sum(k^2,k,1,n) + (n+1)^2"));
    }

    #[test]
    fn rational_functions() {
        assert!(eq("(x^2-1)/(x-1)", "x+1"));
        assert!(eq("1/x + 1/y", "(x+y)/(x*y)"));
        assert!(eq("x^-2", "1/(x*x)"));
        assert!(!eq("1/x", "x"));
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert_eq!(
            equivalent(&p("1/(x-x)"), &p("1")),
            Err(ExprError::DivisionByZero)
        );
    }

    #[test]
    fn opaque_arguments_are_undecidable_when_they_matter() {
        let r = equivalent(&p("f((x^2-1)/(x-1))"), &p("f(x+1)"));
        assert!(matches!(r, Err(ExprError::Undecidable(_))));
        // identical opaque atoms still cancel
        assert!(eq("f(1/x) - f(1/x)", "0"));
        // polynomial arguments canonicalise
        assert!(eq("a(2*k - k + 1)", "a(k+1)"));
    }

    #[test]
    fn sqrt_is_opaque_without_rules() {
        assert!(!eq("sqrt(2)^2", "2"));
        let rule = PowerRule::from_equation(&parse_equation("sqrt(2)^2 = 2").unwrap()).unwrap();
        let ctx = Equivalence::with_rules(&[rule]).unwrap();
        assert!(ctx.equivalent(&p("sqrt(2)*sqrt(2)"), &p("2")).unwrap());
        assert!(ctx
            .equivalent(&p("(1+sqrt(2))^2"), &p("3+2*sqrt(2)"))
            .unwrap());
    }

    #[test]
    fn invalid_rules_are_rejected() {
        let bad = PowerRule::from_equation(&parse_equation("x + 1 = 2").unwrap());
        assert!(bad.is_err());
        let circular = PowerRule::from_equation(&parse_equation("i^2 = i").unwrap()).unwrap();
        assert!(Equivalence::with_rules(&[circular]).is_err());
    }

    #[test]
    fn expand_concrete_sums() {
        let e = expand_sum(&p("sum(k^2,k,1,3)")).unwrap();
        match &e {
            Expr::Add(terms) => {
                assert_eq!(terms.len(), 3);
                for (t, v) in terms.iter().zip([1, 4, 9]) {
                    assert!(equivalent(t, &Expr::int(v)).unwrap());
                }
            }
            other => panic!("expected a sum of terms, got {other}"),
        }
        assert_eq!(expand_sum(&p("sum(k,k,1,0)")).unwrap(), Expr::int(0));
        assert_eq!(expand_sum(&p("sum(a(k),k,1,2)")).unwrap(), p("a(1)+a(2)"));
        assert_eq!(
            expand_sum(&p("sum(k,k,1,n)")),
            Err(ExprError::NonConcreteBound("n".into()))
        );
        assert!(matches!(
            expand_sum(&p("sum(k,k,1,100000)")),
            Err(ExprError::RangeTooLarge(..))
        ));
        assert!(expand_sum(&p("sum(k,k,1,5/2)")).is_err());
    }

    #[test]
    fn nested_sums_expand() {
        let e = expand_sum(&p("sum(sum(j,j,1,k),k,1,3)")).unwrap();
        assert!(equivalent(&e, &Expr::int(10)).unwrap());
    }
}
