//! Canonical forms: multivariate polynomials with exact rational
//! coefficients, and ratios of them.
//!
//! Monomials are sorted `(atom, exponent)` lists, so the `BTreeMap` order of a
//! [`Poly`] is a fixed monomial order. Uninterpreted function applications are
//! opaque atoms keyed by name and canonical arguments.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Monomial = Vec<(Atom, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(String),
    Func(String, Vec<RatFunc>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

/// `num / den`. Equality is only structural; use [`RatFunc::same_value`] to
/// compare values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    pub fn integer(n: BigInt) -> Poly {
        Poly::constant(BigRational::from_integer(n))
    }

    pub fn atom(a: Atom) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(a, 1)], BigRational::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mul_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Coefficient of the greatest monomial in the fixed order.
    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    /// Rewrites `atom^power` to `replacement` until no monomial contains a
    /// rule atom at or above its power.
    pub(crate) fn reduce(&self, rules: &[(Atom, u32, Poly)]) -> Poly {
        if rules.is_empty() {
            return self.clone();
        }
        let mut current = self.clone();
        loop {
            let mut changed = false;
            let mut next = Poly::zero();
            for (mono, coeff) in &current.terms {
                let hit = rules.iter().find_map(|(atom, power, repl)| {
                    mono.iter()
                        .position(|(a, e)| a == atom && e >= power)
                        .map(|pos| (pos, *power, repl))
                });
                match hit {
                    Some((pos, power, repl)) => {
                        changed = true;
                        let mut rest = mono.clone();
                        rest[pos].1 -= power;
                        if rest[pos].1 == 0 {
                            rest.remove(pos);
                        }
                        let mut rest_poly = Poly::zero();
                        rest_poly.add_term(rest, coeff.clone());
                        next = next.add(&rest_poly.mul(repl));
                    }
                    None => next.add_term(mono.clone(), coeff.clone()),
                }
            }
            current = next;
            if !changed {
                return current;
            }
        }
    }
}

impl RatFunc {
    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    /// Divides through so that constant denominators become one and other
    /// denominators have leading coefficient one.
    pub fn normalized(self) -> RatFunc {
        if self.num.is_zero() {
            return RatFunc::from_poly(Poly::zero());
        }
        let lead = match self.den.leading_coefficient() {
            Some(c) => c.clone(),
            None => return self,
        };
        let inv = lead.recip();
        RatFunc {
            num: self.num.scale(&inv),
            den: self.den.scale(&inv),
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.den == other.den {
            return RatFunc {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            }
            .normalized();
        }
        RatFunc {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .normalized()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
        .normalized()
    }

    /// `None` when the value is identically zero.
    pub fn recip(&self) -> Option<RatFunc> {
        if self.num.is_zero() {
            None
        } else {
            Some(
                RatFunc {
                    num: self.den.clone(),
                    den: self.num.clone(),
                }
                .normalized(),
            )
        }
    }

    pub fn pow(&self, k: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
        .normalized()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        Some(self.num.as_constant()? / self.den.as_constant()?)
    }

    /// Exact value comparison by cross multiplication.
    pub fn same_value(&self, other: &RatFunc) -> bool {
        self.num
            .mul(&other.den)
            .sub(&other.num.mul(&self.den))
            .is_zero()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(v) => f.write_str(v),
            Atom::Func(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (mono, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if i == 0 {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || mono.is_empty() {
                factors.push(mag.to_string());
            }
            for (a, e) in mono {
                if *e == 1 {
                    factors.push(a.to_string());
                } else {
                    factors.push(format!("{a}^{e}"));
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
