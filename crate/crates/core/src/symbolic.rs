//! Exact symbolic form of the lifting ring.
//!
//! Polynomials over Z in `s` (a square root of 2), `b` (a root of
//! `b^2 + s b + e = 0`), `e`, `g`, coefficients `q0, q1, ...`, and the
//! tower variables `v^-1` and `t^-1`. Normal form has `s` and `b` of degree
//! at most one.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    S,
    B,
    E,
    G,
    Q(u32),
    /// v^-1
    X,
    /// t^-1
    T,
}

impl Sym {
    fn power_text(self, k: u32) -> String {
        let base = match self {
            Sym::S => "s".to_string(),
            Sym::B => "b".to_string(),
            Sym::E => "e".to_string(),
            Sym::G => "g".to_string(),
            Sym::Q(i) => format!("q{i}"),
            Sym::X => return format!("v^-{k}"),
            Sym::T => return format!("t^-{k}"),
        };
        if k == 1 {
            base
        } else {
            format!("{base}^{k}")
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Sym, u32>);

impl Monomial {
    pub fn degree(&self, sym: Sym) -> u32 {
        self.0.get(&sym).copied().unwrap_or(0)
    }

    fn with_degree(&self, sym: Sym, k: u32) -> Self {
        let mut m = self.clone();
        if k == 0 {
            m.0.remove(&sym);
        } else {
            m.0.insert(sym, k);
        }
        m
    }

    fn times(&self, other: &Monomial) -> Self {
        let mut m = self.clone();
        for (s, k) in &other.0 {
            *m.0.entry(*s).or_default() += k;
        }
        m
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(s, k)| s.power_text(*k)).collect();
        f.write_str(&parts.join("*"))
    }
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct SymbolicElem {
    terms: BTreeMap<Monomial, BigInt>,
}

impl SymbolicElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn int(k: i64) -> Self {
        Self::from_terms([(Monomial::default(), BigInt::from(k))])
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn sym(sym: Sym) -> Self {
        Self::sym_pow(sym, 1)
    }

    pub fn sym_pow(sym: Sym, k: u32) -> Self {
        Self::from_terms([(Monomial::default().with_degree(sym, k), BigInt::from(1))]).normalize()
    }

    pub fn s() -> Self {
        Self::sym(Sym::S)
    }
    pub fn beta() -> Self {
        Self::sym(Sym::B)
    }
    pub fn eta() -> Self {
        Self::sym(Sym::E)
    }
    pub fn gamma() -> Self {
        Self::sym(Sym::G)
    }
    pub fn q(i: u32) -> Self {
        Self::sym(Sym::Q(i))
    }
    /// v^-k
    pub fn x_pow(k: u32) -> Self {
        Self::sym_pow(Sym::X, k)
    }
    /// t^-k
    pub fn t_pow(k: u32) -> Self {
        Self::sym_pow(Sym::T, k)
    }

    fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut out = SymbolicElem::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// True when no `s^2` or `b^2` remains.
    pub fn is_normal(&self) -> bool {
        self.terms
            .keys()
            .all(|m| m.degree(Sym::S) < 2 && m.degree(Sym::B) < 2)
    }

    /// Rewrites `s^2 -> 2` and `b^2 -> -s b - e` until neither applies.
    pub fn normalize(&self) -> Self {
        let mut work: Vec<(Monomial, BigInt)> =
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        let mut out = SymbolicElem::zero();
        while let Some((m, c)) = work.pop() {
            let ds = m.degree(Sym::S);
            let db = m.degree(Sym::B);
            if ds >= 2 {
                work.push((m.with_degree(Sym::S, ds - 2), c * 2));
            } else if db >= 2 {
                let rest = m.with_degree(Sym::B, db - 2);
                let sb = Monomial::default().with_degree(Sym::S, 1).with_degree(Sym::B, 1);
                let e = Monomial::default().with_degree(Sym::E, 1);
                work.push((rest.times(&sb), -c.clone()));
                work.push((rest.times(&e), -c));
            } else {
                out.add_term(m, c);
            }
        }
        out
    }

    /// Product without normalization.
    pub fn mul_unreduced(&self, other: &Self) -> Self {
        let mut out = SymbolicElem::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c * &k)))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Replaces `sym` by `image` everywhere.
    pub fn substitute(&self, sym: Sym, image: &Self) -> Self {
        let mut out = SymbolicElem::zero();
        for (m, c) in &self.terms {
            let k = m.degree(sym);
            let rest = Self::from_terms([(m.with_degree(sym, 0), c.clone())]);
            out = &out + &(&rest * &image.pow(k));
        }
        out
    }

    /// `t^-1 -> v^-2 - v^-1`
    pub fn substitute_t(&self) -> Self {
        self.substitute(Sym::T, &(&Self::x_pow(2) - &Self::x_pow(1)))
    }
}

impl fmt::Display for SymbolicElem {
    /// Descending monomial order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let one = BigInt::from(1);
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.sign() == num_bigint::Sign::Minus;
            let mag = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (m.0.is_empty(), mag == one) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{m}")?,
                (false, false) => write!(f, "{mag}*{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolicElem({self})")
    }
}

impl Add for &SymbolicElem {
    type Output = SymbolicElem;
    fn add(self, rhs: &SymbolicElem) -> SymbolicElem {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &SymbolicElem {
    type Output = SymbolicElem;
    fn neg(self) -> SymbolicElem {
        self.scale(-1)
    }
}

impl Sub for &SymbolicElem {
    type Output = SymbolicElem;
    fn sub(self, rhs: &SymbolicElem) -> SymbolicElem {
        self + &(-rhs)
    }
}

impl Mul for &SymbolicElem {
    type Output = SymbolicElem;
    fn mul(self, rhs: &SymbolicElem) -> SymbolicElem {
        self.mul_unreduced(rhs).normalize()
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for SymbolicElem {
            type Output = SymbolicElem;
            fn $m(self, rhs: SymbolicElem) -> SymbolicElem {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for SymbolicElem {
    type Output = SymbolicElem;
    fn neg(self) -> SymbolicElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squares_to_two() {
        let s = SymbolicElem::s();
        assert_eq!(&s * &s, SymbolicElem::int(2));
        assert_eq!(s.pow(5), SymbolicElem::s().scale(4));
    }

    #[test]
    fn beta_relation() {
        let b = SymbolicElem::beta();
        let s = SymbolicElem::s();
        let e = SymbolicElem::eta();
        let rel = &(&(&b * &b) + &(&s * &b)) + &e;
        assert!(rel.is_zero());
    }

    #[test]
    fn beta_cubed_is_normal() {
        let b3 = SymbolicElem::beta().pow(3);
        assert!(b3.is_normal());
        // b^3 = b(-s b - e) = -s(-s b - e) - e b = 2b + s e - e b
        assert_eq!(b3.to_string(), "-b*e + 2*b + s*e");
    }

    #[test]
    fn t_substitution() {
        let t = SymbolicElem::t_pow(1);
        assert_eq!(t.substitute_t().to_string(), "v^-2 - v^-1");
        assert_eq!(SymbolicElem::t_pow(2).substitute_t(), (&SymbolicElem::x_pow(2) - &SymbolicElem::x_pow(1)).pow(2));
    }

    #[test]
    fn display() {
        let x = &SymbolicElem::eta().scale(-8) * &SymbolicElem::x_pow(1);
        assert_eq!(x.to_string(), "-8*e*v^-1");
        assert_eq!(SymbolicElem::zero().to_string(), "0");
    }
}
