//! Sparse Laurent polynomials in one tagged variable.
//!
//! Exponents are exponents of the variable itself, so `v^-3` is stored under
//! `-3`. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldElem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Parameter of the base field k((t)).
    T,
    /// Parameter of the quadratic extension k((v)), with v^-2 - v^-1 = t^-1.
    V,
    /// A free parameter, for classes not tied to the tower.
    Z,
}

impl Var {
    pub fn as_char(self) -> char {
        match self {
            Var::T => 't',
            Var::V => 'v',
            Var::Z => 'z',
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Coefficient rings usable in [`LaurentPoly`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative identity of the ring `self` belongs to.
    fn one_like(&self) -> Self;
    /// True when the coefficient prints as a single token (no `+`).
    fn is_atomic(&self) -> bool {
        true
    }
}

impl Coefficient for FieldElem {
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        *self + *other
    }
    fn sub(&self, other: &Self) -> Self {
        *self - *other
    }
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn one_like(&self) -> Self {
        self.spec().one()
    }
    fn is_atomic(&self) -> bool {
        self.bits().count_ones() <= 1
    }
}

#[derive(Clone, PartialEq)]
pub struct LaurentPoly<C> {
    var: Var,
    terms: BTreeMap<i64, C>,
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero(var: Var) -> Self {
        LaurentPoly {
            var,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(var: Var, exponent: i64, coeff: C) -> Self {
        let mut p = Self::zero(var);
        p.add_term(exponent, coeff);
        p
    }

    pub fn from_terms(var: Var, terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut p = Self::zero(var);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn var(&self) -> Var {
        self.var
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

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &C)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exponent: i64) -> Option<&C> {
        self.terms.get(&exponent)
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Order of the pole at 0, or 0 when there is none.
    pub fn pole_order(&self) -> u64 {
        self.min_exponent().map_or(0, |e| e.min(0).unsigned_abs())
    }

    /// Degree as a polynomial in the inverse variable; `None` for zero or
    /// when positive powers are present.
    pub fn inverse_degree(&self) -> Option<u64> {
        match (self.min_exponent(), self.max_exponent()) {
            (Some(lo), Some(hi)) if hi <= 0 => Some(lo.unsigned_abs()),
            _ => None,
        }
    }

    pub fn add_term(&mut self, exponent: i64, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&exponent) {
            None => {
                self.terms.insert(exponent, coeff);
            }
            Some(old) => {
                let sum = old.add(&coeff);
                if !sum.is_zero() {
                    self.terms.insert(exponent, sum);
                }
            }
        }
    }

    fn same_var(&self, other: &Self) -> Result<()> {
        if self.var == other.var {
            Ok(())
        } else {
            Err(Error::VariableMismatch {
                expected: self.var.as_char(),
                found: other.var.as_char(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_var(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            var: self.var,
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.var, self.terms().map(|(e, c)| (e, c.mul(k))))
    }

    /// Multiplies by `var^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        LaurentPoly {
            var: self.var,
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_var(other)?;
        let mut out = Self::zero(self.var);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32, one: &C) -> Self {
        let mut acc = Self::monomial(self.var, 0, one.clone());
        for _ in 0..k {
            acc = acc.mul(self).expect("same variable");
        }
        acc
    }

    /// Drops every term with exponent >= 0.
    pub fn polar_part(&self) -> Self {
        LaurentPoly {
            var: self.var,
            terms: self.terms.range(..0).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// Substitutes `var^-1 := image` where `image` is a polynomial in another
    /// (or the same) variable. Only non-positive exponents are allowed.
    pub fn compose_inverse(&self, image: &Self) -> Result<Self> {
        let Some(one) = self.terms.values().next().map(|c| c.one_like()) else {
            return Ok(Self::zero(image.var));
        };
        let mut out = Self::zero(image.var);
        let mut power = Self::monomial(image.var, 0, one);
        let mut current = 0i64;
        for (e, c) in self.terms.iter().rev() {
            if *e > 0 {
                return Err(Error::PositiveExponentPresent { exponent: *e });
            }
            while current > *e {
                power = power.mul(image)?;
                current -= 1;
            }
            out = out.add(&power.scale(c))?;
        }
        Ok(out)
    }

    /// Same terms, relabelled to another variable.
    pub fn with_var(&self, var: Var) -> Self {
        LaurentPoly {
            var,
            terms: self.terms.clone(),
        }
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        LaurentPoly::from_terms(self.var, self.terms().map(|(e, c)| (e, f(c))))
    }
}

impl<C: Coefficient + Eq> Eq for LaurentPoly<C> {}

fn format_exponent(var: Var, e: i64) -> String {
    match e {
        1 => var.to_string(),
        _ => format!("{var}^{e}"),
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for LaurentPoly<C> {
    /// Descending exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let is_one = *c == c.one_like();
            let coeff = if c.is_atomic() {
                c.to_string()
            } else {
                format!("({c})")
            };
            match (*e, is_one) {
                (0, _) => f.write_str(&c.to_string())?,
                (_, true) => f.write_str(&format_exponent(self.var, *e))?,
                (_, false) => write!(f, "{coeff}*{}", format_exponent(self.var, *e))?,
            }
        }
        Ok(())
    }
}

impl<C: Coefficient + fmt::Display> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn gf2_poly(var: Var, exps: &[i64]) -> LaurentPoly<FieldElem> {
        let one = FieldSpec::gf2().one();
        LaurentPoly::from_terms(var, exps.iter().map(|&e| (e, one)))
    }

    #[test]
    fn characteristic_two_cancels() {
        let f = gf2_poly(Var::Z, &[-3, 1, 4]);
        assert!(f.add(&f).unwrap().is_zero());
    }

    #[test]
    fn exponents_add_under_multiplication() {
        let f = gf2_poly(Var::V, &[-2, -1]);
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq, gf2_poly(Var::V, &[-4, -2]));
    }

    #[test]
    fn substituting_t_inverse() {
        // t^-2 -> (v^-2 + v^-1)^2 = v^-4 + v^-2
        let q = gf2_poly(Var::T, &[-2]);
        let image = gf2_poly(Var::V, &[-2, -1]);
        assert_eq!(q.compose_inverse(&image).unwrap(), gf2_poly(Var::V, &[-4, -2]));
        let bad = gf2_poly(Var::T, &[1]);
        assert_eq!(
            bad.compose_inverse(&image),
            Err(Error::PositiveExponentPresent { exponent: 1 })
        );
    }

    #[test]
    fn display_is_descending() {
        let f = FieldSpec::new(4).unwrap();
        let a = f.generator();
        let p = LaurentPoly::from_terms(Var::V, [(-3, f.one()), (0, f.one()), (-1, a * a * a + a)]);
        assert_eq!(p.to_string(), "1 + (a^3 + a)*v^-1 + v^-3");
        assert_eq!(LaurentPoly::<FieldElem>::zero(Var::T).to_string(), "0");
    }

    #[test]
    fn variable_mismatch_is_an_error() {
        let f = gf2_poly(Var::T, &[-1]);
        let g = gf2_poly(Var::V, &[-1]);
        assert!(matches!(f.add(&g), Err(Error::VariableMismatch { .. })));
    }
}
