//! Text syntax for field elements and Laurent polynomials.
//!
//! ```text
//! expr   := [+|-] term ((+|-) term)*
//! term   := factor (* factor)*
//! factor := atom (^ [-] integer)?
//! atom   := integer | a | t | v | z | ( expr )
//! ```
//!
//! Integers are read mod 2 and `-` is `+`. `a` is the field generator.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::{LaurentPoly, Var};
use crate::tower::t_inverse_image;

/// Exponents of `(t, v, z)`.
type Mono = (i64, i64, i64);

/// Sparse polynomial in `t, v, z` with coefficients in the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    field: FieldSpec,
    terms: BTreeMap<Mono, FieldElem>,
}

impl Expr {
    fn zero(field: FieldSpec) -> Self {
        Expr {
            field,
            terms: BTreeMap::new(),
        }
    }

    fn constant(c: FieldElem) -> Self {
        let mut e = Self::zero(c.spec());
        e.add_term((0, 0, 0), c);
        e
    }

    fn monomial(field: FieldSpec, m: Mono) -> Self {
        let mut e = Self::zero(field);
        e.add_term(m, field.one());
        e
    }

    fn add_term(&mut self, m: Mono, c: FieldElem) {
        let slot = self.terms.entry(m).or_insert_with(|| self.field.zero());
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term((m1.0 + m2.0, m1.1 + m2.1, m1.2 + m2.2), *c1 * *c2);
            }
        }
        out
    }

    fn uses(&self, pick: impl Fn(&Mono) -> i64) -> bool {
        self.terms.keys().any(|m| pick(m) != 0)
    }

    /// The value as a field element, if no variable occurs.
    pub fn to_field_elem(&self) -> Result<FieldElem> {
        if self.uses(|m| m.0) || self.uses(|m| m.1) || self.uses(|m| m.2) {
            return Err(Error::InvalidInput("expected a field element, found a variable".into()));
        }
        Ok(self.terms.get(&(0, 0, 0)).copied().unwrap_or_else(|| self.field.zero()))
    }

    /// The variable the expression naturally lives in: `v` if `v` occurs,
    /// else `t` if `t` occurs, else `z`.
    pub fn natural_var(&self) -> Var {
        if self.uses(|m| m.1) {
            Var::V
        } else if self.uses(|m| m.0) {
            Var::T
        } else {
            Var::Z
        }
    }

    /// Converts to a polynomial in `target`. For `v`, powers `t^-i` are
    /// rewritten as `(v^-2 + v^-1)^i`.
    pub fn to_poly(&self, target: Var) -> Result<LaurentPoly<FieldElem>> {
        let mixing = |what: &str| Error::InvalidInput(format!("cannot mix {what} in one polynomial"));
        let mut out = LaurentPoly::zero(target);
        match target {
            Var::Z => {
                if self.uses(|m| m.0) || self.uses(|m| m.1) {
                    return Err(mixing("z with t or v"));
                }
                for (m, c) in &self.terms {
                    out.add_term(m.2, *c);
                }
            }
            Var::T => {
                if self.uses(|m| m.2) {
                    return Err(mixing("z with t"));
                }
                if self.uses(|m| m.1) {
                    return Err(Error::InvalidInput("a polynomial in t cannot contain v".into()));
                }
                for (m, c) in &self.terms {
                    out.add_term(m.0, *c);
                }
            }
            Var::V => {
                if self.uses(|m| m.2) {
                    return Err(mixing("z with v"));
                }
                let image = t_inverse_image(self.field);
                for (m, c) in &self.terms {
                    if m.0 > 0 {
                        return Err(Error::PositiveExponentPresent { exponent: m.0 });
                    }
                    let t_part = image.pow((-m.0) as u32, &self.field.one());
                    out = out.add(&t_part.shift(m.1).scale(c))?;
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    field: FieldSpec,
}

impl<'s> Parser<'s> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let _ = self.eat(b'+') || self.eat(b'-');
        let mut acc = self.term()?;
        while self.eat(b'+') || self.eat(b'-') {
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        let start = self.pos;
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        let k = match self.integer()? {
            Some(k) => k,
            None => return self.err("expected an integer exponent"),
        };
        if !negative {
            let k = u32::try_from(k).or_else(|_| self.err("exponent too large"))?;
            return Ok((0..k).fold(Expr::constant(self.field.one()), |acc, _| acc.mul(&base)));
        }
        let k = i64::try_from(k).or_else(|_| self.err("exponent too large"))?;
        if base.terms.len() != 1 {
            self.pos = start;
            return self.err("negative powers are only defined for single terms");
        }
        let (&(i, j, l), &c) = base.terms.iter().next().expect("one term");
        let Some(inv) = c.inverse() else {
            self.pos = start;
            return self.err("zero has no negative powers");
        };
        let mut out = Expr::zero(self.field);
        out.add_term((-i * k, -j * k, -l * k), inv.pow(k as u128));
        Ok(out)
    }

    fn integer(&mut self) -> Result<Option<u128>> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match text.parse::<u128>() {
            Ok(k) => Ok(Some(k)),
            Err(_) => {
                self.pos = start;
                self.err("integer too large")
            }
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let f = self.field;
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(b'0'..=b'9') => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let odd = (self.src[self.pos - 1] - b'0') % 2 == 1;
                Ok(Expr::constant(if odd { f.one() } else { f.zero() }))
            }
            Some(b'a') => {
                self.pos += 1;
                Ok(Expr::constant(f.generator()))
            }
            Some(b't') => {
                self.pos += 1;
                Ok(Expr::monomial(f, (1, 0, 0)))
            }
            Some(b'v') => {
                self.pos += 1;
                Ok(Expr::monomial(f, (0, 1, 0)))
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(Expr::monomial(f, (0, 0, 1)))
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
        }
    }
}

/// Parses a whole expression.
pub fn parse_expr(field: FieldSpec, text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        field,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

pub fn parse_field_elem(field: FieldSpec, text: &str) -> Result<FieldElem> {
    parse_expr(field, text)?.to_field_elem()
}

/// Parses a polynomial in its natural variable (see [`Expr::natural_var`]).
pub fn parse_poly(field: FieldSpec, text: &str) -> Result<LaurentPoly<FieldElem>> {
    let e = parse_expr(field, text)?;
    e.to_poly(e.natural_var())
}

pub fn parse_poly_in(field: FieldSpec, text: &str, var: Var) -> Result<LaurentPoly<FieldElem>> {
    parse_expr(field, text)?.to_poly(var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_elements() {
        let f = FieldSpec::new(4).unwrap();
        let a = f.generator();
        assert_eq!(parse_field_elem(f, "a^3 + a + 1").unwrap(), a * a * a + a + f.one());
        assert_eq!(parse_field_elem(f, "a*(a+1)").unwrap(), a * a + a);
        assert_eq!(parse_field_elem(f, "3").unwrap(), f.one());
        assert_eq!(parse_field_elem(f, "-a - a").unwrap(), f.zero());
        assert_eq!(parse_field_elem(f, "a^-1").unwrap() * a, f.one());
    }

    #[test]
    fn display_round_trip() {
        let f = FieldSpec::new(8).unwrap();
        for x in f.elements() {
            assert_eq!(parse_field_elem(f, &x.to_string()).unwrap(), x);
        }
    }

    #[test]
    fn polynomials() {
        let f = FieldSpec::new(4).unwrap();
        let p = parse_poly(f, "a^3*v^-1 + v^-3 + 1").unwrap();
        assert_eq!(p.var(), Var::V);
        assert_eq!(parse_poly(f, &p.to_string()).unwrap(), p);
        let z = parse_poly(f, "z^-2").unwrap();
        assert_eq!(z.var(), Var::Z);
        assert_eq!(z.to_string(), "z^-2");
    }

    #[test]
    fn t_is_rewritten_in_v() {
        let f = FieldSpec::gf2();
        let p = parse_poly(f, "t^-1*v^-1").unwrap();
        assert_eq!(p.to_string(), "v^-2 + v^-3");
        assert_eq!(parse_poly(f, "t^-3").unwrap().var(), Var::T);
        assert_eq!(
            parse_poly_in(f, "t^2", Var::V),
            Err(Error::PositiveExponentPresent { exponent: 2 })
        );
    }

    #[test]
    fn errors_carry_positions() {
        let f = FieldSpec::gf2();
        assert!(matches!(parse_expr(f, "v^-1 + * 2"), Err(Error::Parse { position: 7, .. })));
        assert!(matches!(parse_expr(f, "(v"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_expr(f, "v^x"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_expr(f, "q"), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse_expr(f, "v v"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_expr(f, "(v+1)^-1"), Err(Error::Parse { position: 0, .. })));
    }

    #[test]
    fn mixing_z_is_rejected() {
        let f = FieldSpec::gf2();
        assert!(matches!(parse_poly(f, "z^-1 + v^-1"), Err(Error::InvalidInput(_))));
    }
}
