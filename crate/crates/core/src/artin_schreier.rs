//! Artin–Schreier classes of k((z)) in characteristic 2.
//!
//! A class is kept in canonical form: only strictly negative, odd exponents.
//! Over an algebraically closed k, terms of exponent >= 0 are always of the
//! form y^2 - y, and `c z^-2m` is equivalent to `sqrt(c) z^-m`; these two
//! rules reach the canonical form, and it is unique because the classes of
//! `z^-(2i+1)` are independent.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::{LaurentPoly, Var};

pub type FieldPoly = LaurentPoly<FieldElem>;

/// Canonical representative of an element of k((z)) / {y^2 - y}.
#[derive(Clone, PartialEq, Eq)]
pub struct ASClass {
    field: FieldSpec,
    rep: BTreeMap<i64, FieldElem>,
    var: Var,
}

impl ASClass {
    pub fn zero(field: FieldSpec, var: Var) -> Self {
        ASClass {
            field,
            rep: BTreeMap::new(),
            var,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn representative(&self) -> FieldPoly {
        LaurentPoly::from_terms(self.var, self.rep.iter().map(|(e, c)| (*e, *c)))
    }

    /// Coefficient of `z^exponent` in the representative.
    pub fn coeff(&self, exponent: i64) -> FieldElem {
        self.rep.get(&exponent).copied().unwrap_or_else(|| self.field.zero())
    }

    /// Always odd, or 0 for the zero class.
    pub fn pole_order(&self) -> u64 {
        self.rep.keys().next().map_or(0, |e| e.unsigned_abs())
    }

    pub fn leading_coeff(&self) -> Option<FieldElem> {
        self.rep.values().next().copied()
    }
}

impl fmt::Display for ASClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.representative())
    }
}

impl fmt::Debug for ASClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ASClass({} over {})", self.representative(), self.field)
    }
}

fn check_field(field: FieldSpec, f: &FieldPoly) -> Result<()> {
    for (_, c) in f.terms() {
        if c.spec() != field {
            return Err(Error::FieldMismatch {
                left: field.degree(),
                right: c.spec().degree(),
            });
        }
    }
    Ok(())
}

/// Canonical class of `f`.
pub fn reduce_class(field: FieldSpec, f: &FieldPoly) -> Result<ASClass> {
    check_field(field, f)?;
    let mut work: BTreeMap<i64, FieldElem> = f.polar_part().terms().map(|(e, c)| (e, *c)).collect();
    let mut rep = BTreeMap::new();
    // Most negative first: c z^-2m feeds z^-m, which is popped later.
    while let Some((e, c)) = work.pop_first() {
        if e % 2 != 0 {
            rep.insert(e, c);
            continue;
        }
        let root = c.sqrt();
        let slot = work.entry(e / 2).or_insert_with(|| field.zero());
        *slot += root;
        if slot.is_zero() {
            work.remove(&(e / 2));
        }
    }
    Ok(ASClass { field, rep, var: f.var() })
}

pub fn class_add(c1: &ASClass, c2: &ASClass) -> Result<ASClass> {
    if c1.field != c2.field {
        return Err(Error::FieldMismatch {
            left: c1.field.degree(),
            right: c2.field.degree(),
        });
    }
    let sum = c1.representative().add(&c2.representative())?;
    reduce_class(c1.field, &sum)
}

/// Different exponent of the extension w^2 - w = f: pole order + 1.
pub fn different_degree(c: &ASClass) -> Result<u64> {
    if c.is_zero() {
        return Err(Error::ZeroClass);
    }
    Ok(c.pole_order() + 1)
}

/// Genus of the Katz–Gabber cover of w^2 - w = f, totally branched over one
/// point: 2g - 2 = -4 + (d + 1) for pole order d.
pub fn genus_katz_gabber(c: &ASClass) -> Result<u64> {
    if c.is_zero() {
        return Err(Error::ZeroClass);
    }
    Ok((c.pole_order() - 1) / 2)
}

/// Largest search space the brute-force oracle accepts.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Brute-force oracle for class equality: the set of polar parts of
/// `q^2 - q` over all `q` supported on exponents `-bound..=-1`.
///
/// Terms of `q` with exponent >= 0 only contribute exponents >= 0, which are
/// trivial over an algebraically closed field, so two Laurent polynomials are
/// equivalent exactly when the polar part of their difference is in this set.
pub struct PolarImageOracle {
    field: FieldSpec,
    var: Var,
    bound: u32,
    image: HashSet<Vec<(i64, u64)>>,
}

impl PolarImageOracle {
    pub fn new(field: FieldSpec, var: Var, bound: u32) -> Result<Self> {
        let size = (field.size())
            .checked_pow(bound)
            .filter(|s| *s <= BRUTE_FORCE_LIMIT)
            .ok_or(Error::SearchSpaceTooLarge {
                size: field.size().saturating_pow(bound),
                limit: BRUTE_FORCE_LIMIT,
            })?;
        let q_size = field.size() as u64;
        let mut image = HashSet::with_capacity(size as usize);
        let mut digits = vec![0u64; bound as usize];
        for _ in 0..size {
            // q = sum digits[i] z^-(i+1);  q^2 - q = sum d^2 z^-2(i+1) + d z^-(i+1)
            let mut acc: BTreeMap<i64, u64> = BTreeMap::new();
            for (i, &d) in digits.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let b = field.from_bits(d);
                let e = -(i as i64 + 1);
                *acc.entry(e).or_default() ^= b.bits();
                *acc.entry(2 * e).or_default() ^= b.square().bits();
            }
            image.insert(acc.into_iter().filter(|(_, c)| *c != 0).collect());
            for d in digits.iter_mut() {
                *d += 1;
                if *d < q_size {
                    break;
                }
                *d = 0;
            }
        }
        Ok(PolarImageOracle {
            field,
            var,
            bound,
            image,
        })
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Whether `f1 - f2 = q^2 - q` (up to exponents >= 0) for a searched `q`.
    pub fn equivalent(&self, f1: &FieldPoly, f2: &FieldPoly) -> Result<bool> {
        for f in [f1, f2] {
            check_field(self.field, f)?;
            if f.var() != self.var {
                return Err(Error::VariableMismatch {
                    expected: self.var.as_char(),
                    found: f.var().as_char(),
                });
            }
        }
        let diff = f1.sub(f2)?.polar_part();
        let key: Vec<(i64, u64)> = diff.terms().map(|(e, c)| (e, c.bits())).collect();
        Ok(self.image.contains(&key))
    }
}

/// Exhaustive check of `f1 ~ f2` with `q` supported on `-support_bound..=-1`.
pub fn class_equal_bruteforce(
    field: FieldSpec,
    f1: &FieldPoly,
    f2: &FieldPoly,
    support_bound: u32,
) -> Result<bool> {
    PolarImageOracle::new(field, f1.var(), support_bound)?.equivalent(f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(field: FieldSpec, terms: &[(i64, u64)]) -> FieldPoly {
        LaurentPoly::from_terms(Var::Z, terms.iter().map(|&(e, b)| (e, field.from_bits(b))))
    }

    #[test]
    fn polynomial_part_is_trivial() {
        let f = FieldSpec::gf2();
        let c = reduce_class(f, &poly(f, &[(3, 1), (1, 1), (0, 1)])).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn even_pole_folds_to_square_root() {
        let f = FieldSpec::gf2();
        let c = reduce_class(f, &poly(f, &[(-2, 1)])).unwrap();
        assert_eq!(c.representative(), poly(f, &[(-1, 1)]));
    }

    #[test]
    fn folded_terms_cancel() {
        let f = FieldSpec::gf2();
        let g = poly(f, &[(-4, 1), (-2, 1)]);
        assert!(reduce_class(f, &g).unwrap().is_zero());
        assert!(class_equal_bruteforce(f, &g, &poly(f, &[]), 6).unwrap());
    }

    #[test]
    fn class_addition() {
        let f = FieldSpec::new(2).unwrap();
        let c = reduce_class(f, &poly(f, &[(-5, 2), (-2, 3)])).unwrap();
        let zero = ASClass::zero(f, Var::Z);
        assert!(class_add(&c, &c).unwrap().is_zero());
        assert_eq!(class_add(&c, &zero).unwrap(), c);
        let c1 = reduce_class(f, &poly(f, &[(-1, 1)])).unwrap();
        let c3 = reduce_class(f, &poly(f, &[(-3, 1)])).unwrap();
        assert_eq!(class_add(&c1, &c3).unwrap().representative(), poly(f, &[(-3, 1), (-1, 1)]));
    }

    #[test]
    fn bruteforce_examples() {
        let f = FieldSpec::gf2();
        let a = poly(f, &[(-3, 1), (-1, 1)]);
        assert!(class_equal_bruteforce(f, &a, &a, 3).unwrap());
        // q = z^-1: q^2 - q = z^-2 + z^-1
        assert!(class_equal_bruteforce(f, &poly(f, &[(-2, 1)]), &poly(f, &[(-1, 1)]), 3).unwrap());
        assert!(!class_equal_bruteforce(f, &poly(f, &[(-1, 1)]), &poly(f, &[]), 3).unwrap());
    }

    #[test]
    fn bruteforce_guard() {
        let f = FieldSpec::new(8).unwrap();
        let err = class_equal_bruteforce(f, &poly(f, &[]), &poly(f, &[]), 3).unwrap_err();
        assert!(matches!(err, Error::SearchSpaceTooLarge { .. }));
    }

    #[test]
    fn different_and_genus() {
        let f = FieldSpec::gf2();
        let c3 = reduce_class(f, &poly(f, &[(-3, 1)])).unwrap();
        assert_eq!(different_degree(&c3), Ok(4));
        assert_eq!(genus_katz_gabber(&c3), Ok(1));
        let c1 = reduce_class(f, &poly(f, &[(-1, 1)])).unwrap();
        assert_eq!(different_degree(&c1), Ok(2));
        assert_eq!(genus_katz_gabber(&c1), Ok(0));
        let zero = ASClass::zero(f, Var::Z);
        assert_eq!(different_degree(&zero), Err(Error::ZeroClass));
        assert_eq!(genus_katz_gabber(&zero), Err(Error::ZeroClass));
    }

    #[test]
    fn hurwitz_for_pole_order() {
        // 2g - 2 = 2(-2) + (d + 1) for the degree-2 cover of the line
        let f = FieldSpec::gf2();
        for g in 0..6i64 {
            let d = 2 * g + 1;
            let c = reduce_class(f, &poly(f, &[(-d, 1)])).unwrap();
            let genus = genus_katz_gabber(&c).unwrap() as i64;
            assert_eq!(genus, g);
            assert_eq!(2 * genus - 2, -4 + different_degree(&c).unwrap() as i64);
        }
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let f2 = FieldSpec::gf2();
        let f4 = FieldSpec::new(2).unwrap();
        let c = reduce_class(f2, &poly(f2, &[(-1, 1)])).unwrap();
        let d = reduce_class(f4, &poly(f4, &[(-1, 1)])).unwrap();
        assert!(matches!(class_add(&c, &d), Err(Error::FieldMismatch { .. })));
    }
}
