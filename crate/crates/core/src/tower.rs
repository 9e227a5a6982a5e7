//! The tower k((t)) ⊂ k((v)) with v^-2 - v^-1 = t^-1, and supersimple
//! D4-extensions on top of it.
//!
//! Classes over k((v)) are represented by polynomials in `X = v^-1`. In
//! characteristic 2 the conjugation is `X -> X + 1`.

use std::fmt;

use crate::artin_schreier::{class_add, reduce_class, ASClass, FieldPoly};
use crate::error::{Error, Result};
use crate::field::{solve_additive, solve_artin_schreier, Embedding, ExtensionPolicy, FieldElem, FieldSpec};
use crate::laurent::{LaurentPoly, Var};

/// `v^-2 + v^-1`, the image of `t^-1`.
pub fn t_inverse_image(field: FieldSpec) -> FieldPoly {
    LaurentPoly::from_terms(Var::V, [(-2, field.one()), (-1, field.one())])
}

fn expect_var(f: &FieldPoly, var: Var) -> Result<()> {
    if f.var() == var || f.is_zero() {
        Ok(())
    } else {
        Err(Error::VariableMismatch {
            expected: var.as_char(),
            found: f.var().as_char(),
        })
    }
}

/// Rewrites a polynomial in `t^-1` as a polynomial in `v^-1`.
pub fn pull_back(field: FieldSpec, f: &FieldPoly) -> Result<FieldPoly> {
    expect_var(f, Var::T)?;
    Ok(f.compose_inverse(&t_inverse_image(field))?.with_var(Var::V))
}

/// `v^-1 -> v^-1 + 1`.
pub fn conjugate(f: &FieldPoly) -> Result<FieldPoly> {
    expect_var(f, Var::V)?;
    let Some(field) = f.terms().next().map(|(_, c)| c.spec()) else {
        return Ok(f.clone());
    };
    let image = LaurentPoly::from_terms(Var::V, [(-1, field.one()), (0, field.one())]);
    f.compose_inverse(&image)
}

pub fn conjugate_class(c: &ASClass) -> Result<ASClass> {
    reduce_class(c.field(), &conjugate(&c.representative())?)
}

/// Class of `f + sigma(f)`.
pub fn norm_class(c: &ASClass) -> Result<ASClass> {
    let rep = c.representative();
    reduce_class(c.field(), &rep.add(&conjugate(&rep)?)?)
}

/// Class of `eta^2 t^-1 v^-1` in k((v)).
pub fn psi(eta: FieldElem) -> ASClass {
    let field = eta.spec();
    let e2 = eta.square();
    let f = LaurentPoly::from_terms(Var::V, [(-3, e2), (-2, e2)]);
    reduce_class(field, &f).expect("single field")
}

/// Shape of the degree-4 extension of k((t)) defined by a class over k((v)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaloisType {
    /// The zero class: nothing is adjoined.
    Trivial,
    /// The class is sigma-fixed.
    Galois,
    /// The Galois closure has group D4.
    NonGalois,
}

impl fmt::Display for GaloisType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaloisType::Trivial => "trivial",
            GaloisType::Galois => "galois",
            GaloisType::NonGalois => "non-galois",
        })
    }
}

pub fn galois_type(c: &ASClass) -> Result<GaloisType> {
    if c.is_zero() {
        return Ok(GaloisType::Trivial);
    }
    Ok(if conjugate_class(c)? == *c {
        GaloisType::Galois
    } else {
        GaloisType::NonGalois
    })
}

pub fn is_galois_over_base(c: &ASClass) -> Result<bool> {
    match galois_type(c)? {
        GaloisType::Trivial => Err(Error::ZeroClass),
        t => Ok(t == GaloisType::Galois),
    }
}

/// Whether the norm of `c` has different 2.
pub fn is_supersimple(c: &ASClass) -> Result<bool> {
    if is_galois_over_base(c)? {
        return Err(Error::NotD4(format!("{c} is fixed by conjugation")));
    }
    Ok(norm_class(c)?.pole_order() == 1)
}

/// `eta` and `Q(t^-1)` with `w^2 - w = eta^2 t^-1 v^-1 + Q(t^-1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct SupersimpleDescription {
    eta: FieldElem,
    q: FieldPoly,
}

impl SupersimpleDescription {
    /// `q` must be a polynomial in `t^-1` with only odd exponents.
    pub fn new(eta: FieldElem, q: FieldPoly) -> Result<Self> {
        expect_var(&q, Var::T)?;
        for (e, c) in q.terms() {
            if c.spec() != eta.spec() {
                return Err(Error::FieldMismatch {
                    left: eta.spec().degree(),
                    right: c.spec().degree(),
                });
            }
            if e >= 0 || e % 2 == 0 {
                return Err(Error::InvalidInput(format!(
                    "Q may only contain odd negative powers of t, found t^{e}"
                )));
            }
        }
        Ok(SupersimpleDescription {
            eta,
            q: q.with_var(Var::T),
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.eta.spec()
    }

    pub fn eta(&self) -> FieldElem {
        self.eta
    }

    pub fn q(&self) -> &FieldPoly {
        &self.q
    }

    /// `max(1, deg Q)` with the degree taken in `t^-1`.
    pub fn d(&self) -> u64 {
        self.q.pole_order().max(1)
    }

    pub fn m(&self) -> u64 {
        (self.d() - 1) / 2
    }

    /// False when `eta` lies in GF(2), where the degree-4 extension is Galois.
    pub fn is_d4(&self) -> bool {
        !self.eta.in_prime_field()
    }

    /// The class of `eta^2 t^-1 v^-1 + Q` over k((v)).
    pub fn class(&self) -> ASClass {
        let pulled = pull_back(self.field(), &self.q).expect("Q is a polynomial in t^-1");
        let q_class = reduce_class(self.field(), &pulled).expect("single field");
        class_add(&psi(self.eta), &q_class).expect("single field")
    }
}

impl fmt::Display for SupersimpleDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eta = {}, Q = {}", self.eta, self.q)
    }
}

impl fmt::Debug for SupersimpleDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SupersimpleDescription({self})")
    }
}

/// `max(4, 2d)`.
pub fn different_of_composite(desc: &SupersimpleDescription) -> u64 {
    (2 * desc.d()).max(4)
}

/// Which root of `eta^2 + eta = alpha` the classification settled on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaBranch {
    /// The root returned by the Artin–Schreier solver.
    Root,
    /// The other root, `eta + 1`.
    RootPlusOne,
}

impl fmt::Display for EtaBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EtaBranch::Root => "eta",
            EtaBranch::RootPlusOne => "eta+1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub description: SupersimpleDescription,
    pub branch: EtaBranch,
    /// Set when the computation had to move to GF(2^2n).
    pub embedding: Option<Embedding>,
}

/// GF(2)-linear map `c -> coefficient of v^-(2d-1) in the class of c t^-d`.
#[derive(Clone, Debug)]
pub struct LeadingMap {
    field: FieldSpec,
    d: u64,
    images: Vec<FieldElem>,
}

impl LeadingMap {
    pub fn new(field: FieldSpec, d: u64) -> Self {
        let images = (0..field.degree())
            .map(|i| Self::evaluate(field, d, field.from_bits(1 << i)))
            .collect();
        LeadingMap { field, d, images }
    }

    fn evaluate(field: FieldSpec, d: u64, c: FieldElem) -> FieldElem {
        let q = LaurentPoly::monomial(Var::T, -(d as i64), c);
        let pulled = pull_back(field, &q).expect("monomial in t^-1");
        reduce_class(field, &pulled).expect("single field").coeff(1 - 2 * d as i64)
    }

    pub fn apply(&self, c: FieldElem) -> FieldElem {
        (0..self.field.degree())
            .filter(|i| c.bits() >> i & 1 == 1)
            .fold(self.field.zero(), |acc, i| acc + self.images[i as usize])
    }

    /// Smallest `c` with `apply(c) = target`.
    pub fn solve(&self, target: FieldElem) -> Option<FieldElem> {
        solve_additive(self.field, |c| self.apply(c), target)
    }

    pub fn degree(&self) -> u64 {
        self.d
    }
}

/// Finds `Q(t^-1)`, odd exponents only, whose pull-back has class `g`.
pub fn descend(g: &ASClass) -> Result<FieldPoly> {
    let field = g.field();
    let mut work = g.clone();
    let mut q = FieldPoly::zero(Var::T);
    while !work.is_zero() {
        let p = work.pole_order();
        let d = (p + 1) / 2;
        if d % 2 == 0 {
            return Err(Error::DescentFailed(format!(
                "pole order {p} in v does not come from k((t))"
            )));
        }
        let lead = work.leading_coeff().expect("nonzero class");
        let c = match LeadingMap::new(field, d).solve(lead) {
            Some(c) => c,
            None if d == 1 => return Err(Error::NoSolutionInField { degree: field.degree() }),
            None => return Err(Error::DescentFailed(format!("no coefficient for t^-{d}"))),
        };
        let term = LaurentPoly::monomial(Var::T, -(d as i64), c);
        q.add_term(-(d as i64), c);
        let pulled = reduce_class(field, &pull_back(field, &term)?)?;
        work = class_add(&work, &pulled)?;
        if work.pole_order() >= p && !work.is_zero() {
            return Err(Error::DescentFailed(format!("leading term at v^-{p} did not cancel")));
        }
    }
    Ok(q)
}

fn classify_in_field(c: &ASClass) -> Result<(SupersimpleDescription, EtaBranch)> {
    let field = c.field();
    if !is_supersimple(c)? {
        return Err(Error::DescentFailed(format!(
            "norm of {c} has different {}, not 2",
            norm_class(c)?.pole_order() + 1
        )));
    }
    let alpha = norm_class(c)?.coeff(-1);
    let root = solve_artin_schreier(alpha)?;
    let mut obstruction = None;
    for (eta, branch) in [(root, EtaBranch::Root), (root + field.one(), EtaBranch::RootPlusOne)] {
        let g = class_add(c, &psi(eta))?;
        match descend(&g) {
            Ok(q) => {
                let desc = SupersimpleDescription::new(eta, q)?;
                if desc.class() != *c {
                    return Err(Error::DescentFailed("re-substitution does not reproduce the class".into()));
                }
                return Ok((desc, branch));
            }
            Err(e @ Error::NoSolutionInField { .. }) => obstruction = Some(e),
            Err(_) => {}
        }
    }
    Err(obstruction.unwrap_or_else(|| Error::DescentFailed(format!("neither eta branch descends for {c}"))))
}

fn embed_class(c: &ASClass, embedding: &Embedding) -> Result<ASClass> {
    let rep = c.representative().map_coeffs(|x| embedding.apply(*x));
    reduce_class(embedding.target(), &rep)
}

/// Recovers `(eta, Q)` with `c = psi(eta) + class(Q)`.
pub fn classify_supersimple(c: &ASClass, policy: ExtensionPolicy) -> Result<Classification> {
    if c.is_zero() {
        return Err(Error::ZeroClass);
    }
    if c.var() != Var::V {
        return Err(Error::VariableMismatch {
            expected: 'v',
            found: c.var().as_char(),
        });
    }
    match classify_in_field(c) {
        Ok((description, branch)) => Ok(Classification {
            description,
            branch,
            embedding: None,
        }),
        Err(Error::NoSolutionInField { .. }) if policy == ExtensionPolicy::AutoExtend => {
            let embedding = c.field().quadratic_extension()?;
            let (description, branch) = classify_in_field(&embed_class(c, &embedding)?)?;
            Ok(Classification {
                description,
                branch,
                embedding: Some(embedding),
            })
        }
        Err(e) => Err(e),
    }
}
