//! Lift certificates: `F`, `G`, `H` over the truncated lifting ring for a
//! given supersimple description, plus the checks that make them a lift.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::artin_schreier::{genus_katz_gabber, reduce_class, ASClass, FieldPoly};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::{LaurentPoly, Var};
use crate::parse::parse_field_elem;
use crate::tower::{different_of_composite, SupersimpleDescription};
use crate::witt::{WittElem, WittRing};

pub type RPoly = LaurentPoly<WittElem>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftCase {
    /// `deg Q <= 1`: `G = 1 + s b v^-1`.
    Small,
    /// `deg Q = 2m + 1 >= 3`: `G = 1 + s b v^-1 + s g t^-m`.
    General,
}

impl LiftCase {
    fn name(self) -> &'static str {
        match self {
            LiftCase::Small => "small",
            LiftCase::General => "general",
        }
    }
}

/// Summand `coeff * t^-t_power * v^-v_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertTerm {
    pub label: String,
    pub coeff: WittElem,
    pub t_power: u32,
    pub v_power: u32,
}

/// Lifted data the polynomials are built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftParameters {
    pub ring: Arc<WittRing>,
    pub case: LiftCase,
    pub eta: WittElem,
    pub gamma: Option<WittElem>,
    pub m: Option<u32>,
    /// Polynomial in `t^-1`.
    pub q_prime: RPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub identity_verified: bool,
    pub h_division_exact: bool,
    pub g_reduces_to_one: bool,
    pub reduction_matches: bool,
    pub non_galois_witness_unit: bool,
    pub witness_valuation: u32,
    pub branch_points_over_c2: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusReport {
    /// Degree of `F` in `v^-1`.
    pub deg_f: u64,
    pub g2: u64,
    pub g3: u64,
    /// Different of the reduced double cover, `2 g2 + 2`.
    pub different: u64,
    pub composite_different: u64,
    pub katz_gabber_genus: u64,
    pub hurwitz_consistent: bool,
}

impl GenusReport {
    pub fn consistent(&self) -> bool {
        self.hurwitz_consistent && self.katz_gabber_genus == self.g2 && self.different == self.composite_different
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCertificate {
    pub field: FieldSpec,
    pub precision: u32,
    pub description: SupersimpleDescription,
    pub parameters: LiftParameters,
    pub f_terms: Vec<CertTerm>,
    pub g_terms: Vec<CertTerm>,
    /// Polynomials in `v^-1`.
    pub f: RPoly,
    pub g: RPoly,
    /// Polynomial in `t^-1`.
    pub h: RPoly,
    pub checks: Checks,
    pub genus: GenusReport,
}

// ---- dense polynomials in X = v^-1 ------------------------------------------

type Dense = Vec<WittElem>;

fn dense_zero(ring: &Arc<WittRing>, len: usize) -> Dense {
    vec![WittElem::zero(ring); len]
}

fn dense_trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn dense_add(ring: &Arc<WittRing>, a: &[WittElem], b: &[WittElem]) -> Dense {
    let mut out = dense_zero(ring, a.len().max(b.len()));
    for (i, c) in a.iter().enumerate() {
        out[i] = &out[i] + c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = &out[i] + c;
    }
    dense_trim(out)
}

fn dense_mul(ring: &Arc<WittRing>, a: &[WittElem], b: &[WittElem]) -> Dense {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = dense_zero(ring, a.len() + b.len() - 1);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    dense_trim(out)
}

/// Signed coefficients of `(X^2 - X)^j`, indexed by the power of `X`,
/// exact modulo 2^64.
fn t_power_in_x(j: u32) -> Vec<u64> {
    let j = j as usize;
    let mut row = vec![1u64];
    for _ in 0..j {
        let mut next = vec![0u64; row.len() + 1];
        for (i, c) in row.iter().enumerate() {
            next[i] = next[i].wrapping_add(*c);
            next[i + 1] = next[i + 1].wrapping_add(*c);
        }
        row = next;
    }
    // (X - 1)^j X^j: sign (-1)^(j - i) on X^(j + i)
    let mut out = vec![0u64; 2 * j + 1];
    for (i, c) in row.iter().enumerate() {
        out[j + i] = if (j - i) % 2 == 1 { c.wrapping_neg() } else { *c };
    }
    out
}

fn expand_terms<'a>(ring: &Arc<WittRing>, terms: impl IntoIterator<Item = (&'a WittElem, u32, u32)>) -> Dense {
    let mut out: Dense = Vec::new();
    for (coeff, t, v) in terms {
        let mut part = dense_zero(ring, 2 * t as usize + v as usize + 1);
        for (k, c) in t_power_in_x(t).iter().enumerate() {
            if *c != 0 {
                part[k + v as usize] = coeff.scale_int(*c as i64);
            }
        }
        out = dense_add(ring, &out, &part);
    }
    out
}

fn expand_t_poly(ring: &Arc<WittRing>, p: &RPoly) -> Dense {
    expand_terms(ring, p.terms().map(|(e, c)| (c, (-e) as u32, 0)))
}

fn dense_to_v_poly(p: &[WittElem]) -> RPoly {
    LaurentPoly::from_terms(Var::V, p.iter().enumerate().map(|(k, c)| (-(k as i64), c.clone())))
}

fn v_poly_to_dense(ring: &Arc<WittRing>, p: &RPoly) -> Result<Dense> {
    let mut out = Vec::new();
    for (e, c) in p.terms() {
        if e > 0 || p.var() != Var::V {
            return Err(Error::Certificate(format!("expected a polynomial in v^-1, found exponent {e}")));
        }
        let k = (-e) as usize;
        if out.len() <= k {
            out.resize(k + 1, WittElem::zero(ring));
        }
        out[k] = c.clone();
    }
    Ok(dense_trim(out))
}

/// Solves `p = (1 - 2 eta X) h` from the constant term up; `None` when the
/// remainder is nonzero.
/// `len` bounds the length of the quotient: leading terms of the product can
/// vanish modulo 2^N.
fn divide_by_linear(ring: &Arc<WittRing>, eta: &WittElem, p: &[WittElem], len: usize) -> Option<Dense> {
    let two_eta = eta.scale_int(2);
    let zero = WittElem::zero(ring);
    let mut h: Dense = Vec::with_capacity(p.len());
    let mut prev = zero.clone();
    for k in 0..p.len().max(len + 1) {
        let hk = p.get(k).unwrap_or(&zero) + &(&two_eta * &prev);
        h.push(hk.clone());
        prev = hk;
    }
    if h.last().is_some_and(|c| !c.is_zero()) {
        return None;
    }
    Some(dense_trim(h))
}

/// Rewrites a polynomial in `X` as one in `t^-1 = X^2 - X`.
fn to_t_basis(ring: &Arc<WittRing>, p: &[WittElem]) -> Option<RPoly> {
    let mut work = dense_trim(p.to_vec());
    let mut out = LaurentPoly::zero(Var::T);
    while let Some(top) = work.len().checked_sub(1) {
        if top % 2 == 1 {
            return None;
        }
        let j = (top / 2) as u32;
        let c = work[top].clone();
        out.add_term(-(j as i64), c.clone());
        let sub = expand_terms(ring, [(&c, j, 0)]);
        work = dense_trim(
            work.iter()
                .enumerate()
                .map(|(k, x)| match sub.get(k) {
                    Some(y) => x - y,
                    None => x.clone(),
                })
                .collect(),
        );
    }
    Some(out)
}

// ---- construction -------------------------------------------------------------

/// Splits `Q = eta g^2 t^-(2m+1) + Q'` and lifts everything.
pub fn derive_parameters(desc: &SupersimpleDescription, precision: u32) -> Result<LiftParameters> {
    let field = desc.field();
    let eta_bar = desc.eta();
    if eta_bar.is_zero() {
        return Err(Error::NotD4("eta = 0 gives a Galois extension".into()));
    }
    if eta_bar.is_one() {
        return Err(Error::EtaIsOne);
    }
    let ring = WittRing::new(field, precision, eta_bar)?;
    let lift_poly = |p: &FieldPoly| p.map_coeffs(|c| WittElem::lift(&ring, *c));
    let eta = WittElem::eta(&ring);
    let d = desc.q().pole_order();
    if d <= 1 {
        return Ok(LiftParameters {
            case: LiftCase::Small,
            eta,
            gamma: None,
            m: None,
            q_prime: lift_poly(desc.q()),
            ring,
        });
    }
    let lead = *desc.q().coeff(-(d as i64)).expect("pole order is attained");
    let inv = eta_bar.inverse().expect("eta is nonzero");
    let gamma_bar = (lead * inv).sqrt();
    let mut q_prime_bar = desc.q().clone();
    q_prime_bar.add_term(-(d as i64), lead);
    Ok(LiftParameters {
        case: LiftCase::General,
        eta,
        gamma: Some(WittElem::lift(&ring, gamma_bar)),
        m: Some(((d - 1) / 2) as u32),
        q_prime: lift_poly(&q_prime_bar),
        ring,
    })
}

fn cert_term(label: impl Into<String>, coeff: WittElem, t_power: u32, v_power: u32) -> CertTerm {
    CertTerm {
        label: label.into(),
        coeff,
        t_power,
        v_power,
    }
}

/// `F` and `G` summands, and the closed form of `H`.
fn build_terms(p: &LiftParameters) -> Result<(Vec<CertTerm>, Vec<CertTerm>, RPoly)> {
    let ring = &p.ring;
    let s = WittElem::sqrt2(ring);
    let b = WittElem::beta(ring);
    let eta = &p.eta;
    let one = WittElem::one(ring);
    let b2 = &b * &b;

    let mut g_terms = vec![cert_term("1", one.clone(), 0, 0), cert_term("s*b", &s * &b, 0, 1)];
    let mut f_terms = Vec::new();
    let q_terms: Vec<(u32, WittElem)> = p.q_prime.terms().map(|(e, c)| ((-e) as u32, c.clone())).collect();
    if p.q_prime.max_exponent().is_some_and(|e| e > 0) {
        return Err(Error::InvalidInput("Q' must be a polynomial in t^-1".into()));
    }
    for (j, q) in &q_terms {
        f_terms.push(cert_term(format!("q'_{j}"), q.clone(), *j, 0));
    }
    f_terms.push(cert_term("-e*b^2", -&(eta * &b2), 1, 1));
    for (j, q) in &q_terms {
        f_terms.push(cert_term(format!("-2*e*q'_{j}"), -&(eta * q).scale_int(2), *j, 1));
    }
    let mut h = LaurentPoly::from_terms(Var::T, [(0, one.clone()), (-1, b2.scale_int(2))])
        .add(&p.q_prime.scale(&WittElem::from_int(ring, 4)))?;

    if p.case == LiftCase::General {
        let (Some(g), Some(m)) = (&p.gamma, p.m) else {
            return Err(Error::InvalidInput("general case needs gamma and m".into()));
        };
        let g2 = g * g;
        g_terms.push(cert_term("s*g", &s * g, m, 0));
        f_terms.push(cert_term("-e*g^2", -&(eta * &g2), 2 * m, 1));
        f_terms.push(cert_term("-s*e*g", -&(&(&s * eta) * g), m, 1));
        f_terms.push(cert_term("-g*b", -&(g * &b), m, 1));
        h = h.add(&LaurentPoly::from_terms(
            Var::T,
            [(-2 * m as i64, g2.scale_int(2)), (-(m as i64), (&s * g).scale_int(2))],
        ))?;
    }
    Ok((f_terms, g_terms, h))
}

fn expand_cert_terms(ring: &Arc<WittRing>, terms: &[CertTerm]) -> Dense {
    expand_terms(ring, terms.iter().map(|t| (&t.coeff, t.t_power, t.v_power)))
}

/// Builds the certificate for given parameters and runs every check.
pub fn assemble(desc: &SupersimpleDescription, params: LiftParameters) -> Result<LiftCertificate> {
    let ring = params.ring.clone();
    let (f_terms, g_terms, h_closed) = build_terms(&params)?;
    let f = expand_cert_terms(&ring, &f_terms);
    let g = expand_cert_terms(&ring, &g_terms);
    let rhs = dense_add(&ring, &dense_mul(&ring, &g, &g), &f.iter().map(|c| c.scale_int(4)).collect::<Vec<_>>());

    let h_len = 2 * h_closed.pole_order() as usize + 1;
    let h_x = divide_by_linear(&ring, &params.eta, &rhs, h_len);
    let h_division_exact = h_x.is_some();
    let h = h_x.as_deref().and_then(|h| to_t_basis(&ring, h));
    let identity_verified = h.as_ref() == Some(&h_closed);
    if !identity_verified {
        let found = h.map_or("no exact quotient".to_string(), |h| h.to_string());
        return Err(Error::IdentityFailed {
            residual: format!("H = {found}, expected {h_closed}"),
        });
    }

    let mut cert = LiftCertificate {
        field: ring.field(),
        precision: ring.precision(),
        description: desc.clone(),
        parameters: params,
        f_terms,
        g_terms,
        f: dense_to_v_poly(&f),
        g: dense_to_v_poly(&g),
        h: h_closed,
        checks: Checks {
            identity_verified,
            h_division_exact,
            g_reduces_to_one: false,
            reduction_matches: false,
            non_galois_witness_unit: false,
            witness_valuation: 0,
            branch_points_over_c2: 0,
        },
        genus: GenusReport {
            deg_f: 0,
            g2: 0,
            g3: 0,
            different: 0,
            composite_different: 0,
            katz_gabber_genus: 0,
            hurwitz_consistent: false,
        },
    };
    let reduction = reduction_matches(&cert, desc);
    cert.checks.g_reduces_to_one = reduction.g_is_one;
    cert.checks.reduction_matches = reduction.matches();
    let kummer = kummer_analysis(&cert)?;
    cert.checks.non_galois_witness_unit = true;
    cert.checks.witness_valuation = kummer.witness_valuation;
    cert.checks.branch_points_over_c2 = kummer.branch_points_over_c2;
    cert.genus = genus_report(&cert)?;
    Ok(cert)
}

/// Full pipeline from a description to a checked certificate.
pub fn construct_lift(desc: &SupersimpleDescription, precision: u32) -> Result<LiftCertificate> {
    let params = derive_parameters(desc, precision)?;
    assemble(desc, params)
}

// ---- reduction -----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDiff {
    pub label: String,
    pub t_power: u32,
    pub v_power: u32,
    pub expected: FieldElem,
    pub found: FieldElem,
}

impl fmt::Display for TermDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (t^-{} v^-{}): expected {}, found {}",
            self.label, self.t_power, self.v_power, self.expected, self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub g_is_one: bool,
    pub f_bar: FieldPoly,
    pub f_bar_class: ASClass,
    pub class_matches: bool,
    pub diffs: Vec<TermDiff>,
}

impl ReductionReport {
    pub fn matches(&self) -> bool {
        self.g_is_one && self.class_matches && self.diffs.is_empty()
    }
}

/// The reduction of `F` predicted from the description alone, per summand.
fn expected_f_bar(desc: &SupersimpleDescription) -> BTreeMap<String, (u32, u32, FieldElem)> {
    let field = desc.field();
    let eta = desc.eta();
    let mut out = BTreeMap::new();
    let d = desc.q().pole_order();
    let mut q_prime = desc.q().clone();
    let mut gamma = None;
    if d > 1 {
        let lead = *desc.q().coeff(-(d as i64)).expect("pole order is attained");
        q_prime.add_term(-(d as i64), lead);
        if let Some(inv) = eta.inverse() {
            gamma = Some(((lead * inv).sqrt(), ((d - 1) / 2) as u32));
        }
    }
    for (e, c) in q_prime.terms() {
        let j = (-e) as u32;
        out.insert(format!("q'_{j}"), (j, 0, *c));
        out.insert(format!("-2*e*q'_{j}"), (j, 1, field.zero()));
    }
    out.insert("-e*b^2".into(), (1, 1, eta.square()));
    if let Some((g, m)) = gamma {
        out.insert("-e*g^2".into(), (2 * m, 1, eta * g.square()));
        out.insert("-s*e*g".into(), (m, 1, field.zero()));
        out.insert("-g*b".into(), (m, 1, g * eta.sqrt()));
    }
    out
}

/// Reduces `F` and `G` mod 2 and compares with the description.
pub fn reduction_matches(cert: &LiftCertificate, desc: &SupersimpleDescription) -> ReductionReport {
    let field = cert.field;
    let reduce_poly = |p: &RPoly| p.map_coeffs(|c| c.reduce());
    let g_bar = reduce_poly(&cert.g);
    let g_is_one = g_bar == LaurentPoly::monomial(Var::V, 0, field.one());
    let f_bar = reduce_poly(&cert.f);
    let f_bar_class = reduce_class(field, &f_bar).expect("single field");
    let class_matches = desc.field() == field && f_bar_class == desc.class();

    let mut diffs = Vec::new();
    if desc.field() == field {
        let mut expected = expected_f_bar(desc);
        for t in &cert.f_terms {
            let found = t.coeff.reduce();
            let exp = expected
                .remove(&t.label)
                .map_or(field.zero(), |(_, _, c)| c);
            if found != exp {
                diffs.push(TermDiff {
                    label: t.label.clone(),
                    t_power: t.t_power,
                    v_power: t.v_power,
                    expected: exp,
                    found,
                });
            }
        }
        for (label, (t_power, v_power, exp)) in expected {
            if !exp.is_zero() {
                diffs.push(TermDiff {
                    label,
                    t_power,
                    v_power,
                    expected: exp,
                    found: field.zero(),
                });
            }
        }
    }
    ReductionReport {
        g_is_one,
        f_bar,
        f_bar_class,
        class_matches,
        diffs,
    }
}

// ---- branch data and genus -------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerReport {
    pub branch_locus: Vec<String>,
    pub conjugate_point: String,
    /// The witness is `2^witness_valuation * witness_unit`.
    pub witness_valuation: u32,
    pub witness_unit: WittElem,
    pub branch_points_over_c2: u32,
}

/// `(1 - 2 eta v^-1) H` at the conjugate `v = 2 eta / (2 eta - 1)` of the
/// branch point `v = 2 eta`, scaled by `(4 eta^2)^deg H` to clear
/// denominators.
pub fn non_galois_witness(eta: &WittElem, h: &RPoly) -> WittElem {
    let ring = eta.ring();
    let one = WittElem::one(ring);
    let deg = h.pole_order() as u32;
    let num = &one - &eta.scale_int(2);
    let den = (eta * eta).scale_int(4);
    let mut sum = WittElem::zero(ring);
    for (e, c) in h.terms() {
        let j = (-e) as u32;
        sum = &sum + &(&(c * &num.pow(j)) * &den.pow(deg - j));
    }
    // 1 - 2 eta v^-1 at v^-1 = 1 - 1/(2 eta) is 2 - 2 eta
    &(&one - eta).scale_int(2) * &sum
}

pub fn kummer_analysis(cert: &LiftCertificate) -> Result<KummerReport> {
    let eta = &cert.parameters.eta;
    let witness = non_galois_witness(eta, &cert.h);
    if witness.is_zero() {
        return Err(Error::NotAUnit(
            "witness vanishes: the conjugate point is itself a branch point".into(),
        ));
    }
    let k = witness.content();
    let unit = witness.shr(k)?;
    if !unit.is_unit() {
        return Err(Error::NotAUnit(format!(
            "witness 2^{k} * ({unit}) has no certified unit part at precision {}",
            cert.precision
        )));
    }
    Ok(KummerReport {
        branch_locus: vec!["v = 0".into(), "v = 2*eta".into(), "zeros of H".into()],
        conjugate_point: "v = 2*eta/(2*eta - 1)".into(),
        witness_valuation: k,
        witness_unit: unit,
        branch_points_over_c2: 2,
    })
}

pub fn genus_report(cert: &LiftCertificate) -> Result<GenusReport> {
    let deg_f = cert.f.pole_order();
    if deg_f % 2 == 0 {
        return Err(Error::EvenDegreeF(deg_f as i64));
    }
    let g2 = (deg_f - 1) / 2;
    let g3 = 2 * g2;
    let f_bar = cert.f.map_coeffs(|c| c.reduce());
    let class = reduce_class(cert.field, &f_bar)?;
    let katz_gabber_genus = genus_katz_gabber(&class)?;
    Ok(GenusReport {
        deg_f,
        g2,
        g3,
        different: 2 * g2 + 2,
        composite_different: different_of_composite(&cert.description),
        katz_gabber_genus,
        hurwitz_consistent: 2 * g3 as i64 - 2 == 2 * (2 * g2 as i64 - 2) + 2,
    })
}

// ---- verification and JSON ---------------------------------------------------------

/// `(1 - 2 eta v^-1) H - (G^2 + 4F)` from the stored polynomials, in `v^-1`.
pub fn identity_residual(cert: &LiftCertificate) -> Result<RPoly> {
    let ring = &cert.parameters.ring;
    let f = v_poly_to_dense(ring, &cert.f)?;
    let g = v_poly_to_dense(ring, &cert.g)?;
    let h = expand_t_poly(ring, &cert.h);
    let lin = vec![WittElem::one(ring), -&cert.parameters.eta.scale_int(2)];
    let lhs = dense_mul(ring, &lin, &h);
    let rhs = dense_add(ring, &dense_mul(ring, &g, &g), &f.iter().map(|c| c.scale_int(4)).collect::<Vec<_>>());
    let neg: Vec<WittElem> = rhs.iter().map(|c| -c).collect();
    Ok(dense_to_v_poly(&dense_add(ring, &lhs, &neg)))
}

/// Fails with `IdentityFailed` unless the stored `F`, `G`, `H` satisfy the
/// lifting identity.
pub fn check_identity(cert: &LiftCertificate) -> Result<()> {
    let residual = identity_residual(cert)?;
    if residual.is_zero() {
        Ok(())
    } else {
        Err(Error::IdentityFailed {
            residual: residual.to_string(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    F,
    G,
}

impl LiftCertificate {
    /// Copy with summand `i` of `F` or `G` deleted and that polynomial
    /// re-expanded; `H` and the checks are left as they were.
    pub fn without_term(&self, part: Part, i: usize) -> Self {
        let mut out = self.clone();
        let ring = &self.parameters.ring;
        let terms = match part {
            Part::F => &mut out.f_terms,
            Part::G => &mut out.g_terms,
        };
        if i < terms.len() {
            terms.remove(i);
        }
        let expanded = dense_to_v_poly(&expand_cert_terms(ring, terms));
        match part {
            Part::F => out.f = expanded,
            Part::G => out.g = expanded,
        }
        out
    }
}

/// Recomputes the certificate and checks the stored `F`, `G`, `H` directly.
pub fn verify_certificate(cert: &LiftCertificate) -> Result<()> {
    check_identity(cert)?;
    let failed: Vec<&str> = [
        ("identity_verified", cert.checks.identity_verified),
        ("h_division_exact", cert.checks.h_division_exact),
        ("g_reduces_to_one", cert.checks.g_reduces_to_one),
        ("reduction_matches", cert.checks.reduction_matches),
        ("non_galois_witness_unit", cert.checks.non_galois_witness_unit),
        ("genus", cert.genus.consistent()),
    ]
    .iter()
    .filter(|(_, ok)| !ok)
    .map(|(name, _)| *name)
    .collect();
    if !failed.is_empty() {
        return Err(Error::Certificate(format!("failed checks: {}", failed.join(", "))));
    }
    let fresh = construct_lift(&cert.description, cert.precision)?;
    if fresh != *cert {
        return Err(Error::Certificate(
            "stored data differs from the certificate recomputed from its description".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    n: u32,
    modulus: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    exp: i64,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DescriptionDoc {
    eta: String,
    q: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParametersDoc {
    eta: String,
    gamma: Option<String>,
    m: Option<u32>,
    q_prime: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertTermDoc {
    label: String,
    coeff: String,
    t_power: u32,
    v_power: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    field: FieldDoc,
    precision: u32,
    case: String,
    description: DescriptionDoc,
    parameters: ParametersDoc,
    f_terms: Vec<CertTermDoc>,
    g_terms: Vec<CertTermDoc>,
    f: Vec<TermDoc>,
    g: Vec<TermDoc>,
    h: Vec<TermDoc>,
    checks: Checks,
    genus: GenusReport,
}

fn terms_doc<C: crate::laurent::Coefficient + fmt::Display>(p: &LaurentPoly<C>) -> Vec<TermDoc> {
    p.terms()
        .rev()
        .map(|(exp, c)| TermDoc {
            exp,
            coeff: c.to_string(),
        })
        .collect()
}

fn cert_terms_doc(terms: &[CertTerm]) -> Vec<CertTermDoc> {
    terms
        .iter()
        .map(|t| CertTermDoc {
            label: t.label.clone(),
            coeff: t.coeff.to_text(),
            t_power: t.t_power,
            v_power: t.v_power,
        })
        .collect()
}

fn cert_error(e: Error) -> Error {
    match e {
        Error::Certificate(_) => e,
        other => Error::Certificate(other.to_string()),
    }
}

impl LiftCertificate {
    pub fn case(&self) -> LiftCase {
        self.parameters.case
    }

    /// Pretty-printed JSON; identical certificates give identical bytes.
    pub fn to_json(&self) -> String {
        let p = &self.parameters;
        let doc = CertificateDoc {
            field: FieldDoc {
                n: self.field.degree(),
                modulus: self.field.modulus_string(),
            },
            precision: self.precision,
            case: p.case.name().into(),
            description: DescriptionDoc {
                eta: self.description.eta().to_string(),
                q: terms_doc(self.description.q()),
            },
            parameters: ParametersDoc {
                eta: p.eta.to_text(),
                gamma: p.gamma.as_ref().map(|g| g.to_text()),
                m: p.m,
                q_prime: terms_doc(&p.q_prime),
            },
            f_terms: cert_terms_doc(&self.f_terms),
            g_terms: cert_terms_doc(&self.g_terms),
            f: terms_doc(&self.f),
            g: terms_doc(&self.g),
            h: terms_doc(&self.h),
            checks: self.checks.clone(),
            genus: self.genus.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("certificate documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CertificateDoc =
            serde_json::from_str(text).map_err(|e| Error::Certificate(format!("malformed JSON: {e}")))?;
        let field = FieldSpec::new(doc.field.n).map_err(cert_error)?;
        if field.modulus_string() != doc.field.modulus {
            return Err(Error::Certificate(format!(
                "modulus `{}` is not the canonical modulus `{}` of {field}",
                doc.field.modulus,
                field.modulus_string()
            )));
        }
        let elem = |s: &str| parse_field_elem(field, s).map_err(cert_error);
        let eta_bar = elem(&doc.description.eta)?;
        let mut q = LaurentPoly::zero(Var::T);
        for t in &doc.description.q {
            q.add_term(t.exp, elem(&t.coeff)?);
        }
        let description = SupersimpleDescription::new(eta_bar, q).map_err(cert_error)?;
        let ring = WittRing::new(field, doc.precision, eta_bar).map_err(cert_error)?;
        let witt = |s: &str| WittElem::parse(&ring, s).map_err(cert_error);
        let rpoly = |var: Var, terms: &[TermDoc]| -> Result<RPoly> {
            let mut p = LaurentPoly::zero(var);
            for t in terms {
                p.add_term(t.exp, witt(&t.coeff)?);
            }
            Ok(p)
        };
        let cert_terms = |terms: &[CertTermDoc]| -> Result<Vec<CertTerm>> {
            terms
                .iter()
                .map(|t| Ok(cert_term(t.label.clone(), witt(&t.coeff)?, t.t_power, t.v_power)))
                .collect()
        };
        let case = match doc.case.as_str() {
            "small" => LiftCase::Small,
            "general" => LiftCase::General,
            other => return Err(Error::Certificate(format!("unknown case `{other}`"))),
        };
        let parameters = LiftParameters {
            case,
            eta: witt(&doc.parameters.eta)?,
            gamma: doc.parameters.gamma.as_deref().map(witt).transpose()?,
            m: doc.parameters.m,
            q_prime: rpoly(Var::T, &doc.parameters.q_prime)?,
            ring: ring.clone(),
        };
        Ok(LiftCertificate {
            field,
            precision: doc.precision,
            description,
            parameters,
            f_terms: cert_terms(&doc.f_terms)?,
            g_terms: cert_terms(&doc.g_terms)?,
            f: rpoly(Var::V, &doc.f)?,
            g: rpoly(Var::V, &doc.g)?,
            h: rpoly(Var::T, &doc.h)?,
            checks: doc.checks,
            genus: doc.genus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{classify_supersimple, psi};
    use crate::ExtensionPolicy;

    fn desc(n: u32, eta: u64, q: &[(i64, u64)]) -> SupersimpleDescription {
        let f = FieldSpec::new(n).unwrap();
        let q = LaurentPoly::from_terms(Var::T, q.iter().map(|&(e, b)| (e, f.from_bits(b))));
        SupersimpleDescription::new(f.from_bits(eta), q).unwrap()
    }

    #[test]
    fn binomial_rows() {
        assert_eq!(t_power_in_x(0), vec![1]);
        assert_eq!(t_power_in_x(2), vec![0, 0, 1, 2u64.wrapping_neg(), 1]);
    }

    #[test]
    fn small_case() {
        let d = desc(8, 0x02, &[]);
        let cert = construct_lift(&d, 64).unwrap();
        assert_eq!(cert.case(), LiftCase::Small);
        assert!(cert.checks.g_reduces_to_one && cert.checks.reduction_matches);
        let report = reduction_matches(&cert, &d);
        assert_eq!(report.f_bar_class, psi(d.eta()));
        assert_eq!(cert.genus.g2, 1);
        assert_eq!(cert.genus.g3, 2);
        assert_eq!(cert.genus.different, 4);
        assert_eq!(cert.checks.witness_valuation, 2);
    }

    #[test]
    fn general_case_m1() {
        let f = FieldSpec::new(8).unwrap();
        let eta = f.from_bits(0x35);
        let gamma = f.from_bits(0x0b);
        let lead = eta * gamma.square();
        let d = desc(8, 0x35, &[(-3, lead.bits())]);
        let cert = construct_lift(&d, 64).unwrap();
        assert_eq!(cert.case(), LiftCase::General);
        assert_eq!(cert.parameters.gamma.as_ref().unwrap().reduce(), gamma);
        let report = reduction_matches(&cert, &d);
        assert!(report.matches(), "{:?}", report.diffs);
        assert_eq!(cert.genus.deg_f, 5);
        assert_eq!(cert.genus.different, 6);
        let back = classify_supersimple(&report.f_bar_class, ExtensionPolicy::Fail).unwrap();
        assert_eq!(back.description, d);
    }

    #[test]
    fn eta_in_prime_field_is_rejected() {
        assert_eq!(construct_lift(&desc(8, 1, &[]), 64).unwrap_err(), Error::EtaIsOne);
        assert!(matches!(construct_lift(&desc(8, 0, &[]), 64), Err(Error::NotD4(_))));
    }

    #[test]
    fn gamma_perturbations() {
        let d = desc(8, 0x35, &[(-5, 0x11), (-3, 0x07), (-1, 0x02)]);
        let params = derive_parameters(&d, 64).unwrap();
        let m = params.m.unwrap();
        let ring = params.ring.clone();
        let gamma = params.gamma.clone().unwrap();

        let mut by_two = params.clone();
        by_two.gamma = Some(&gamma + &WittElem::from_int(&ring, 2));
        let cert = assemble(&d, by_two).unwrap();
        assert!(reduction_matches(&cert, &d).matches());

        let mut by_one = params;
        by_one.gamma = Some(&gamma + &WittElem::one(&ring));
        let cert = assemble(&d, by_one).unwrap();
        let report = reduction_matches(&cert, &d);
        assert!(!report.matches());
        let places: Vec<(u32, u32)> = report.diffs.iter().map(|d| (d.t_power, d.v_power)).collect();
        assert_eq!(places, vec![(2 * m, 1), (m, 1)]);
    }

    #[test]
    fn json_round_trip_and_verify() {
        let d = desc(8, 0x53, &[(-7, 0x80), (-1, 0x03)]);
        let cert = construct_lift(&d, 64).unwrap();
        let json = cert.to_json();
        let back = LiftCertificate::from_json(&json).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), json);
        verify_certificate(&back).unwrap();
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let d = desc(4, 0x02, &[(-3, 0x05)]);
        let cert = construct_lift(&d, 32).unwrap();
        let json = cert.to_json().replacen("\"witness_valuation\": 2", "\"witness_valuation\": 3", 1);
        let back = LiftCertificate::from_json(&json).unwrap();
        assert!(verify_certificate(&back).is_err());

        let mut bad = cert.clone();
        let ring = bad.parameters.ring.clone();
        bad.f.add_term(-1, WittElem::one(&ring));
        assert!(matches!(verify_certificate(&bad), Err(Error::IdentityFailed { .. })));
    }

    #[test]
    fn dropping_any_summand_breaks_the_identity() {
        let d = desc(8, 0x35, &[(-5, 0x11), (-1, 0x02)]);
        let cert = construct_lift(&d, 64).unwrap();
        check_identity(&cert).unwrap();
        for (part, n) in [(Part::F, cert.f_terms.len()), (Part::G, cert.g_terms.len())] {
            for i in 0..n {
                let r = identity_residual(&cert.without_term(part, i)).unwrap();
                assert!(!r.is_zero(), "{part:?} term {i}");
            }
        }
    }

    #[test]
    fn low_precision_is_inconclusive() {
        let d = desc(8, 0x02, &[]);
        assert!(matches!(construct_lift(&d, 2), Err(Error::NotAUnit(_))));
        assert_eq!(construct_lift(&d, 3).unwrap().checks.witness_valuation, 2);
    }
}
