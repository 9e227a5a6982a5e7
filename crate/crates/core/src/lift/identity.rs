//! Symbolic check of `(1 - 2 e v^-1) H = G^2 + 4F` for the two families of
//! `F`, `G` used to build lifts.

use std::fmt;

use crate::error::{Error, Result};
use crate::symbolic::SymbolicElem;

/// Which family of `F`, `G`, `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityCase {
    /// `deg Q' <= 1`, no `g` term.
    Small,
    /// `deg Q' < 2m`, with `g t^-m` in `G`.
    General { m: u32 },
}

/// A labelled summand of `F` or `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityTerm {
    pub label: &'static str,
    pub value: SymbolicElem,
}

/// One instance of the identity, with every piece kept symbolic.
#[derive(Clone, Debug)]
pub struct IdentityForm {
    pub case: IdentityCase,
    pub gamma: SymbolicElem,
    pub q_prime: SymbolicElem,
    pub f_terms: Vec<IdentityTerm>,
    pub g_terms: Vec<IdentityTerm>,
    pub h: SymbolicElem,
}

/// `q0 + q1 t^-1 + ... + q_{len-1} t^-(len-1)`
pub fn symbolic_q_prime(len: u32) -> SymbolicElem {
    (0..len).fold(SymbolicElem::zero(), |acc, i| {
        &acc + &(&SymbolicElem::q(i) * &SymbolicElem::t_pow(i))
    })
}

fn term(label: &'static str, value: SymbolicElem) -> IdentityTerm {
    IdentityTerm { label, value }
}

impl IdentityForm {
    /// Fully symbolic `Q'` of the largest allowed degree.
    pub fn new(case: IdentityCase) -> Self {
        let len = match case {
            IdentityCase::Small => 2,
            IdentityCase::General { m } => 2 * m,
        };
        Self::with(case, symbolic_q_prime(len), SymbolicElem::gamma())
    }

    pub fn with(case: IdentityCase, q_prime: SymbolicElem, gamma: SymbolicElem) -> Self {
        let s = SymbolicElem::s();
        let b = SymbolicElem::beta();
        let e = SymbolicElem::eta();
        let x = SymbolicElem::x_pow(1);
        let t = SymbolicElem::t_pow(1);
        let one = SymbolicElem::one();
        let b2 = &b * &b;

        let mut g_terms = vec![term("1", one.clone()), term("s*b*v^-1", &(&s * &b) * &x)];
        let mut f_terms = vec![
            term("Q'", q_prime.clone()),
            term("-e*b^2*v^-1*t^-1", -&(&(&(&e * &b2) * &x) * &t)),
            term("-2*e*v^-1*Q'", (&(&e * &x) * &q_prime).scale(-2)),
        ];
        let mut h = &(&one + &(&b2 * &t).scale(2)) + &q_prime.scale(4);

        if let IdentityCase::General { m } = case {
            let tm = SymbolicElem::t_pow(m);
            let t2m = SymbolicElem::t_pow(2 * m);
            let g2 = &gamma * &gamma;
            g_terms.push(term("s*g*t^-m", &(&s * &gamma) * &tm));
            f_terms.push(term("-e*g^2*t^-2m*v^-1", -&(&(&e * &g2) * &(&t2m * &x))));
            f_terms.push(term("-s*e*g*v^-1*t^-m", -&(&(&(&s * &e) * &gamma) * &(&x * &tm))));
            f_terms.push(term("-g*b*v^-1*t^-m", -&(&(&gamma * &b) * &(&x * &tm))));
            h = &(&h + &(&g2 * &t2m).scale(2)) + &(&(&s * &gamma) * &tm).scale(2);
        }
        IdentityForm {
            case,
            gamma,
            q_prime,
            f_terms,
            g_terms,
            h,
        }
    }

    pub fn f(&self) -> SymbolicElem {
        self.f_terms.iter().fold(SymbolicElem::zero(), |acc, t| &acc + &t.value)
    }

    pub fn g(&self) -> SymbolicElem {
        self.g_terms.iter().fold(SymbolicElem::zero(), |acc, t| &acc + &t.value)
    }

    /// Copy with the `i`-th summand of `F` removed.
    pub fn drop_f_term(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.f_terms.remove(i);
        out
    }

    /// Copy with the `i`-th summand of `G` removed.
    pub fn drop_g_term(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.g_terms.remove(i);
        out
    }

    /// `(1 - 2 e v^-1) H - (G^2 + 4F)` in normal form, as a polynomial in `v^-1`.
    pub fn residual(&self) -> SymbolicElem {
        let lin = &SymbolicElem::one() - &(&SymbolicElem::eta() * &SymbolicElem::x_pow(1)).scale(2);
        let g = self.g();
        let lhs = &lin * &self.h;
        let rhs = &(&g * &g) + &self.f().scale(4);
        (&lhs - &rhs).substitute_t()
    }

    pub fn verify(&self) -> Result<IdentityReport> {
        let residual = self.residual();
        if residual.is_zero() {
            Ok(IdentityReport {
                case: self.case,
                terms_checked: self.h.len() + self.f().len() + self.g().len(),
            })
        } else {
            Err(Error::IdentityFailed {
                residual: residual.to_string(),
            })
        }
    }
}

/// Outcome of a successful symbolic check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub case: IdentityCase,
    pub terms_checked: usize,
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("identity holds (symbolic, residual = 0)")
    }
}

/// Small family with `Q' = q0 + q1 t^-1`.
pub fn verify_identity_small() -> Result<IdentityReport> {
    IdentityForm::new(IdentityCase::Small).verify()
}

/// General family with `Q' = q0 + ... + q_{2m-1} t^-(2m-1)`.
pub fn verify_identity_general(m: u32) -> Result<IdentityReport> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    IdentityForm::new(IdentityCase::General { m }).verify()
}

/// Every summand of `F` and `G`, each dropped in turn, must break the identity.
pub fn single_term_mutations(form: &IdentityForm) -> Vec<(String, Result<IdentityReport>)> {
    let mut out = Vec::new();
    for (i, t) in form.f_terms.iter().enumerate() {
        out.push((format!("F without {}", t.label), form.drop_f_term(i).verify()));
    }
    for (i, t) in form.g_terms.iter().enumerate() {
        out.push((format!("G without {}", t.label), form.drop_g_term(i).verify()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_case_with_zero_q() {
        let form = IdentityForm::with(IdentityCase::Small, SymbolicElem::zero(), SymbolicElem::gamma());
        assert!(form.verify().is_ok());
    }

    #[test]
    fn small_case_symbolic() {
        assert!(verify_identity_small().is_ok());
    }

    #[test]
    fn general_case_small_m() {
        assert!(verify_identity_general(1).is_ok());
        assert!(verify_identity_general(2).is_ok());
    }

    #[test]
    fn general_case_with_gamma_zero() {
        let form = IdentityForm::with(IdentityCase::General { m: 1 }, symbolic_q_prime(2), SymbolicElem::zero());
        assert!(form.verify().is_ok());
    }

    #[test]
    fn dropping_the_q_correction_leaves_eight_eta() {
        let form = IdentityForm::with(IdentityCase::Small, SymbolicElem::one(), SymbolicElem::gamma());
        let err = form.drop_f_term(2).verify().unwrap_err();
        assert_eq!(
            err,
            Error::IdentityFailed {
                residual: "-8*e*v^-1".into()
            }
        );
    }

    #[test]
    fn every_single_term_mutation_fails() {
        for form in [IdentityForm::new(IdentityCase::Small), IdentityForm::new(IdentityCase::General { m: 2 })] {
            for (label, outcome) in single_term_mutations(&form) {
                assert!(matches!(outcome, Err(Error::IdentityFailed { .. })), "{label} survived");
            }
        }
    }

    #[test]
    fn m_zero_is_rejected() {
        assert!(matches!(verify_identity_general(0), Err(Error::InvalidInput(_))));
    }
}
