//! Characteristic-0 lifts of supersimple D4-extensions.

pub mod identity;
pub mod certificate;

pub use certificate::{construct_lift, verify_certificate, LiftCase, LiftCertificate};
pub use identity::{verify_identity_general, verify_identity_small, IdentityCase};
