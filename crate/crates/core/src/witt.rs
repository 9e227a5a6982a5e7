//! Truncated characteristic-0 lifting ring.
//!
//! `W` is the unramified ring W_N(GF(2^n)) = (Z/2^N)[a] / (lifted modulus),
//! `R = W[s, b]` with `s^2 = 2` and `b^2 = -s b - eta`. An element is stored
//! as four `W`-coordinates, `x0 + x1 s + (y0 + y1 s) b`.
//!
//! The residue map sends `s` to 0 and `b` to `sqrt(eta)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::laurent::Coefficient;

/// Default 2-adic working precision in bits.
pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Debug, PartialEq, Eq)]
pub struct WittRing {
    field: FieldSpec,
    precision: u32,
    mask: u64,
    /// Exponents `i < n` with a set bit in the modulus.
    taps: Vec<usize>,
    eta: Vec<u64>,
    eta_bar: FieldElem,
    sqrt_eta_bar: FieldElem,
}

impl WittRing {
    /// Ring with `eta` the canonical lift of `eta_bar`.
    pub fn new(field: FieldSpec, precision: u32, eta_bar: FieldElem) -> Result<Arc<Self>> {
        if precision == 0 || precision > 64 {
            return Err(Error::InvalidPrecision(precision));
        }
        if eta_bar.spec() != field {
            return Err(Error::FieldMismatch {
                left: field.degree(),
                right: eta_bar.spec().degree(),
            });
        }
        let n = field.degree() as usize;
        let mask = if precision == 64 { u64::MAX } else { (1u64 << precision) - 1 };
        let taps = (0..n).filter(|i| field.modulus() >> i & 1 == 1).collect();
        let eta = (0..n).map(|i| eta_bar.bits() >> i & 1).collect();
        Ok(Arc::new(WittRing {
            field,
            precision,
            mask,
            taps,
            eta,
            eta_bar,
            sqrt_eta_bar: eta_bar.sqrt(),
        }))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn eta_bar(&self) -> FieldElem {
        self.eta_bar
    }

    fn n(&self) -> usize {
        self.field.degree() as usize
    }

    fn u_zero(&self) -> Vec<u64> {
        vec![0; self.n()]
    }

    fn u_add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| x.wrapping_add(*y) & self.mask).collect()
    }

    fn u_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| x.wrapping_sub(*y) & self.mask).collect()
    }

    fn u_scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter().map(|x| x.wrapping_mul(k) & self.mask).collect()
    }

    fn u_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.n();
        let mut p = vec![0u64; 2 * n];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                p[i + j] = p[i + j].wrapping_add(x.wrapping_mul(*y));
            }
        }
        // a^n = -(sum of taps)
        for k in (n..2 * n).rev() {
            let c = p[k];
            if c == 0 {
                continue;
            }
            p[k] = 0;
            for &i in &self.taps {
                p[k - n + i] = p[k - n + i].wrapping_sub(c);
            }
        }
        p.truncate(n);
        p.iter().map(|x| x & self.mask).collect()
    }

    fn u_reduce(&self, a: &[u64]) -> FieldElem {
        let bits = a.iter().enumerate().fold(0u64, |acc, (i, x)| acc | (x & 1) << i);
        self.field.from_bits(bits)
    }

    fn u_lift(&self, x: FieldElem) -> Vec<u64> {
        (0..self.n()).map(|i| x.bits() >> i & 1).collect()
    }
}

/// `x + y s`
#[derive(Clone, PartialEq, Eq)]
struct SPair {
    x: Vec<u64>,
    y: Vec<u64>,
}

impl SPair {
    fn zero(r: &WittRing) -> Self {
        SPair {
            x: r.u_zero(),
            y: r.u_zero(),
        }
    }

    fn add(&self, o: &Self, r: &WittRing) -> Self {
        SPair {
            x: r.u_add(&self.x, &o.x),
            y: r.u_add(&self.y, &o.y),
        }
    }

    fn sub(&self, o: &Self, r: &WittRing) -> Self {
        SPair {
            x: r.u_sub(&self.x, &o.x),
            y: r.u_sub(&self.y, &o.y),
        }
    }

    fn mul(&self, o: &Self, r: &WittRing) -> Self {
        let xx = r.u_mul(&self.x, &o.x);
        let yy = r.u_mul(&self.y, &o.y);
        let xy = r.u_mul(&self.x, &o.y);
        let yx = r.u_mul(&self.y, &o.x);
        SPair {
            x: r.u_add(&xx, &r.u_scale(&yy, 2)),
            y: r.u_add(&xy, &yx),
        }
    }

    /// Multiplication by `s`.
    fn times_s(&self, r: &WittRing) -> Self {
        SPair {
            x: r.u_scale(&self.y, 2),
            y: self.x.clone(),
        }
    }

    fn times_unramified(&self, u: &[u64], r: &WittRing) -> Self {
        SPair {
            x: r.u_mul(&self.x, u),
            y: r.u_mul(&self.y, u),
        }
    }
}

/// Element `A + B b` of the lifting ring, with `A, B` in `W[s]`.
#[derive(Clone)]
pub struct WittElem {
    ring: Arc<WittRing>,
    a: SPair,
    b: SPair,
}

impl PartialEq for WittElem {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring)
            && self.a == other.a
            && self.b == other.b
    }
}

impl Eq for WittElem {}

impl WittElem {
    pub fn zero(ring: &Arc<WittRing>) -> Self {
        WittElem {
            ring: ring.clone(),
            a: SPair::zero(ring),
            b: SPair::zero(ring),
        }
    }

    pub fn from_int(ring: &Arc<WittRing>, k: i64) -> Self {
        let mut e = Self::zero(ring);
        if ring.n() > 0 {
            e.a.x[0] = (k as u64) & ring.mask;
        }
        e
    }

    pub fn one(ring: &Arc<WittRing>) -> Self {
        Self::from_int(ring, 1)
    }

    /// Lift with the same bit coefficients, read over Z/2^N.
    pub fn lift(ring: &Arc<WittRing>, x: FieldElem) -> Self {
        assert_eq!(x.spec(), ring.field, "element is not in the ring's residue field");
        let mut e = Self::zero(ring);
        e.a.x = ring.u_lift(x);
        e
    }

    pub fn sqrt2(ring: &Arc<WittRing>) -> Self {
        let mut e = Self::zero(ring);
        e.a.y[0] = 1;
        e
    }

    pub fn beta(ring: &Arc<WittRing>) -> Self {
        let mut e = Self::zero(ring);
        e.b.x[0] = 1;
        e
    }

    pub fn eta(ring: &Arc<WittRing>) -> Self {
        let mut e = Self::zero(ring);
        e.a.x = ring.eta.clone();
        e
    }

    pub fn ring(&self) -> &Arc<WittRing> {
        &self.ring
    }

    /// Coordinates `[x0, x1, y0, y1]` of `x0 + x1 s + (y0 + y1 s) b`.
    pub fn coordinates(&self) -> [&[u64]; 4] {
        [&self.a.x, &self.a.y, &self.b.x, &self.b.y]
    }

    pub fn from_coordinates(ring: &Arc<WittRing>, coords: [Vec<u64>; 4]) -> Result<Self> {
        let n = ring.n();
        if coords.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput(format!("expected {n} coefficients per coordinate")));
        }
        let m = |v: &Vec<u64>| v.iter().map(|x| x & ring.mask).collect::<Vec<_>>();
        Ok(WittElem {
            ring: ring.clone(),
            a: SPair {
                x: m(&coords[0]),
                y: m(&coords[1]),
            },
            b: SPair {
                x: m(&coords[2]),
                y: m(&coords[3]),
            },
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coordinates().iter().all(|c| c.iter().all(|x| *x == 0))
    }

    fn same_ring(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "operands live in different lifting rings"
        );
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let r = &*self.ring;
        let k = k as u64;
        WittElem {
            ring: self.ring.clone(),
            a: SPair {
                x: r.u_scale(&self.a.x, k),
                y: r.u_scale(&self.a.y, k),
            },
            b: SPair {
                x: r.u_scale(&self.b.x, k),
                y: r.u_scale(&self.b.y, k),
            },
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Image in the residue field: `x0 + y0 sqrt(eta)` mod 2.
    pub fn reduce(&self) -> FieldElem {
        let r = &*self.ring;
        r.u_reduce(&self.a.x) + r.u_reduce(&self.b.x) * r.sqrt_eta_bar
    }

    pub fn is_unit(&self) -> bool {
        !self.reduce().is_zero()
    }

    /// Largest `k` with every coordinate divisible by `2^k`; the precision
    /// for zero.
    pub fn content(&self) -> u32 {
        self.coordinates()
            .iter()
            .flat_map(|c| c.iter())
            .filter(|x| **x != 0)
            .map(|x| x.trailing_zeros())
            .min()
            .unwrap_or(self.ring.precision)
            .min(self.ring.precision)
    }

    /// Divides every coordinate by `2^k`. Requires `k <= content()`; the
    /// top `k` bits of the result are unknown and set to zero.
    pub fn shr(&self, k: u32) -> Result<Self> {
        if k > self.content() {
            return Err(Error::NotAUnit(format!("{self} is not divisible by 2^{k}")));
        }
        let shift = |v: &Vec<u64>| v.iter().map(|x| x.checked_shr(k).unwrap_or(0)).collect();
        Ok(WittElem {
            ring: self.ring.clone(),
            a: SPair {
                x: shift(&self.a.x),
                y: shift(&self.a.y),
            },
            b: SPair {
                x: shift(&self.b.x),
                y: shift(&self.b.y),
            },
        })
    }

    /// Newton iteration from the lift of the residue inverse.
    pub fn inverse(&self) -> Result<Self> {
        let inv_bar = self
            .reduce()
            .inverse()
            .ok_or_else(|| Error::NotAUnit(format!("{self} has zero residue")))?;
        let one = Self::one(&self.ring);
        let two = Self::from_int(&self.ring, 2);
        let mut y = Self::lift(&self.ring, inv_bar);
        for _ in 0..16 {
            let xy = self * &y;
            if xy == one {
                return Ok(y);
            }
            y = &y * &(&two - &xy);
        }
        Err(Error::NotAUnit(format!("inverse of {self} did not converge")))
    }

    /// Canonical text, e.g. `[a + 1]*s*b + [-2]*b + [1]`.
    pub fn to_text(&self) -> String {
        let layers = [
            (&self.b.y, "*s*b"),
            (&self.b.x, "*b"),
            (&self.a.y, "*s"),
            (&self.a.x, ""),
        ];
        let parts: Vec<String> = layers
            .iter()
            .filter(|(c, _)| c.iter().any(|x| *x != 0))
            .map(|(c, suffix)| format!("[{}]{suffix}", self.unramified_text(c)))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    fn signed(&self, x: u64) -> i128 {
        let p = self.ring.precision;
        let x = x as i128;
        if x >> (p - 1) & 1 == 1 {
            x - (1i128 << p)
        } else {
            x
        }
    }

    fn unramified_text(&self, c: &[u64]) -> String {
        let mut out = String::new();
        for (i, x) in c.iter().enumerate().rev() {
            let v = self.signed(*x);
            if v == 0 {
                continue;
            }
            let mag = v.unsigned_abs();
            if out.is_empty() {
                if v < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if v < 0 { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            match (mag, mono.is_empty()) {
                (_, true) => out.push_str(&mag.to_string()),
                (1, false) => out.push_str(&mono),
                (_, false) => out.push_str(&format!("{mag}*{mono}")),
            }
        }
        out
    }

    /// Inverse of [`WittElem::to_text`]. Whitespace is ignored.
    pub fn parse(ring: &Arc<WittRing>, text: &str) -> Result<Self> {
        let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::InvalidInput(format!("ring element `{text}`: {msg}"));
        let mut coords: [Vec<u64>; 4] = std::array::from_fn(|_| ring.u_zero());
        if src == "0" {
            return WittElem::from_coordinates(ring, coords);
        }
        let mut rest = src.as_str();
        loop {
            rest = rest.strip_prefix('[').ok_or_else(|| bad("expected `[`"))?;
            let close = rest.find(']').ok_or_else(|| bad("missing `]`"))?;
            let body = &rest[..close];
            rest = &rest[close + 1..];
            let slot = if let Some(r) = rest.strip_prefix("*s*b") {
                rest = r;
                3
            } else if let Some(r) = rest.strip_prefix("*b") {
                rest = r;
                2
            } else if let Some(r) = rest.strip_prefix("*s") {
                rest = r;
                1
            } else {
                0
            };
            let parsed = parse_unramified(ring, body).map_err(|m| bad(&m))?;
            coords[slot] = ring.u_add(&coords[slot], &parsed);
            if rest.is_empty() {
                break;
            }
            rest = rest.strip_prefix('+').ok_or_else(|| bad("expected `+` between layers"))?;
        }
        WittElem::from_coordinates(ring, coords)
    }
}

fn parse_unramified(ring: &WittRing, body: &str) -> std::result::Result<Vec<u64>, String> {
    let mut out = ring.u_zero();
    if body.is_empty() {
        return Err("empty coefficient".into());
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut negative = false;
    let bytes = body.as_bytes();
    for i in 0..=bytes.len() {
        if i == bytes.len() || (i > start && (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^') {
            terms.push((negative, &body[start..i]));
            if i < bytes.len() {
                negative = bytes[i] == b'-';
                start = i + 1;
            }
        } else if i == start && (bytes[i] == b'-' || bytes[i] == b'+') {
            negative = bytes[i] == b'-';
            start = i + 1;
        }
    }
    for (negative, term) in terms {
        let (coeff, exp) = match term.split_once('*') {
            Some((c, m)) => (c, Some(m)),
            None if term.starts_with('a') => ("1", Some(term)),
            None => (term, None),
        };
        let coeff: i128 = coeff.parse().map_err(|_| format!("bad integer `{coeff}`"))?;
        let exp: usize = match exp {
            None => 0,
            Some("a") => 1,
            Some(m) => m
                .strip_prefix("a^")
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| format!("bad monomial `{m}`"))?,
        };
        if exp >= ring.n() {
            return Err(format!("a^{exp} is not reduced"));
        }
        let v = if negative { -coeff } else { coeff };
        out[exp] = out[exp].wrapping_add(v as u64) & ring.mask;
    }
    Ok(out)
}

impl fmt::Display for WittElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for WittElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WittElem({})", self.to_text())
    }
}

impl Add for &WittElem {
    type Output = WittElem;
    fn add(self, rhs: &WittElem) -> WittElem {
        self.same_ring(rhs);
        WittElem {
            ring: self.ring.clone(),
            a: self.a.add(&rhs.a, &self.ring),
            b: self.b.add(&rhs.b, &self.ring),
        }
    }
}

impl Sub for &WittElem {
    type Output = WittElem;
    fn sub(self, rhs: &WittElem) -> WittElem {
        self.same_ring(rhs);
        WittElem {
            ring: self.ring.clone(),
            a: self.a.sub(&rhs.a, &self.ring),
            b: self.b.sub(&rhs.b, &self.ring),
        }
    }
}

impl Neg for &WittElem {
    type Output = WittElem;
    fn neg(self) -> WittElem {
        &WittElem::zero(&self.ring) - self
    }
}

impl Mul for &WittElem {
    type Output = WittElem;
    /// (A + Bb)(C + Db) = AC - eta BD + (AD + BC - s BD) b
    fn mul(self, rhs: &WittElem) -> WittElem {
        self.same_ring(rhs);
        let r = &*self.ring;
        let ac = self.a.mul(&rhs.a, r);
        let bd = self.b.mul(&rhs.b, r);
        let ad = self.a.mul(&rhs.b, r);
        let bc = self.b.mul(&rhs.a, r);
        WittElem {
            ring: self.ring.clone(),
            a: ac.sub(&bd.times_unramified(&r.eta, r), r),
            b: ad.add(&bc, r).sub(&bd.times_s(r), r),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for WittElem {
            type Output = WittElem;
            fn $m(self, rhs: WittElem) -> WittElem {
                $tr::$m(&self, &rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for WittElem {
    type Output = WittElem;
    fn neg(self) -> WittElem {
        -&self
    }
}

impl Coefficient for WittElem {
    fn is_zero(&self) -> bool {
        WittElem::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn one_like(&self) -> Self {
        WittElem::one(&self.ring)
    }
    fn is_atomic(&self) -> bool {
        !self.to_text().contains(" + ")
    }
}
