//! Binary fields GF(2^n) for 1 <= n <= 64.
//!
//! Elements are bit vectors of polynomial-basis coordinates: bit `i` is the
//! coefficient of `a^i`, where `a` is the class of `x` modulo the canonical
//! modulus of degree `n`. The modulus for a given `n` never changes, so text
//! and JSON produced by one run can be read back by another.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Fixed moduli, low-weight where a standard choice exists.
const MODULUS_TABLE: &[(u32, u128)] = &[
    (1, 0b11),
    (2, 0b111),
    (3, 0b1011),
    (4, 0b1_0011),
    (6, 0b101_1011),
    (8, 0x11d),
    (16, 0x1_002d),
    (32, (1u128 << 32) | (1 << 22) | 0b111),
    (64, (1u128 << 64) | 0b1_1011),
];

fn moduli() -> &'static [u128] {
    static MODULI: OnceLock<Vec<u128>> = OnceLock::new();
    MODULI.get_or_init(|| {
        let mut out = vec![0u128; FieldSpec::MAX_DEGREE as usize + 1];
        for n in 1..=FieldSpec::MAX_DEGREE {
            let modulus = match MODULUS_TABLE.iter().find(|(d, _)| *d == n) {
                Some(&(_, m)) => m,
                None => smallest_irreducible(n),
            };
            let ok = if n <= 32 {
                is_irreducible_trial(modulus)
            } else {
                is_irreducible_rabin(modulus)
            };
            assert!(ok, "modulus table entry for degree {n} is reducible");
            out[n as usize] = modulus;
        }
        out
    })
}

fn smallest_irreducible(n: u32) -> u128 {
    let lo = 1u128 << n;
    (lo..lo << 1)
        .find(|&p| is_irreducible_rabin(p))
        .expect("irreducible polynomials exist in every degree")
}

// ---- GF(2)[x] on u128 bit vectors ----------------------------------------

fn poly_degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn clmul(a: u64, b: u64) -> u128 {
    let a = a as u128;
    let mut b = b;
    let mut r = 0u128;
    while b != 0 {
        r ^= a << b.trailing_zeros();
        b &= b - 1;
    }
    r
}

fn poly_rem(mut a: u128, m: u128) -> u128 {
    let dm = poly_degree(m);
    loop {
        let da = poly_degree(a);
        if da < dm {
            return a;
        }
        a ^= m << (da - dm);
    }
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Product of two residues modulo `m`; both inputs have degree < deg(m) <= 64.
fn poly_mulmod(a: u128, b: u128, m: u128) -> u128 {
    poly_rem(clmul(a as u64, b as u64), m)
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: x^(2^n) = x mod f and gcd(x^(2^(n/q)) - x, f) = 1 for primes q | n.
pub(crate) fn is_irreducible_rabin(f: u128) -> bool {
    let n = poly_degree(f);
    if n < 1 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = poly_rem(0b10, f);
    let frobenius = |k: i32| {
        let mut p = x;
        for _ in 0..k {
            p = poly_mulmod(p, p, f);
        }
        p
    };
    if frobenius(n) != x {
        return false;
    }
    prime_factors(n as u32)
        .into_iter()
        .all(|q| poly_gcd(frobenius(n / q as i32) ^ x, f) == 1)
}

/// Exhaustive trial division by every polynomial of degree 1..=deg(f)/2.
pub(crate) fn is_irreducible_trial(f: u128) -> bool {
    let n = poly_degree(f);
    if n < 1 {
        return false;
    }
    for d in 1..=n / 2 {
        for g in (1u128 << d)..(1u128 << (d + 1)) {
            if poly_rem(f, g) == 0 {
                return false;
            }
        }
    }
    true
}

fn format_bit_poly(bits: u128, var: char) -> String {
    if bits == 0 {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for i in (0..128).rev() {
        if bits >> i & 1 == 1 {
            parts.push(match i {
                0 => "1".to_string(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            });
        }
    }
    parts.join(" + ")
}

// ---- field specification --------------------------------------------------

/// GF(2^n) together with its canonical modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    degree: u32,
    modulus: u128,
}

impl FieldSpec {
    pub const MAX_DEGREE: u32 = 64;

    pub fn new(degree: u32) -> Result<Self> {
        if degree == 0 || degree > Self::MAX_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        Ok(FieldSpec {
            degree,
            modulus: moduli()[degree as usize],
        })
    }

    pub fn gf2() -> Self {
        Self::new(1).expect("degree 1 is supported")
    }

    /// Accepts `gf2` and `gf2_<n>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        if lower == "gf2" {
            return Ok(Self::gf2());
        }
        let degree = lower
            .strip_prefix("gf2_")
            .and_then(|d| d.parse::<u32>().ok())
            .ok_or_else(|| Error::InvalidInput(format!("unknown field '{name}', expected gf2 or gf2_<n>")))?;
        Self::new(degree)
    }

    pub fn name(&self) -> String {
        if self.degree == 1 {
            "gf2".to_string()
        } else {
            format!("gf2_{}", self.degree)
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn modulus_string(&self) -> String {
        format_bit_poly(self.modulus, 'x')
    }

    /// Number of elements; `2^64` does not fit in `u64`.
    pub fn size(&self) -> u128 {
        1u128 << self.degree
    }

    fn mask(&self) -> u64 {
        if self.degree == 64 {
            u64::MAX
        } else {
            (1u64 << self.degree) - 1
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { spec: *self, bits: 0 }
    }

    pub fn one(&self) -> FieldElem {
        self.from_bits(1)
    }

    /// The class `a` of `x`.
    pub fn generator(&self) -> FieldElem {
        FieldElem {
            spec: *self,
            bits: poly_rem(0b10, self.modulus) as u64,
        }
    }

    /// Element with the given coordinate bits.
    ///
    /// # Panics
    /// If `bits` has a bit set at or above the field degree.
    pub fn from_bits(&self, bits: u64) -> FieldElem {
        assert!(bits & !self.mask() == 0, "{bits:#x} is not an element of {self}");
        FieldElem { spec: *self, bits }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..=self.mask()).map(move |bits| FieldElem { spec: *self, bits })
    }

    /// The degree-2 extension and the embedding of this field into it.
    pub fn quadratic_extension(&self) -> Result<Embedding> {
        let target = FieldSpec::new(self.degree * 2)?;
        Embedding::new(*self, target)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {}", self.degree, self.modulus_string())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})", self.degree)
    }
}

// ---- elements ---------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    spec: FieldSpec,
    bits: u64,
}

impl FieldElem {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_one(&self) -> bool {
        self.bits == 1
    }

    /// True for 0 and 1.
    pub fn in_prime_field(&self) -> bool {
        self.bits <= 1
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn pow(self, mut exp: u128) -> Self {
        let mut base = self;
        let mut acc = self.spec.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base = base.square();
            exp >>= 1;
        }
        acc
    }

    pub fn inverse(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(self.spec.size() - 2))
        }
    }

    /// The unique square root, `x^(2^(n-1))`.
    pub fn sqrt(self) -> Self {
        let mut y = self;
        for _ in 1..self.spec.degree {
            y = y.square();
        }
        y
    }

    /// Absolute trace to GF(2), as 0 or 1.
    pub fn trace(self) -> u8 {
        let mut acc = self;
        let mut y = self;
        for _ in 1..self.spec.degree {
            y = y.square();
            acc += y;
        }
        debug_assert!(acc.in_prime_field());
        acc.bits as u8
    }

    fn check_same(&self, other: &Self) {
        assert!(
            self.spec == other.spec,
            "field mismatch: {} vs {}",
            self.spec,
            other.spec
        );
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.spec)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bit_poly(self.bits as u128, 'a'))
    }
}

// characteristic 2: addition is XOR and subtraction is addition
#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: Self) -> Self {
        self.check_same(&rhs);
        FieldElem {
            spec: self.spec,
            bits: self.bits ^ rhs.bits,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: Self) -> Self {
        self + rhs
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> Self {
        self
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: Self) -> Self {
        self.check_same(&rhs);
        FieldElem {
            spec: self.spec,
            bits: poly_mulmod(self.bits as u128, rhs.bits as u128, self.spec.modulus) as u64,
        }
    }
}

impl AddAssign for FieldElem {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElem {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElem {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

// ---- GF(2)-linear equations -------------------------------------------------

/// Solves `map(x) = rhs` for a GF(2)-linear (additive) `map` on the field.
///
/// Returns the solution whose bit vector is smallest as an integer, or `None`
/// when `rhs` is outside the image.
pub fn solve_additive(
    spec: FieldSpec,
    map: impl Fn(FieldElem) -> FieldElem,
    rhs: FieldElem,
) -> Option<FieldElem> {
    // Image basis keyed by pivot (highest set bit), each carrying the
    // combination of input basis vectors that produced it.
    let mut image: Vec<(u64, u64)> = Vec::new();
    let mut kernel: Vec<u64> = Vec::new();
    let pivot = |v: u64| 63 - v.leading_zeros();
    let reduce = |image: &[(u64, u64)], mut v: u64, mut comb: u64| {
        loop {
            let Some(&(bv, bc)) = image.iter().find(|(bv, _)| v != 0 && pivot(*bv) == pivot(v)) else {
                return (v, comb);
            };
            v ^= bv;
            comb ^= bc;
        }
    };
    for i in 0..spec.degree {
        let column = map(spec.from_bits(1 << i)).bits;
        let (v, comb) = reduce(&image, column, 1 << i);
        if v == 0 {
            kernel.push(comb);
        } else {
            image.push((v, comb));
        }
    }
    let (residual, mut x) = reduce(&image, rhs.bits, 0);
    if residual != 0 {
        return None;
    }
    // Fully reduced echelon form of the kernel, then clear pivots of x greedily.
    kernel.sort_unstable_by(|a, b| b.cmp(a));
    let mut echelon: Vec<u64> = Vec::new();
    for mut k in kernel {
        for &e in &echelon {
            if k >> pivot(e) & 1 == 1 {
                k ^= e;
            }
        }
        if k != 0 {
            for e in echelon.iter_mut() {
                if *e >> pivot(k) & 1 == 1 {
                    *e ^= k;
                }
            }
            echelon.push(k);
        }
    }
    echelon.sort_unstable_by(|a, b| b.cmp(a));
    for e in echelon {
        if x >> pivot(e) & 1 == 1 {
            x ^= e;
        }
    }
    Some(spec.from_bits(x))
}

/// Whether a root that is missing from the working field may be looked for
/// in the quadratic extension.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExtensionPolicy {
    #[default]
    Fail,
    AutoExtend,
}

/// Returns `eta` with `eta^2 + eta = alpha`, the smaller of the two roots.
pub fn solve_artin_schreier(alpha: FieldElem) -> Result<FieldElem> {
    let spec = alpha.spec();
    if alpha.trace() != 0 {
        return Err(Error::NoSolutionInField { degree: spec.degree() });
    }
    let eta = solve_additive(spec, |y| y.square() + y, alpha)
        .expect("trace-zero elements lie in the image of y^2 + y");
    Ok(eta)
}

/// As [`solve_artin_schreier`], but may return a root in GF(2^2n) under
/// [`ExtensionPolicy::AutoExtend`].
pub fn solve_artin_schreier_with(alpha: FieldElem, policy: ExtensionPolicy) -> Result<FieldElem> {
    match solve_artin_schreier(alpha) {
        Err(Error::NoSolutionInField { .. }) if policy == ExtensionPolicy::AutoExtend => {
            let embedding = alpha.spec().quadratic_extension()?;
            solve_artin_schreier(embedding.apply(alpha))
        }
        other => other,
    }
}

// ---- embeddings ---------------------------------------------------------------

/// Field homomorphism GF(2^n) -> GF(2^m), n | m, sending `a` to a fixed root
/// of the source modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Embedding {
    source: FieldSpec,
    target: FieldSpec,
    generator_image: FieldElem,
}

impl Embedding {
    /// Uses the smallest root (as an integer bit vector) of the source modulus.
    pub fn new(source: FieldSpec, target: FieldSpec) -> Result<Self> {
        if target.degree() % source.degree() != 0 {
            return Err(Error::InvalidInput(format!("{source} does not embed in {target}")));
        }
        let modulus: Vec<FieldElem> = (0..=source.degree())
            .map(|i| target.from_bits((source.modulus() >> i & 1) as u64))
            .collect();
        let mut roots = dense::roots(&modulus);
        roots.sort_by_key(|r| r.bits());
        let generator_image = *roots
            .first()
            .ok_or_else(|| Error::InvalidInput("source modulus has no root in target".into()))?;
        Ok(Embedding {
            source,
            target,
            generator_image,
        })
    }

    pub fn source(&self) -> FieldSpec {
        self.source
    }

    pub fn target(&self) -> FieldSpec {
        self.target
    }

    pub fn apply(&self, x: FieldElem) -> FieldElem {
        assert_eq!(x.spec(), self.source, "element is not in the embedding source");
        let mut acc = self.target.zero();
        for i in (0..self.source.degree()).rev() {
            acc = acc * self.generator_image + self.target.from_bits(x.bits() >> i & 1);
        }
        acc
    }
}

/// Dense univariate polynomials over GF(2^n), used only for root finding.
mod dense {
    use super::FieldElem;

    type Poly = Vec<FieldElem>;

    fn trim(mut p: Poly) -> Poly {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    fn deg(p: &Poly) -> isize {
        p.len() as isize - 1
    }

    fn divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
        let b = trim(b.clone());
        let mut r = trim(a.clone());
        let lead_inv = b.last().expect("division by zero polynomial").inverse().unwrap();
        let zero = lead_inv.spec().zero();
        let mut q = vec![zero; (deg(&r) - deg(&b) + 1).max(0) as usize];
        while deg(&r) >= deg(&b) {
            let shift = (deg(&r) - deg(&b)) as usize;
            let c = *r.last().unwrap() * lead_inv;
            q[shift] = c;
            for (i, bi) in b.iter().enumerate() {
                r[i + shift] -= c * *bi;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    fn mulmod(a: &Poly, b: &Poly, f: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let zero = a[0].spec().zero();
        let mut out = vec![zero; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += *x * *y;
            }
        }
        divmod(&out, f).1
    }

    fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
        while !b.is_empty() {
            let r = divmod(&a, &b).1;
            a = b;
            b = r;
        }
        let inv = a.last().unwrap().inverse().unwrap();
        a.into_iter().map(|c| c * inv).collect()
    }

    /// All roots of a squarefree polynomial that splits over the coefficient
    /// field (Berlekamp's trace algorithm, deterministic over a basis).
    pub(super) fn roots(f: &Poly) -> Vec<FieldElem> {
        let f = trim(f.clone());
        match deg(&f) {
            d if d < 1 => return Vec::new(),
            1 => return vec![f[0] * f[1].inverse().unwrap()],
            _ => {}
        }
        let spec = f[0].spec();
        for i in 0..spec.degree() {
            let delta = spec.from_bits(1 << i);
            let mut power = vec![spec.zero(), delta];
            let mut trace = power.clone();
            for _ in 1..spec.degree() {
                power = mulmod(&power, &power, &f);
                let len = trace.len().max(power.len());
                trace.resize(len, spec.zero());
                for (t, p) in trace.iter_mut().zip(power.iter()) {
                    *t += *p;
                }
            }
            let h = gcd(&f, &trim(trace));
            if deg(&h) > 0 && deg(&h) < deg(&f) {
                let (cofactor, _) = divmod(&f, &h);
                let mut out = roots(&h);
                out.extend(roots(&cofactor));
                return out;
            }
        }
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_moduli_have_their_degree() {
        for n in 1..=FieldSpec::MAX_DEGREE {
            let spec = FieldSpec::new(n).unwrap();
            assert_eq!(poly_degree(spec.modulus()), n as i32);
        }
        assert_eq!(FieldSpec::new(8).unwrap().modulus_string(), "x^8 + x^4 + x^3 + x^2 + 1");
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for p in 2u128..(1 << 11) {
            assert_eq!(is_irreducible_rabin(p), is_irreducible_trial(p), "{p:#b}");
        }
    }

    #[test]
    fn rejects_degree_zero_and_too_large() {
        assert_eq!(FieldSpec::new(0), Err(Error::UnsupportedDegree(0)));
        assert_eq!(FieldSpec::new(65), Err(Error::UnsupportedDegree(65)));
    }

    #[test]
    fn sqrt_in_gf4() {
        let f = FieldSpec::new(2).unwrap();
        let a = f.generator();
        assert_eq!(f.zero().sqrt(), f.zero());
        assert_eq!(f.one().sqrt(), f.one());
        // (a+1)^2 = a^2 + 1 = a
        assert_eq!(a.sqrt(), a + f.one());
        for x in f.elements() {
            let roots: Vec<_> = f.elements().filter(|y| y.square() == x).collect();
            assert_eq!(roots, vec![x.sqrt()]);
        }
    }

    #[test]
    fn trace_table_of_gf4() {
        let f = FieldSpec::new(2).unwrap();
        let traces: Vec<u8> = f.elements().map(|x| x.trace()).collect();
        // 0, 1, a, a+1
        assert_eq!(traces, vec![0, 0, 1, 1]);
    }

    #[test]
    fn artin_schreier_examples_in_gf4() {
        let f = FieldSpec::new(2).unwrap();
        let a = f.generator();
        assert_eq!(solve_artin_schreier(f.zero()), Ok(f.zero()));
        assert_eq!(solve_artin_schreier(a), Err(Error::NoSolutionInField { degree: 2 }));
        // a^2 + a = 1, roots a and a + 1; tie-break picks a
        assert_eq!(a * (a + f.one()), f.one());
        assert_eq!(solve_artin_schreier(f.one()), Ok(a));
    }

    #[test]
    fn auto_extend_solves_in_quadratic_extension() {
        let f = FieldSpec::new(2).unwrap();
        let a = f.generator();
        let eta = solve_artin_schreier_with(a, ExtensionPolicy::AutoExtend).unwrap();
        assert_eq!(eta.spec().degree(), 4);
        let embed = f.quadratic_extension().unwrap();
        assert_eq!(eta.square() + eta, embed.apply(a));
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        for n in [1, 2, 3, 4, 8] {
            let spec = FieldSpec::new(n).unwrap();
            let e = spec.quadratic_extension().unwrap();
            let xs: Vec<_> = spec.elements().take(40).collect();
            for &x in &xs {
                for &y in &xs {
                    assert_eq!(e.apply(x * y), e.apply(x) * e.apply(y));
                    assert_eq!(e.apply(x + y), e.apply(x) + e.apply(y));
                }
            }
        }
    }

    #[test]
    fn large_embeddings_exist() {
        let e = FieldSpec::new(32).unwrap().quadratic_extension().unwrap();
        let g = FieldSpec::new(32).unwrap().generator();
        assert_eq!(e.apply(g * g), e.apply(g) * e.apply(g));
    }

    #[test]
    fn solve_additive_returns_smallest_solution() {
        let f = FieldSpec::new(4).unwrap();
        for rhs in f.elements() {
            let sols: Vec<_> = f.elements().filter(|y| y.square() + *y == rhs).collect();
            assert_eq!(solve_additive(f, |y| y.square() + y, rhs), sols.first().copied());
        }
    }

    #[test]
    fn from_name_parses_cli_spellings() {
        assert_eq!(FieldSpec::from_name("gf2").unwrap().degree(), 1);
        assert_eq!(FieldSpec::from_name("gf2_8").unwrap().degree(), 8);
        assert!(FieldSpec::from_name("gf3").is_err());
    }
}
