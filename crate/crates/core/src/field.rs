//! Exact coefficient fields.
//!
//! A [`FieldElement`] lives in one of four fields: the rationals, a real or
//! imaginary quadratic field `Q(sqrt d)` for a non-square integer `d`, the Eisenstein field `Q(z3)` with
//! `z3^2 + z3 + 1 = 0`, or a prime field `F_p` with `p > 3`.
//!
//! Rationals embed into both characteristic-zero extensions, so a rational
//! element combines freely with a quadratic or cyclotomic one. Any other mix
//! (two different `d`, quadratic with cyclotomic, anything with `F_p`) is
//! rejected. Extension elements whose irrational part vanishes are demoted
//! to [`FieldElement::Rational`], which keeps the representation canonical.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed-field operation: {0} with {1}")]
    MixedFields(String, String),
    #[error("bad prime {p}: denominator of {value} is not invertible")]
    BadPrime { p: u64, value: String },
    #[error("invalid field parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// Which field an element lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Rational,
    Quadratic(BigInt),
    Zeta3,
    Prime(u64),
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "Q"),
            FieldTag::Quadratic(d) => write!(f, "Q(sqrt {d})"),
            FieldTag::Zeta3 => write!(f, "Q(z3)"),
            FieldTag::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum FieldElement {
    Rational(BigRational),
    /// `a + b*sqrt(d)`, `b != 0`, `d` an integer that is not a square.
    /// Small square factors are removed where this type builds `d` itself,
    /// but `d` need not be squarefree.
    Quadratic {
        d: BigInt,
        a: BigRational,
        b: BigRational,
    },
    /// `a + b*z3`, `b != 0`.
    Zeta3 {
        a: BigRational,
        b: BigRational,
    },
    /// Residue `v` modulo the prime `p`, `0 <= v < p`.
    Prime {
        p: u64,
        v: u64,
    },
}

use FieldElement as FE;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

fn is_integer_square(d: &BigInt) -> bool {
    !d.is_negative() && &(d.sqrt() * d.sqrt()) == d
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Square root modulo an odd prime (Tonelli-Shanks).
pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

fn same_square_class(d1: &BigInt, d2: &BigInt) -> bool {
    d1.sign() == d2.sign() && is_integer_square(&(d1 * d2))
}

/// `r > 0` with `sqrt(from) = r sqrt(to)` for radicands of one square class.
fn radicand_ratio(from: &BigInt, to: &BigInt) -> BigRational {
    BigRational::new((from * to).sqrt(), to.abs())
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Writes a nonzero rational as `m^2 * d` with `d` an integer; prime
/// squares below a trial-division bound are moved into `m`, so `d` is
/// squarefree whenever its cofactor above the bound is. Returns `(m, d)`.
pub fn squarefree_decomposition(x: &BigRational) -> Result<(BigRational, BigInt), FieldError> {
    if x.is_zero() {
        return Err(FieldError::InvalidParameter("square class of zero".into()));
    }
    // x = n/m = n*m / m^2
    let prod: BigInt = x.numer() * x.denom();
    let negative = prod.is_negative();
    let mut rest = prod.abs();
    let mut square_root = BigInt::one();
    let mut core = BigInt::one();
    let mut f = 2u64;
    while f <= 100_000 && BigInt::from(f) * BigInt::from(f) <= rest {
        let fb = BigInt::from(f);
        let mut e = 0u32;
        while (&rest % &fb).is_zero() {
            rest /= &fb;
            e += 1;
        }
        if e > 0 {
            square_root *= num::pow(fb.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                core *= &fb;
            }
        }
        f += 1;
    }
    if is_integer_square(&rest) {
        square_root *= rest.sqrt();
    } else {
        core *= rest;
    }
    if negative {
        core = -core;
    }
    let m = BigRational::new(square_root, x.denom().clone());
    Ok((m, core))
}

impl FieldElement {
    pub fn from_int(n: i64) -> Self {
        FE::Rational(rat(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        FE::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        FE::from_int(0)
    }

    pub fn one() -> Self {
        FE::from_int(1)
    }

    /// `a + b*sqrt(d)`.
    pub fn quadratic(d: i64, a: BigRational, b: BigRational) -> Result<Self, FieldError> {
        Self::quadratic_big(BigInt::from(d), a, b)
    }

    pub fn quadratic_big(d: BigInt, a: BigRational, b: BigRational) -> Result<Self, FieldError> {
        if is_integer_square(&d) {
            return Err(FieldError::InvalidParameter(format!("quadratic field needs a non-square d, got {d}")));
        }
        Ok(Self::quad_normalized(d, a, b))
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_of(d: i64) -> Result<Self, FieldError> {
        Self::quadratic(d, rat(0), rat(1))
    }

    pub fn zeta3_elem(a: BigRational, b: BigRational) -> Self {
        Self::zeta_normalized(a, b)
    }

    /// The primitive cube root of unity `z3`.
    pub fn zeta3() -> Self {
        FE::Zeta3 { a: rat(0), b: rat(1) }
    }

    pub fn prime(p: u64, v: i64) -> Result<Self, FieldError> {
        check_prime(p)?;
        let r = v.rem_euclid(p as i64) as u64;
        Ok(FE::Prime { p, v: r })
    }

    fn quad_normalized(d: BigInt, a: BigRational, b: BigRational) -> Self {
        if b.is_zero() {
            FE::Rational(a)
        } else {
            FE::Quadratic { d, a, b }
        }
    }

    fn zeta_normalized(a: BigRational, b: BigRational) -> Self {
        if b.is_zero() {
            FE::Rational(a)
        } else {
            FE::Zeta3 { a, b }
        }
    }

    pub fn tag(&self) -> FieldTag {
        match self {
            FE::Rational(_) => FieldTag::Rational,
            FE::Quadratic { d, .. } => FieldTag::Quadratic(d.clone()),
            FE::Zeta3 { .. } => FieldTag::Zeta3,
            FE::Prime { p, .. } => FieldTag::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FE::Rational(x) => x.is_zero(),
            // extension variants always carry b != 0
            FE::Quadratic { .. } | FE::Zeta3 { .. } => false,
            FE::Prime { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FE::Rational(x) => x.is_one(),
            FE::Quadratic { .. } | FE::Zeta3 { .. } => false,
            FE::Prime { v, .. } => *v == 1,
        }
    }

    /// Zero of the same field as `self`.
    pub fn zero_like(&self) -> Self {
        self.int_like(0)
    }

    pub fn one_like(&self) -> Self {
        self.int_like(1)
    }

    /// The integer `n` seen in the field of `self`.
    pub fn int_like(&self, n: i64) -> Self {
        match self {
            FE::Prime { p, .. } => FE::Prime { p: *p, v: n.rem_euclid(*p as i64) as u64 },
            _ => FE::from_int(n),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FE::Rational(x) => Some(x),
            _ => None,
        }
    }

    /// Brings two elements into a common field, or reports a mix.
    /// `Q(sqrt d1)` and `Q(sqrt d2)` coincide when `d1 d2` is a square; the
    /// radicand of smaller absolute value is kept.
    fn unify(a: &Self, b: &Self) -> Result<FieldTag, FieldError> {
        let (ta, tb) = (a.tag(), b.tag());
        match (&ta, &tb) {
            _ if ta == tb => Ok(ta),
            (FieldTag::Quadratic(d1), FieldTag::Quadratic(d2)) if same_square_class(d1, d2) => {
                Ok(if (d1.abs(), d1) <= (d2.abs(), d2) { ta } else { tb })
            }
            (FieldTag::Rational, FieldTag::Quadratic(_) | FieldTag::Zeta3) => Ok(tb),
            (FieldTag::Quadratic(_) | FieldTag::Zeta3, FieldTag::Rational) => Ok(ta),
            _ => Err(FieldError::MixedFields(ta.to_string(), tb.to_string())),
        }
    }

    /// Components over `Q(sqrt d)` of an element of `Q` or of an equal
    /// quadratic field.
    fn parts_in(&self, d: &BigInt) -> (BigRational, BigRational) {
        match self {
            FE::Quadratic { d: e, a, b } if e != d => (a.clone(), b * radicand_ratio(e, d)),
            _ => self.parts(),
        }
    }

    /// Components `(a, b)` of a characteristic-zero element, viewing a
    /// rational as `a + 0*w`.
    fn parts(&self) -> (BigRational, BigRational) {
        match self {
            FE::Rational(x) => (x.clone(), rat(0)),
            FE::Quadratic { a, b, .. } | FE::Zeta3 { a, b } => (a.clone(), b.clone()),
            FE::Prime { .. } => unreachable!("prime elements have no rational parts"),
        }
    }

    fn prime_parts(a: &Self, b: &Self) -> (u64, u64, u64) {
        match (a, b) {
            (FE::Prime { p, v: x }, FE::Prime { v: y, .. }) => (*p, *x, *y),
            _ => unreachable!(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(match Self::unify(self, other)? {
            FieldTag::Rational => FE::Rational(self.as_rational().unwrap() + other.as_rational().unwrap()),
            FieldTag::Quadratic(d) => {
                let ((a, b), (c, e)) = (self.parts_in(&d), other.parts_in(&d));
                Self::quad_normalized(d, a + c, b + e)
            }
            FieldTag::Zeta3 => {
                let ((a, b), (c, e)) = (self.parts(), other.parts());
                Self::zeta_normalized(a + c, b + e)
            }
            FieldTag::Prime(_) => {
                let (p, x, y) = Self::prime_parts(self, other);
                FE::Prime { p, v: ((x as u128 + y as u128) % p as u128) as u64 }
            }
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(match Self::unify(self, other)? {
            FieldTag::Rational => FE::Rational(self.as_rational().unwrap() * other.as_rational().unwrap()),
            FieldTag::Quadratic(d) => {
                let ((a, b), (c, e)) = (self.parts_in(&d), other.parts_in(&d));
                let re = &a * &c + &b * &e * BigRational::from_integer(d.clone());
                let im = a * e + b * c;
                Self::quad_normalized(d, re, im)
            }
            FieldTag::Zeta3 => {
                // z^2 = -1 - z
                let ((a, b), (c, e)) = (self.parts(), other.parts());
                let be = &b * &e;
                let re = &a * &c - &be;
                let im = a * e + b * c - be;
                Self::zeta_normalized(re, im)
            }
            FieldTag::Prime(_) => {
                let (p, x, y) = Self::prime_parts(self, other);
                FE::Prime { p, v: mul_mod(x, y, p) }
            }
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, FieldError> {
        Self::unify(self, other)?;
        self.try_mul(&other.inv()?)
    }

    fn neg_ref(&self) -> Self {
        match self {
            FE::Rational(x) => FE::Rational(-x),
            FE::Quadratic { d, a, b } => FE::Quadratic { d: d.clone(), a: -a, b: -b },
            FE::Zeta3 { a, b } => FE::Zeta3 { a: -a, b: -b },
            FE::Prime { p, v } => FE::Prime { p: *p, v: (p - v) % p },
        }
    }

    /// Galois conjugate: `sqrt d -> -sqrt d`, `z3 -> z3^2`. Identity on
    /// rationals and prime-field elements.
    pub fn conjugate(&self) -> Self {
        match self {
            FE::Quadratic { d, a, b } => FE::Quadratic { d: d.clone(), a: a.clone(), b: -b },
            // a + b z^2 = (a - b) - b z
            FE::Zeta3 { a, b } => Self::zeta_normalized(a - b, -b),
            other => other.clone(),
        }
    }

    /// Field norm down to the rationals (identity on `Q` and `F_p`).
    pub fn norm(&self) -> Self {
        match self {
            FE::Quadratic { d, a, b } => FE::Rational(a * a - b * b * BigRational::from_integer(d.clone())),
            FE::Zeta3 { a, b } => FE::Rational(a * a - a * b + b * b),
            other => other.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            FE::Rational(x) => FE::Rational(x.recip()),
            FE::Quadratic { .. } | FE::Zeta3 { .. } => {
                let n = self.norm();
                let n = n.as_rational().unwrap().recip();
                self.conjugate().try_mul(&FE::Rational(n))?
            }
            FE::Prime { p, v } => FE::Prime { p: *p, v: inv_mod(*v, *p).unwrap() },
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.one_like();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// A square root inside the element's own field, when one exists.
    pub fn sqrt(&self) -> Option<Self> {
        match self {
            FE::Rational(x) => rational_sqrt(x).map(FE::Rational),
            FE::Prime { p, v } => sqrt_mod(*v, *p).map(|r| FE::Prime { p: *p, v: r }),
            FE::Quadratic { d, a, b } => {
                sqrt_in_quadratic(d, a, b).map(|(u, w)| Self::quad_normalized(d.clone(), u, w))
            }
            FE::Zeta3 { a, b } => {
                // z = (-1 + s)/2 with s = sqrt(-3); x + y s form
                let two = rat(2);
                let x = a - b / &two;
                let y = b / &two;
                let (u, w) = sqrt_in_quadratic(&BigInt::from(-3), &x, &y)?;
                // u + w s = (u + w) + 2 w z
                Some(Self::zeta_normalized(&u + &w, w * two))
            }
        }
    }

    /// Reads the element as an integer in `F_p` when it is a rational with
    /// invertible denominator.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Self, FieldError> {
        check_prime(p)?;
        match self {
            FE::Rational(x) => reduce_rational(x, p),
            FE::Prime { p: q, .. } if *q == p => Ok(self.clone()),
            other => Err(FieldError::MixedFields(other.tag().to_string(), FieldTag::Prime(p).to_string())),
        }
    }

    /// Total order used only for canonical sorting; not a field order.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        fn rank(x: &FE) -> u8 {
            match x {
                FE::Rational(_) => 0,
                FE::Quadratic { .. } => 1,
                FE::Zeta3 { .. } => 2,
                FE::Prime { .. } => 3,
            }
        }
        match (self, other) {
            (FE::Rational(x), FE::Rational(y)) => x.cmp(y),
            (FE::Quadratic { d, a, b }, FE::Quadratic { d: e, a: c, b: f }) => {
                if d != e && same_square_class(d, e) {
                    a.cmp(c).then(b.cmp(&(f * radicand_ratio(e, d))))
                } else {
                    d.cmp(e).then(a.cmp(c)).then(b.cmp(f))
                }
            }
            (FE::Zeta3 { a, b }, FE::Zeta3 { a: c, b: f }) => a.cmp(c).then(b.cmp(f)),
            (FE::Prime { p, v }, FE::Prime { p: q, v: w }) => p.cmp(q).then(v.cmp(w)),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

fn check_prime(p: u64) -> Result<(), FieldError> {
    if p <= 3 || !is_prime(p) || p >= (1 << 62) {
        return Err(FieldError::InvalidParameter(format!("prime field needs a prime p > 3, got {p}")));
    }
    Ok(())
}

fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

fn reduce_rational(x: &BigRational, p: u64) -> Result<FieldElement, FieldError> {
    let den = reduce_bigint(x.denom(), p);
    let inv = inv_mod(den, p).ok_or_else(|| FieldError::BadPrime { p, value: x.to_string() })?;
    Ok(FE::Prime { p, v: mul_mod(reduce_bigint(x.numer(), p), inv, p) })
}

/// Reduction of a rational modulo `p`; fails when `p` divides the denominator.
pub fn reduce_mod_p(x: &FieldElement, p: u64) -> Result<FieldElement, FieldError> {
    x.reduce_mod_p(p)
}

/// Solves `(u + w sqrt d)^2 = x + y sqrt d` over the rationals.
fn sqrt_in_quadratic(d: &BigInt, x: &BigRational, y: &BigRational) -> Option<(BigRational, BigRational)> {
    let dd = BigRational::from_integer(d.clone());
    if y.is_zero() {
        if let Some(r) = rational_sqrt(x) {
            return Some((r, rat(0)));
        }
        // x = d * w^2
        let w = rational_sqrt(&(x / &dd))?;
        return Some((rat(0), w));
    }
    // u^2 + d w^2 = x, 2 u w = y, so u^2 is a root of t^2 - x t + d y^2 / 4
    let n = rational_sqrt(&(x * x - &dd * y * y))?;
    let two = rat(2);
    for cand in [(x + &n) / &two, (x - &n) / &two] {
        if let Some(u) = rational_sqrt(&cand) {
            if u.is_zero() {
                continue;
            }
            let w = y / (&u * &two);
            return Some((u, w));
        }
    }
    None
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FE::Rational(x), FE::Rational(y)) => x == y,
            (FE::Quadratic { d, a, b }, FE::Quadratic { d: e, a: c, b: f }) => {
                a == c && (if d == e { b == f } else { same_square_class(d, e) && *f == b * radicand_ratio(d, e) })
            }
            (FE::Zeta3 { a, b }, FE::Zeta3 { a: c, b: f }) => a == c && b == f,
            (FE::Prime { p, v }, FE::Prime { p: q, v: w }) => p == q && v == w,
            _ => false,
        }
    }
}

impl Eq for FieldElement {}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            /// Panics on a mixed-field operation; use the `try_` form to
            /// handle that case.
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FE::from_int(n)
    }
}

impl From<BigRational> for FieldElement {
    fn from(x: BigRational) -> Self {
        FE::Rational(x)
    }
}

fn fmt_rat(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn fmt_ext(a: &BigRational, b: &BigRational, unit: &str) -> String {
    let sign = if b.numer().sign() == Sign::Minus { '-' } else { '+' };
    format!("{}{}{}*{}", fmt_rat(a), sign, fmt_rat(&b.abs()), unit)
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FE::Rational(x) => write!(f, "{}", fmt_rat(x)),
            FE::Quadratic { d, a, b } => {
                let unit = if d.is_negative() { format!("r({d})") } else { format!("r{d}") };
                write!(f, "{}", fmt_ext(a, b, &unit))
            }
            FE::Zeta3 { a, b } => write!(f, "{}", fmt_ext(a, b, "z3")),
            FE::Prime { p, v } => write!(f, "{v} mod {p}"),
        }
    }
}

fn parse_rat(s: &str) -> Result<BigRational, FieldError> {
    let s = s.trim();
    let err = || FieldError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

/// Splits `"a+b*unit"` into `("a", "+b")`.
fn split_ext(s: &str, star: usize) -> Result<(&str, &str), FieldError> {
    let head = &s[..star];
    let cut = head
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !head[..i].ends_with('/'))
        .map(|(i, _)| i)
        .last()
        .ok_or_else(|| FieldError::Parse(s.to_string()))?;
    Ok((&head[..cut], &head[cut..]))
}

impl FromStr for FieldElement {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        if let Some((v, p)) = s.split_once(" mod ") {
            let p: u64 = p.trim().parse().map_err(|_| FieldError::Parse(s.into()))?;
            let v: BigInt = v.trim().parse().map_err(|_| FieldError::Parse(s.into()))?;
            check_prime(p)?;
            return Ok(FE::Prime { p, v: reduce_bigint(&v, p) });
        }
        if let Some(star) = s.find("*z3") {
            let (a, b) = split_ext(s, star)?;
            return Ok(FE::zeta3_elem(parse_rat(a)?, parse_rat(b.trim_start_matches('+'))?));
        }
        if let Some(star) = s.find("*r") {
            let (a, b) = split_ext(s, star)?;
            let unit = s[star + 2..].trim_start_matches('(').trim_end_matches(')');
            let d: BigInt = unit.parse().map_err(|_| FieldError::Parse(s.into()))?;
            return FE::quadratic_big(d, parse_rat(a)?, parse_rat(b.trim_start_matches('+'))?);
        }
        parse_rat(s).map(FE::Rational)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All cube roots of unity in `F_p`, sorted.
pub fn cube_roots_of_unity_mod(p: u64) -> Vec<u64> {
    (1..p).filter(|&x| pow_mod(x, 3, p) == 1).collect()
}

/// Vector helpers shared by the geometric modules.
pub fn dot(u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    let mut acc = u.first().map(|x| x.zero_like()).unwrap_or_else(FE::zero);
    for (a, b) in u.iter().zip(v) {
        acc = acc + a * b;
    }
    acc
}

pub fn scale_vec(c: &FieldElement, v: &[FieldElement]) -> Vec<FieldElement> {
    v.iter().map(|x| c * x).collect()
}

pub fn add_vec(u: &[FieldElement], v: &[FieldElement]) -> Vec<FieldElement> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn sub_vec(u: &[FieldElement], v: &[FieldElement]) -> Vec<FieldElement> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn int_vec(v: &[i64]) -> Vec<FieldElement> {
    v.iter().map(|&x| FE::from_int(x)).collect()
}

pub fn is_zero_vec(v: &[FieldElement]) -> bool {
    v.iter().all(FieldElement::is_zero)
}

/// Scales a nonzero vector so its first nonzero entry is 1.
pub fn normalize_projective(v: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let inv = lead.inv().ok()?;
    Some(scale_vec(&inv, v))
}

pub fn proportional(u: &[FieldElement], v: &[FieldElement]) -> bool {
    match (normalize_projective(u), normalize_projective(v)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FE {
        FE::from_ratio(n, d)
    }

    #[test]
    fn norm_of_one_plus_zeta() {
        let w = FE::zeta3();
        let x = FE::one() + &w;
        let y = FE::one() + w.pow(2);
        assert_eq!(x * y, FE::one());
    }

    #[test]
    fn zeta_is_primitive_cube_root() {
        let w = FE::zeta3();
        assert!(!w.is_one());
        assert_eq!(w.pow(3), FE::one());
        assert_eq!(w.pow(2) + &w + FE::one(), FE::zero());
    }

    #[test]
    fn sqrt_two_squared() {
        let r2 = FE::sqrt_of(2).unwrap();
        assert_eq!(&r2 * &r2, FE::from_int(2));
    }

    #[test]
    fn cube_roots_mod_7() {
        assert_eq!(cube_roots_of_unity_mod(7), vec![1, 2, 4]);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(q(1, 2).reduce_mod_p(7).unwrap(), FE::prime(7, 4).unwrap());
        assert_eq!(q(3, 1).reduce_mod_p(5).unwrap(), FE::prime(5, 3).unwrap());
        assert!(matches!(q(1, 5).reduce_mod_p(5), Err(FieldError::BadPrime { .. })));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = FE::sqrt_of(2).unwrap();
        let b = FE::zeta3();
        assert!(matches!(a.try_add(&b), Err(FieldError::MixedFields(..))));
        let c = FE::sqrt_of(3).unwrap();
        assert!(a.try_mul(&c).is_err());
        let p = FE::prime(7, 3).unwrap();
        assert!(p.try_add(&FE::one()).is_err());
        assert!(p.try_add(&FE::prime(11, 3).unwrap()).is_err());
        // rationals embed into characteristic-zero extensions
        assert_eq!(a.try_add(&FE::one()).unwrap().tag(), FieldTag::Quadratic(2.into()));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(FE::zero().inv(), Err(FieldError::DivisionByZero));
        assert_eq!(
            FE::one().try_div(&FE::prime(7, 0).unwrap()).unwrap_err(),
            FieldError::MixedFields("Q".into(), "F_7".into())
        );
        assert_eq!(FE::prime(7, 3).unwrap().try_div(&FE::prime(7, 0).unwrap()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn string_forms_roundtrip() {
        for s in ["3/2", "1+2*r2", "1-1*z3", "4 mod 7", "-1/2-3/4*r(-3)", "0", "-5"] {
            let x: FE = s.parse().unwrap();
            assert_eq!(x.to_string(), s, "{s}");
        }
        assert_eq!("1+0*z3".parse::<FE>().unwrap(), FE::one());
    }

    #[test]
    fn square_roots() {
        assert_eq!(q(9, 4).sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt(), None);
        let r2 = FE::sqrt_of(2).unwrap();
        let x = (FE::one() + &r2).pow(2);
        let s = x.sqrt().unwrap();
        assert_eq!(&s * &s, x);
        let w = FE::zeta3();
        let y = (FE::from_int(2) + &w).pow(2);
        let t = y.sqrt().unwrap();
        assert_eq!(&t * &t, y);
        assert_eq!(FE::from_int(-3).sqrt(), None);
        let m = FE::prime(1009, 2).unwrap().pow(2);
        let r = m.sqrt().unwrap();
        assert_eq!(&r * &r, m);
    }

    #[test]
    fn squarefree_parts() {
        let (m, d) = squarefree_decomposition(q(18, 1).as_rational().unwrap()).unwrap();
        assert_eq!((m, d), (BigRational::from_integer(3.into()), 2.into()));
        let (m, d) = squarefree_decomposition(q(-3, 4).as_rational().unwrap()).unwrap();
        assert_eq!(d, BigInt::from(-3));
        assert_eq!(m, BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn tonelli_shanks_1009() {
        // 1009 = 1 mod 16 exercises the full loop
        for a in 1..200u64 {
            if let Some(r) = sqrt_mod(a, 1009) {
                assert_eq!(mul_mod(r, r, 1009), a);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_rat() -> impl Strategy<Value = BigRational> {
            (-20i64..=20, 1i64..=9).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
        }

        fn element(tag: u8) -> BoxedStrategy<FE> {
            match tag {
                0 => small_rat().prop_map(FE::Rational).boxed(),
                1 => (small_rat(), small_rat()).prop_map(|(a, b)| FE::quadratic(5, a, b).unwrap()).boxed(),
                2 => (small_rat(), small_rat()).prop_map(|(a, b)| FE::zeta3_elem(a, b)).boxed(),
                _ => (0i64..1009).prop_map(|v| FE::prime(1009, v).unwrap()).boxed(),
            }
        }

        fn triple() -> impl Strategy<Value = (FE, FE, FE)> {
            (0u8..4).prop_flat_map(|t| (element(t), element(t), element(t)))
        }

        proptest! {
            #[test]
            fn field_axioms((a, b, c) in triple()) {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&(&a - &b) + &b, a.clone());
                if !a.is_zero() {
                    prop_assert!((&a * &a.inv().unwrap()).is_one());
                }
            }

            #[test]
            fn reduction_is_a_homomorphism(x in small_rat(), y in small_rat()) {
                let p = 1009;
                let (fx, fy) = (FE::Rational(x), FE::Rational(y));
                let r = |z: &FE| z.reduce_mod_p(p).unwrap();
                prop_assert_eq!(r(&(&fx * &fy)), &r(&fx) * &r(&fy));
                prop_assert_eq!(r(&(&fx + &fy)), &r(&fx) + &r(&fy));
            }

            #[test]
            fn display_parse_roundtrip(a in (0u8..4).prop_flat_map(element)) {
                prop_assert_eq!(a.to_string().parse::<FE>().unwrap(), a);
            }
        }
    }
}
