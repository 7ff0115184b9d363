//! Sparse multivariate polynomials over [`FieldElement`] and the form
//! manipulations built on them.
//!
//! [`Poly`] is the workhorse: a term map from exponent vectors to nonzero
//! coefficients with a fixed number of variables. [`HomogeneousForm`] wraps
//! a homogeneous `Poly` together with variable names and its degree.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldError};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("both polynomials are constant in the elimination variable")]
    ConstantInVariable,
    #[error("frame not adapted: {0}")]
    FrameNotAdapted(String),
    #[error("expected a form of degree {expected}, got {got}")]
    WrongDegree { expected: u32, got: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Exponent = Vec<u16>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, FieldElement>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: FieldElement) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, FieldElement::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: FieldElement) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, FieldElement::one())
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(coeffs: &[FieldElement]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, FieldElement)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u16]) -> FieldElement {
        self.terms.get(exp).cloned().unwrap_or_else(|| self.zero_coeff())
    }

    fn zero_coeff(&self) -> FieldElement {
        self.terms.values().next().map(|c| c.zero_like()).unwrap_or_else(FieldElement::zero)
    }

    fn add_term(&mut self, e: Exponent, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u32).sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u16> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().map(|&x| x as u32).sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms whose total degree is at most `d`.
    pub fn truncate(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>() <= d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Whether any term involves variable `var`.
    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn scale(&self, c: &FieldElement) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, x) in &self.terms {
            p.add_term(e.clone(), c * x);
        }
        p
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        let mut p = self.clone();
        p.try_add_assign(other)?;
        Ok(p)
    }

    pub fn try_add_assign(&mut self, other: &Poly) -> Result<(), PolyError> {
        self.check_arity(other)?;
        for (e, c) in &other.terms {
            if let Some(old) = self.terms.get_mut(e) {
                let s = old.try_add(c)?;
                if s.is_zero() {
                    self.terms.remove(e);
                } else {
                    *old = s;
                }
            } else {
                self.terms.insert(e.clone(), c.clone());
            }
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.mul_up_to(other, u32::MAX)
    }

    /// Product with every term of total degree above `d` dropped.
    pub fn mul_up_to(&self, other: &Poly, d: u32) -> Result<Poly, PolyError> {
        self.check_arity(other)?;
        let mut p = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let d1: u32 = e1.iter().map(|&x| x as u32).sum();
            for (e2, c2) in &other.terms {
                if d != u32::MAX && d1 + e2.iter().map(|&x| x as u32).sum::<u32>() > d {
                    continue;
                }
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1.try_mul(c2)?);
            }
        }
        Ok(p)
    }

    fn check_arity(&self, other: &Poly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::Arity { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }

    /// The constant 1 in this polynomial's coefficient field.
    pub fn one_like(&self) -> Poly {
        match self.terms.values().next() {
            Some(c) => Poly::constant(self.nvars, c.one_like()),
            None => Poly::one(self.nvars),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = self.one_like();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::Arity { expected: self.nvars, got: point.len() });
        }
        let mut acc = point
            .iter()
            .chain(self.terms.values())
            .find(|x| !x.is_zero())
            .map(|x| x.zero_like())
            .unwrap_or_else(FieldElement::zero);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t = t.try_mul(x)?;
                }
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }

    /// Composition `self(images[0], ..., images[n-1])`; all images must
    /// share one variable count.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly, PolyError> {
        self.substitute_up_to(images, u32::MAX)
    }

    /// Composition truncated to total degree `d`.
    pub fn substitute_up_to(&self, images: &[Poly], d: u32) -> Result<Poly, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::Arity { expected: self.nvars, got: images.len() });
        }
        let m = images.first().map_or(0, |p| p.nvars);
        if let Some(bad) = images.iter().find(|p| p.nvars != m) {
            return Err(PolyError::Arity { expected: m, got: bad.nvars });
        }
        let maxdeg: Vec<u16> = (0..self.nvars).map(|i| self.degree_in(i).unwrap_or(0)).collect();
        let powers: Vec<Vec<Poly>> = images
            .iter()
            .zip(&maxdeg)
            .map(|(img, &k)| {
                let mut v = vec![img.one_like()];
                for j in 1..=k as usize {
                    let next = v[j - 1].mul_up_to(img, d)?;
                    v.push(next);
                }
                Ok(v)
            })
            .collect::<Result<_, PolyError>>()?;
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul_up_to(&powers[i][k as usize], d)?;
                }
            }
            out.try_add_assign(&t)?;
        }
        Ok(out)
    }

    pub fn partial(&self, var: usize) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut f = e.clone();
                f[var] -= 1;
                p.add_term(f, c * &c.int_like(e[var] as i64));
            }
        }
        p
    }

    pub fn gradient_at(&self, point: &[FieldElement]) -> Result<Vec<FieldElement>, PolyError> {
        (0..self.nvars).map(|i| self.partial(i).eval(point)).collect()
    }

    /// Coefficient of `prod vars[i]^exps[i]`, as a polynomial in the same
    /// ring with those variables removed from every term.
    pub fn coeff_of(&self, vars: &[usize], exps: &[u16]) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if vars.iter().zip(exps).all(|(&v, &k)| e[v] == k) {
                let mut f = e.clone();
                for &v in vars {
                    f[v] = 0;
                }
                p.add_term(f, c.clone());
            }
        }
        p
    }

    /// Coefficients in `var`, lowest power first; each lives in the same
    /// ring with `var` cleared.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let d = self.degree_in(var).unwrap_or(0);
        (0..=d).map(|k| self.coeff_of(&[var], &[k])).collect()
    }

    pub fn map_coeffs(
        &self,
        f: impl Fn(&FieldElement) -> Result<FieldElement, FieldError>,
    ) -> Result<Poly, FieldError> {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), f(c)?);
        }
        Ok(p)
    }

    pub fn reduce_mod_p(&self, p: u64) -> Result<Poly, FieldError> {
        self.map_coeffs(|c| c.reduce_mod_p(p))
    }

    /// Reindexes into a ring with `n` variables; `map[i]` is the new index
    /// of variable `i`.
    pub fn rename(&self, n: usize, map: &[usize]) -> Poly {
        let mut p = Poly::zero(n);
        for (e, c) in &self.terms {
            let mut f = vec![0; n];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            p.add_term(f, c.clone());
        }
        p
    }

    pub fn leading_term(&self) -> Option<(&Exponent, &FieldElement)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (ld, lc) = d.leading_term()?;
        let lc_inv = lc.inv().ok()?;
        let mut r = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((lr, cr)) = r.leading_term() {
            if lr.iter().zip(ld).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponent = lr.iter().zip(ld).map(|(a, b)| a - b).collect();
            let t = Poly::monomial(self.nvars, e, cr * &lc_inv);
            r = &r - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    /// Rational multiple with coprime integer coefficients and positive
    /// leading coefficient; other fields are returned unchanged.
    pub fn primitive_integer(&self) -> Poly {
        use num::{BigInt, BigRational, Integer, One, Signed, Zero};
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for c in self.terms.values() {
            let Some(r) = c.as_rational() else {
                return self.clone();
            };
            lcm = lcm.lcm(r.denom());
        }
        for c in self.terms.values() {
            let r = c.as_rational().unwrap();
            gcd = gcd.gcd(&(r.numer() * (&lcm / r.denom())));
        }
        if gcd.is_zero() {
            return self.clone();
        }
        let mut factor = BigRational::new(lcm, gcd);
        if self.leading_term().is_some_and(|(_, c)| c.as_rational().unwrap().is_negative()) {
            factor = -factor;
        }
        self.scale(&FieldElement::Rational(factor))
    }

    pub fn leading_field(&self) -> Option<crate::field::FieldTag> {
        self.terms.values().next().map(FieldElement::tag)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_add(&-rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self.try_add_assign(&rhs).unwrap_or_else(|e| panic!("{e}"));
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self.try_add_assign(&-rhs).unwrap_or_else(|e| panic!("{e}"));
        self
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exp: Exponent,
    c: FieldElement,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let recs: Vec<TermRecord> =
            self.terms.iter().map(|(e, c)| TermRecord { exp: e.clone(), c: c.clone() }).collect();
        recs.serialize(s)
    }
}

impl Poly {
    /// Builds a polynomial from the sparse list format, checking that every
    /// exponent has `nvars` entries.
    pub fn from_records_json(value: &serde_json::Value, nvars: usize) -> Result<Poly, String> {
        let recs: Vec<TermRecord> = serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        let mut p = Poly::zero(nvars);
        for r in recs {
            if r.exp.len() != nvars {
                return Err(format!("exponent {:?} has length {}, expected {nvars}", r.exp, r.exp.len()));
            }
            p.add_term(r.exp, r.c);
        }
        Ok(p)
    }
}

/// Gram matrix of a quadratic polynomial: `f(x) = x^T G x`.
pub fn gram_matrix(f: &Poly) -> Matrix {
    let n = f.nvars();
    let like = f.terms().next().map(|(_, c)| c.zero_like()).unwrap_or_else(FieldElement::zero);
    let half = like.int_like(2).inv().expect("characteristic not 2");
    let mut g = vec![vec![like.clone(); n]; n];
    for (e, c) in f.terms() {
        let idx: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
        match idx.as_slice() {
            [i, j] if i == j => g[*i][*i] = c.clone(),
            [i, j] => {
                let h = c * &half;
                g[*i][*j] = h.clone();
                g[*j][*i] = h;
            }
            _ => {}
        }
    }
    g
}

/// Associated symmetric bilinear form `b(u, v)` with `b(u, u) = f(u)`.
pub fn bilinear_value(f: &Poly, u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    let g = gram_matrix(f);
    crate::field::dot(u, &linalg::mat_vec(&g, v))
}

pub fn quadratic_rank_of(f: &Poly) -> usize {
    linalg::rank(&gram_matrix(f))
}

/// Sylvester resultant of `f` and `g` with respect to `var`; rows of `f`
/// come first. The result lives in the same ring and does not involve `var`.
pub fn resultant(f: &Poly, g: &Poly, var: usize) -> Result<Poly, PolyError> {
    f.check_arity(g)?;
    let m = f.degree_in(var).unwrap_or(0) as usize;
    let n = g.degree_in(var).unwrap_or(0) as usize;
    if m == 0 && n == 0 {
        return Err(PolyError::ConstantInVariable);
    }
    let fc = f.coeffs_in(var);
    let gc = g.coeffs_in(var);
    let size = m + n;
    let zero = Poly::zero(f.nvars());
    // row i of f-block: coefficients from highest power, shifted by i
    let mut rows: Vec<Vec<Poly>> = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for k in 0..=m {
            row[i + k] = fc[m - k].clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for k in 0..=n {
            row[i + k] = gc[n - k].clone();
        }
        rows.push(row);
    }
    Ok(poly_determinant(&rows))
}

/// Determinant of a square matrix of polynomials by Laplace expansion over
/// column subsets (dynamic programming, row by row).
pub fn poly_determinant(rows: &[Vec<Poly>]) -> Poly {
    let n = rows.len();
    let nv = rows.first().and_then(|r| r.first()).map_or(0, Poly::nvars);
    if n == 0 {
        return Poly::one(nv);
    }
    let unit = rows.iter().flatten().find(|p| !p.is_zero()).map_or_else(|| Poly::one(nv), Poly::one_like);
    let mut dp: BTreeMap<u32, Poly> = BTreeMap::new();
    dp.insert(0, unit);
    for row in rows {
        let mut next: BTreeMap<u32, Poly> = BTreeMap::new();
        for (&mask, val) in &dp {
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.is_zero() {
                    continue;
                }
                // sign: number of used columns greater than c
                let above = (mask >> (c + 1)).count_ones();
                let mut t = val * entry;
                if above % 2 == 1 {
                    t = -t;
                }
                let key = mask | (1 << c);
                let slot = next.entry(key).or_insert_with(|| Poly::zero(nv));
                *slot = &*slot + &t;
            }
        }
        next.retain(|_, p| !p.is_zero());
        dp = next;
        if dp.is_empty() {
            return Poly::zero(nv);
        }
    }
    dp.remove(&((1u32 << n) - 1)).unwrap_or_else(|| Poly::zero(nv))
}

/// Homogeneous polynomial with named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousForm {
    vars: Vec<String>,
    degree: u32,
    poly: Poly,
}

impl HomogeneousForm {
    pub fn new(vars: Vec<String>, poly: Poly) -> Result<Self, PolyError> {
        if poly.nvars() != vars.len() {
            return Err(PolyError::Arity { expected: vars.len(), got: poly.nvars() });
        }
        if !poly.is_homogeneous() {
            return Err(PolyError::NotHomogeneous);
        }
        let degree = poly.degree().unwrap_or(0);
        Ok(HomogeneousForm { vars, degree, poly })
    }

    /// Form with zero polynomial and a declared degree.
    pub fn zero_of_degree(vars: Vec<String>, degree: u32) -> Self {
        let n = vars.len();
        HomogeneousForm { vars, degree, poly: Poly::zero(n) }
    }

    /// Form in the standard ambient coordinates `x0..x{n-1}`.
    pub fn in_coordinates(poly: Poly) -> Result<Self, PolyError> {
        let vars = (0..poly.nvars()).map(|i| format!("x{i}")).collect();
        Self::new(vars, poly)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        self.poly.eval(point)
    }

    /// Composition with linear forms in a new variable set.
    pub fn substitute(&self, new_vars: Vec<String>, images: &[Poly]) -> Result<Self, PolyError> {
        let p = self.poly.substitute(images)?;
        if images.iter().any(|i| !i.is_homogeneous() || i.degree().unwrap_or(1) != 1) {
            return Err(PolyError::WrongDegree {
                expected: 1,
                got: images.iter().filter_map(Poly::degree).max().unwrap_or(0),
            });
        }
        let mut out = Self::new(new_vars, p)?;
        out.degree = self.degree;
        Ok(out)
    }

    pub fn gradient(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>, PolyError> {
        self.poly.gradient_at(x)
    }

    pub fn quadratic_rank(&self) -> Result<usize, PolyError> {
        if self.degree != 2 && !self.poly.is_zero() {
            return Err(PolyError::WrongDegree { expected: 2, got: self.degree });
        }
        Ok(quadratic_rank_of(&self.poly))
    }

    pub fn bilinear_form(&self, u: &[FieldElement], v: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if self.degree != 2 && !self.poly.is_zero() {
            return Err(PolyError::WrongDegree { expected: 2, got: self.degree });
        }
        if u.len() != self.vars.len() || v.len() != self.vars.len() {
            return Err(PolyError::Arity { expected: self.vars.len(), got: u.len().min(v.len()) });
        }
        Ok(bilinear_value(&self.poly, u, v))
    }

    /// Pulls the form back along `t -> sum t_i basis[i]`.
    pub fn restrict_to_subspace(&self, basis: &[Vec<FieldElement>]) -> Result<Self, PolyError> {
        if basis.iter().any(|b| b.len() != self.vars.len()) {
            return Err(PolyError::Arity { expected: self.vars.len(), got: basis.first().map_or(0, Vec::len) });
        }
        if linalg::rank(&basis.to_vec()) != basis.len() {
            return Err(PolyError::DependentBasis);
        }
        let m = basis.len();
        let images: Vec<Poly> = (0..self.vars.len())
            .map(|i| Poly::linear(&basis.iter().map(|b| b[i].clone()).collect::<Vec<_>>()))
            .collect();
        let images = if m == 0 { vec![Poly::zero(0); self.vars.len()] } else { images };
        let names = (0..m).map(|i| format!("t{i}")).collect();
        let mut out = Self::new(names, self.poly.substitute(&images)?)?;
        out.degree = self.degree;
        Ok(out)
    }

    /// Sylvester resultant with respect to the named variable.
    pub fn resultant_eliminate(&self, other: &Self, var: &str) -> Result<Self, PolyError> {
        let idx =
            self.vars.iter().position(|v| v == var).ok_or(PolyError::Arity { expected: self.vars.len(), got: 0 })?;
        if other.vars != self.vars {
            return Err(PolyError::Arity { expected: self.vars.len(), got: other.vars.len() });
        }
        let r = resultant(&self.poly, &other.poly, idx)?;
        let mut out = Self::new(self.vars.clone(), r)?;
        if out.poly.is_zero() {
            out.degree = self.degree * other.degree;
        }
        Ok(out)
    }
}

impl Serialize for HomogeneousForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.poly.serialize(s)
    }
}

/// Pieces of `q` and `k` relative to the distinguished line
/// `x2 = ... = x5 = 0` through the singular point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedDecomposition {
    pub h1: Poly,
    pub q1: Poly,
    pub h2: Poly,
    pub q2: Poly,
    /// Includes the `x5^3` term unless `cubic_tail` is set.
    pub k1: Poly,
    /// Cuspidal mode: `k = x1^2 h2 + x1 q2 + k1 + x5^3` with every piece
    /// free of `x5`.
    pub cubic_tail: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionMode {
    Nodal,
    Cuspidal,
}

impl AdaptedDecomposition {
    /// `q` and `k` are forms in the six ambient coordinates that do not
    /// involve `x0`.
    pub fn decompose(q: &Poly, k: &Poly, mode: DecompositionMode) -> Result<Self, PolyError> {
        for f in [q, k] {
            if f.nvars() != 6 {
                return Err(PolyError::Arity { expected: 6, got: f.nvars() });
            }
            if f.involves(0) {
                return Err(PolyError::FrameNotAdapted("form involves x0".into()));
            }
        }
        if q.degree_in(1).unwrap_or(0) > 1 {
            return Err(PolyError::FrameNotAdapted("q has an x1^2 term".into()));
        }
        if k.degree_in(1).unwrap_or(0) > 2 {
            return Err(PolyError::FrameNotAdapted("k has an x1^3 term".into()));
        }
        let qc = q.coeffs_in(1);
        let kc = k.coeffs_in(1);
        let get = |v: &Vec<Poly>, i: usize| v.get(i).cloned().unwrap_or_else(|| Poly::zero(6));
        let mut d = AdaptedDecomposition {
            h1: get(&qc, 1),
            q1: get(&qc, 0),
            h2: get(&kc, 2),
            q2: get(&kc, 1),
            k1: get(&kc, 0),
            cubic_tail: false,
        };
        if mode == DecompositionMode::Cuspidal {
            let mut e = vec![0; 6];
            e[5] = 3;
            let tail = Poly::monomial(6, e, FieldElement::one());
            let rest = &d.k1 - &tail;
            if [&d.h1, &d.q1, &d.h2, &d.q2, &rest].iter().any(|f| f.involves(5)) {
                return Err(PolyError::FrameNotAdapted(
                    "cuspidal pieces must be free of x5 with a unit x5^3 term".into(),
                ));
            }
            d.k1 = rest;
            d.cubic_tail = true;
        }
        Ok(d)
    }

    pub fn reconstruct(&self) -> (Poly, Poly) {
        let x1 = Poly::var(6, 1);
        let q = &(&x1 * &self.h1) + &self.q1;
        let mut k = &(&(&(&x1 * &x1) * &self.h2) + &(&x1 * &self.q2)) + &self.k1;
        if self.cubic_tail {
            let mut e = vec![0; 6];
            e[5] = 3;
            k = &k + &Poly::monomial(6, e, FieldElement::one());
        }
        (q, k)
    }

    /// Cubic term of `k` on `{x0 = x1 = 0}`, with the `x5^3` tail restored.
    pub fn full_k1(&self) -> Poly {
        if self.cubic_tail {
            let mut e = vec![0; 6];
            e[5] = 3;
            &self.k1 + &Poly::monomial(6, e, FieldElement::one())
        } else {
            self.k1.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int_vec;
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    #[test]
    fn substitute_product() {
        // x0 x1 at (l, m, 0, 0, 0, 0) in variables (l, m)
        let f = &x(6, 0) * &x(6, 1);
        let z = Poly::zero(2);
        let images = vec![x(2, 0), x(2, 1), z.clone(), z.clone(), z.clone(), z];
        assert_eq!(f.substitute(&images).unwrap(), &x(2, 0) * &x(2, 1));
        assert!(f.substitute(&[x(2, 0)]).is_err());
    }

    #[test]
    fn decomposition_reads_coefficients() {
        let q = &(&(&x(6, 1) * &x(6, 2)) + &(&x(6, 3) * &x(6, 4))) + &(&x(6, 5) * &x(6, 5));
        let k = &x(6, 2).pow(3) + &x(6, 4).pow(3);
        let d = AdaptedDecomposition::decompose(&q, &k, DecompositionMode::Nodal).unwrap();
        assert_eq!(d.h1, x(6, 2));
        assert_eq!(d.q1, &(&x(6, 3) * &x(6, 4)) + &(&x(6, 5) * &x(6, 5)));
        assert!(d.h2.is_zero() && d.q2.is_zero());
        assert_eq!(d.k1, k);
        let bad = &x(6, 1) * &x(6, 1);
        assert!(matches!(
            AdaptedDecomposition::decompose(&bad, &k, DecompositionMode::Nodal),
            Err(PolyError::FrameNotAdapted(_))
        ));
    }

    #[test]
    fn cuspidal_tail_split() {
        let q = &(&x(6, 1) * &x(6, 2)) + &(&x(6, 3) * &x(6, 4));
        let k = &(&x(6, 1) * &x(6, 1)) * &x(6, 3);
        let k = &(&k + &x(6, 4).pow(3)) + &x(6, 5).pow(3);
        let d = AdaptedDecomposition::decompose(&q, &k, DecompositionMode::Cuspidal).unwrap();
        assert_eq!(d.k1, x(6, 4).pow(3));
        assert_eq!(d.h2, x(6, 3));
        assert_eq!(d.reconstruct(), (q, k));
    }

    #[test]
    fn bilinear_examples() {
        let f = &x(2, 0) * &x(2, 0);
        assert_eq!(bilinear_value(&f, &int_vec(&[1, 0]), &int_vec(&[1, 0])), fe(1));
        let g = &x(2, 0) * &x(2, 1);
        assert_eq!(bilinear_value(&g, &int_vec(&[1, 0]), &int_vec(&[0, 1])), FieldElement::from_ratio(1, 2));
    }

    #[test]
    fn quadratic_ranks() {
        let q5 = &(&(&x(5, 0) * &x(5, 1)) + &(&x(5, 2) * &x(5, 3))) + &(&x(5, 4) * &x(5, 4));
        assert_eq!(quadratic_rank_of(&q5), 5);
        let q4 = &(&x(5, 0) * &x(5, 1)) + &(&x(5, 2) * &x(5, 3));
        assert_eq!(quadratic_rank_of(&q4), 4);
    }

    #[test]
    fn gradient_of_square() {
        let f = &x(6, 0) * &x(6, 0);
        let g = f.gradient_at(&int_vec(&[1, 0, 0, 0, 0, 0])).unwrap();
        assert_eq!(g, int_vec(&[2, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn restrict_examples() {
        let f = HomogeneousForm::in_coordinates(&(&x(2, 0) * &x(2, 0)) + &(&x(2, 1) * &x(2, 1))).unwrap();
        let r = f.restrict_to_subspace(&[int_vec(&[1, 0])]).unwrap();
        assert_eq!(r.poly(), &(&x(1, 0) * &x(1, 0)));
        assert!(f.restrict_to_subspace(&[int_vec(&[1, 0]), int_vec(&[2, 0])]).is_err());
        let g = HomogeneousForm::in_coordinates(&x(3, 0) * &x(3, 1)).unwrap();
        assert!(g.restrict_to_subspace(&[int_vec(&[0, 1, 0]), int_vec(&[0, 0, 1])]).unwrap().is_zero());
    }

    #[test]
    fn resultant_examples() {
        // res(x - y, x + y; x) = det [[1, -y], [1, y]] = 2y
        let a = &x(2, 0) - &x(2, 1);
        let b = &x(2, 0) + &x(2, 1);
        assert_eq!(resultant(&a, &b, 0).unwrap(), x(2, 1).scale(&fe(2)));
        let c = &(&x(2, 0) * &x(2, 0)) - &(&x(2, 1) * &x(2, 1));
        assert!(resultant(&c, &a, 0).unwrap().is_zero());
        assert_eq!(resultant(&Poly::one(2), &Poly::one(2), 0), Err(PolyError::ConstantInVariable));
    }

    #[test]
    fn exact_division() {
        let a = &x(3, 0) + &x(3, 2);
        let b = &(&x(3, 1) * &x(3, 1)) - &x(3, 0);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!((&prod + &Poly::one(3)).div_exact(&a).is_none());
    }

    #[test]
    fn serialization_format() {
        let f = &x(6, 0) * &x(6, 1);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"[{"exp":[1,1,0,0,0,0],"c":"1"}]"#);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(Poly::from_records_json(&v, 6).unwrap(), f);
        assert!(Poly::from_records_json(&v, 5).is_err());
    }

    fn arb_poly(nvars: usize, deg: u32) -> impl Strategy<Value = Poly> {
        let monos = all_monomials(nvars, deg);
        prop::collection::vec(-4i64..=4, monos.len())
            .prop_map(move |cs| Poly::from_terms(nvars, monos.iter().cloned().zip(cs.into_iter().map(fe))))
    }

    fn all_monomials(n: usize, d: u32) -> Vec<Exponent> {
        if n == 0 {
            return if d == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for k in 0..=d {
            for mut rest in all_monomials(n - 1, d - k) {
                rest.insert(0, k as u16);
                out.push(rest);
            }
        }
        out
    }

    fn arb_vec(n: usize) -> impl Strategy<Value = Vec<FieldElement>> {
        prop::collection::vec(-5i64..=5, n).prop_map(|v| int_vec(&v))
    }

    proptest! {
        #[test]
        fn euler_identity(f in arb_poly(4, 3), p in arb_vec(4)) {
            let g = f.gradient_at(&p).unwrap();
            let lhs = f.eval(&p).unwrap() * fe(3);
            prop_assert_eq!(lhs, crate::field::dot(&p, &g));
        }

        #[test]
        fn polarization(f in arb_poly(4, 2), u in arb_vec(4), v in arb_vec(4)) {
            let lhs = bilinear_value(&f, &u, &v) * fe(2);
            let s = crate::field::add_vec(&u, &v);
            let rhs = f.eval(&s).unwrap() - f.eval(&u).unwrap() - f.eval(&v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn substitute_is_multiplicative(f in arb_poly(3, 2), g in arb_poly(3, 1), m in prop::collection::vec(arb_vec(2), 3)) {
            let images: Vec<Poly> = m.iter().map(|v| Poly::linear(v)).collect();
            let lhs = (&f * &g).substitute(&images).unwrap();
            let rhs = &f.substitute(&images).unwrap() * &g.substitute(&images).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn rank_invariant_under_substitution(f in arb_poly(4, 2), m in prop::collection::vec(arb_vec(4), 4)) {
            prop_assume!(linalg::rank(&m) == 4);
            let images: Vec<Poly> = m.iter().map(|v| Poly::linear(v)).collect();
            let g = f.substitute(&images).unwrap();
            prop_assert_eq!(quadratic_rank_of(&f), quadratic_rank_of(&g));
        }

        #[test]
        fn decomposition_roundtrip(q in arb_poly(5, 2), k in arb_poly(5, 3)) {
            // embed into x1..x5 and drop x1^2, x1^3 terms
            let map = [1, 2, 3, 4, 5];
            let q = q.rename(6, &map);
            let k = k.rename(6, &map);
            let q: Poly = Poly::from_terms(6, q.terms().filter(|(e, _)| e[1] < 2).map(|(e, c)| (e.clone(), c.clone())));
            let k: Poly = Poly::from_terms(6, k.terms().filter(|(e, _)| e[1] < 3).map(|(e, c)| (e.clone(), c.clone())));
            let d = AdaptedDecomposition::decompose(&q, &k, DecompositionMode::Nodal).unwrap();
            prop_assert_eq!(d.reconstruct(), (q, k));
        }
    }
}
