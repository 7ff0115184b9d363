//! Néron-Severi arithmetic on the Hilbert square of the surface: the
//! pairing on `Z h + Z delta`, intersection counts of two test curves with
//! the divisors `h`, `delta` and the trident divisor, the class solve, the
//! contracted rays, and small integral lattices with an isometry search.

use std::fmt;

use num::{BigInt, BigRational, Integer, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{self, FieldElement};
use crate::fourfold::SingularCubicFourfold;
use crate::linalg;
use crate::lines::Point;
use crate::modp::{uni, ModPoly};
use crate::poly::{self, Poly, PolyError};

pub const H_SQUARE: i64 = 6;
pub const DELTA_SQUARE: i64 = -2;
/// Degree of `delta` on the curve of nonreduced schemes at a fixed point.
pub const LAMBDA_DELTA: i64 = -1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is empty or not square")]
    Shape,
    #[error("lattice rank {0} exceeds the search limit of 4")]
    RankTooLarge(usize),
    #[error("the system of curve pairings is singular")]
    SingularSystem,
    #[error("non-generic curve data, reseed: {0}")]
    NonGeneric(String),
    #[error("invalid curve data: {0}")]
    BadCurve(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `a h + b delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NSClass {
    pub a: i64,
    pub b: i64,
}

impl NSClass {
    pub const H: NSClass = NSClass { a: 1, b: 0 };
    pub const DELTA: NSClass = NSClass { a: 0, b: 1 };

    pub fn new(a: i64, b: i64) -> Self {
        NSClass { a, b }
    }

    pub fn pairing(&self, other: &NSClass) -> i64 {
        H_SQUARE * self.a * other.a + DELTA_SQUARE * self.b * other.b
    }

    pub fn square(&self) -> i64 {
        self.pairing(self)
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b) == 1
    }
}

impl fmt::Display for NSClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}h {} {}delta", self.a, if self.b < 0 { '-' } else { '+' }, self.b.abs())
    }
}

/// Primitive generator of the orthogonal complement of `c`, with positive
/// `h`-coefficient (positive `delta`-coefficient when that vanishes).
pub fn orthogonal_ray(c: NSClass) -> NSClass {
    assert!(c != NSClass::new(0, 0), "orthogonal_ray of the zero class");
    // <(x, y), (a, b)> = 6 a x - 2 b y
    let (mut x, mut y) = (-DELTA_SQUARE * c.b, H_SQUARE * c.a);
    let g = x.gcd(&y);
    x /= g;
    y /= g;
    if x < 0 || (x == 0 && y < 0) {
        x = -x;
        y = -y;
    }
    NSClass::new(x, y)
}

/// Intersection numbers of the two test curves with `Psi`, `h`, `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionTable {
    pub gamma_psi: i64,
    pub gamma_h: i64,
    pub gamma_delta: i64,
    pub lambda_psi: i64,
    pub lambda_h: i64,
    pub lambda_delta: i64,
}

impl IntersectionTable {
    pub fn from_array(v: [i64; 6]) -> Self {
        IntersectionTable {
            gamma_psi: v[0],
            gamma_h: v[1],
            gamma_delta: v[2],
            lambda_psi: v[3],
            lambda_h: v[4],
            lambda_delta: v[5],
        }
    }

    fn rows(&self) -> [[i64; 3]; 2] {
        [[self.gamma_h, self.gamma_delta, self.gamma_psi], [self.lambda_h, self.lambda_delta, self.lambda_psi]]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorSolution {
    /// The integral class, when the solution is integral.
    pub class: Option<NSClass>,
    /// `(a, b)` as exact rationals.
    pub rational: [String; 2],
    pub integral: bool,
    /// Every supplied row is satisfied by the solution.
    pub consistent: bool,
    /// Rows (table, curve) violated by the solution.
    pub violations: Vec<String>,
}

/// Solves `a (C.h) + b (C.delta) = C.D` from the first table and checks the
/// remaining rows of all tables against the solution.
pub fn solve_divisor_class(tables: &[IntersectionTable]) -> Result<DivisorSolution, LatticeError> {
    let first = tables.first().ok_or(LatticeError::SingularSystem)?.rows();
    let [[p, q, r], [s, t, u]] = first;
    let det = p * t - q * s;
    if det == 0 {
        return Err(LatticeError::SingularSystem);
    }
    let big = |n: i64| BigRational::from_integer(BigInt::from(n));
    let a = big(r * t - q * u) / big(det);
    let b = big(p * u - r * s) / big(det);
    let mut violations = Vec::new();
    for (i, tab) in tables.iter().enumerate() {
        for (row, name) in tab.rows().iter().zip(["gamma", "lambda"]) {
            let lhs = &a * big(row[0]) + &b * big(row[1]);
            if lhs != big(row[2]) {
                violations.push(format!("table {i}, {name}: {} != {}", lhs, row[2]));
            }
        }
    }
    let integral = a.is_integer() && b.is_integer();
    let class = integral.then(|| NSClass::new(a.to_integer().to_i64().unwrap(), b.to_integer().to_i64().unwrap()));
    Ok(DivisorSolution {
        class,
        rational: [a.to_string(), b.to_string()],
        integral,
        consistent: violations.is_empty(),
        violations,
    })
}

/// A symmetric integral Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralLattice {
    pub gram: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub null: usize,
}

impl IntegralLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Shape);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        Ok(IntegralLattice { gram })
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let gram = (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect();
        IntegralLattice { gram }
    }

    /// The hyperbolic plane scaled by `m`.
    pub fn hyperbolic(m: i64) -> Self {
        IntegralLattice { gram: vec![vec![0, m], vec![m, 0]] }
    }

    /// The root lattice `A_2` scaled by `m`.
    pub fn a2(m: i64) -> Self {
        IntegralLattice { gram: vec![vec![2 * m, -m], vec![-m, 2 * m]] }
    }

    pub fn direct_sum(&self, other: &IntegralLattice) -> Self {
        let (n, m) = (self.rank(), other.rank());
        let mut gram = vec![vec![0; n + m]; n + m];
        for i in 0..n {
            gram[i][..n].copy_from_slice(&self.gram[i]);
        }
        for i in 0..m {
            gram[n + i][n..].copy_from_slice(&other.gram[i]);
        }
        IntegralLattice { gram }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    fn rational(&self) -> Vec<Vec<BigRational>> {
        self.gram.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect()
    }

    pub fn determinant(&self) -> BigInt {
        let m: linalg::Matrix =
            self.gram.iter().map(|r| r.iter().map(|&x| FieldElement::from_int(x)).collect()).collect();
        let d = linalg::determinant(&m);
        d.as_rational().expect("rational entries").to_integer()
    }

    /// Signature by symmetric Gaussian elimination over `Q`.
    pub fn signature(&self) -> Signature {
        let mut a = self.rational();
        let n = a.len();
        let mut sig = Signature { positive: 0, negative: 0, null: 0 };
        for k in 0..n {
            if a[k][k].is_zero() {
                if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                    swap_sym(&mut a, k, i);
                } else if let Some((i, j)) =
                    (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
                {
                    // e_i + e_j has norm 2 a_ij != 0 because both diagonals vanish
                    add_sym(&mut a, i, j);
                    swap_sym(&mut a, k, i);
                } else {
                    sig.null += n - k;
                    break;
                }
            }
            let piv = a[k][k].clone();
            if piv.is_positive() {
                sig.positive += 1;
            } else {
                sig.negative += 1;
            }
            for r in k + 1..n {
                let f = &a[r][k] / &piv;
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let t = &f * &a[k][c];
                    a[r][c] -= t;
                }
                for c in k..n {
                    let t = &f * &a[c][k];
                    a[c][r] -= t;
                }
            }
        }
        sig
    }

    pub fn pairing(&self, u: &[i64], v: &[i64]) -> i64 {
        let n = self.rank();
        (0..n).map(|i| (0..n).map(|j| u[i] * self.gram[i][j] * v[j]).sum::<i64>()).sum()
    }
}

fn swap_sym(a: &mut [Vec<BigRational>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Replaces basis vector `i` by `e_i + e_j`.
fn add_sym(a: &mut [Vec<BigRational>], i: usize, j: usize) {
    let n = a.len();
    let rj = a[j].clone();
    for (c, x) in rj.iter().enumerate() {
        a[i][c] += x;
    }
    for r in 0..n {
        let x = a[r][j].clone();
        a[r][i] += x;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IsometryOutcome {
    /// `M^T G1 M = G2`.
    Certificate {
        matrix: Vec<Vec<i64>>,
    },
    /// Invariants differ; no search was run.
    Obstruction {
        reason: String,
    },
    NotFoundWithinBound {
        bound: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsometryReport {
    pub determinants: [String; 2],
    pub signatures: [Signature; 2],
    pub outcome: IsometryOutcome,
}

/// Searches integral `M` with entries in `[-bound, bound]` and
/// `M^T G1 M = G2`, after comparing rank, determinant and signature.
pub fn lattice_isometric(
    l1: &IntegralLattice,
    l2: &IntegralLattice,
    bound: i64,
) -> Result<IsometryReport, LatticeError> {
    let n = l1.rank();
    if n > 4 || l2.rank() > 4 {
        return Err(LatticeError::RankTooLarge(n.max(l2.rank())));
    }
    let (d1, d2) = (l1.determinant(), l2.determinant());
    let (s1, s2) = (l1.signature(), l2.signature());
    let report =
        |outcome| IsometryReport { determinants: [d1.to_string(), d2.to_string()], signatures: [s1, s2], outcome };
    let obstruction = if n != l2.rank() {
        Some(format!("ranks differ: {n} vs {}", l2.rank()))
    } else if s1 != s2 {
        Some(format!(
            "signatures differ: ({}, {}, {}) vs ({}, {}, {})",
            s1.positive, s1.negative, s1.null, s2.positive, s2.negative, s2.null
        ))
    } else if d1 != d2 {
        Some(format!("determinants differ: {d1} vs {d2}"))
    } else if d1.is_zero() {
        Some("degenerate lattices".to_string())
    } else {
        None
    };
    if let Some(reason) = obstruction {
        return Ok(report(IsometryOutcome::Obstruction { reason }));
    }
    let box_vectors: Vec<Vec<i64>> = {
        let side = (2 * bound + 1) as usize;
        (0..side.pow(n as u32))
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let d = (k % side) as i64 - bound;
                        k /= side;
                        d
                    })
                    .collect()
            })
            .collect()
    };
    let candidates: Vec<Vec<&Vec<i64>>> =
        (0..n).map(|j| box_vectors.iter().filter(|v| l1.pairing(v, v) == l2.gram[j][j]).collect()).collect();
    let mut cols: Vec<&Vec<i64>> = Vec::with_capacity(n);
    fn search<'a>(
        l1: &IntegralLattice,
        g2: &[Vec<i64>],
        cand: &[Vec<&'a Vec<i64>>],
        cols: &mut Vec<&'a Vec<i64>>,
    ) -> bool {
        let j = cols.len();
        if j == cand.len() {
            return true;
        }
        for v in &cand[j] {
            if (0..j).all(|i| l1.pairing(cols[i], v) == g2[i][j]) {
                cols.push(v);
                if search(l1, g2, cand, cols) {
                    return true;
                }
                cols.pop();
            }
        }
        false
    }
    if search(l1, &l2.gram, &candidates, &mut cols) {
        let matrix = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        return Ok(report(IsometryOutcome::Certificate { matrix }));
    }
    Ok(report(IsometryOutcome::NotFoundWithinBound { bound }))
}

/// `M^T G1 M`.
pub fn transform_gram(g1: &[Vec<i64>], m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = g1.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| m[r][i] * g1[r][c] * m[c][j]).sum()
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// counting

/// A zero-dimensional projective locus: the zeros of a binary form, or the
/// common zeros of two ternary forms.
#[derive(Clone, Debug)]
pub enum ZeroDimSystem {
    Binary(Poly),
    Ternary(Poly, Poly),
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultantCount {
    /// The eliminant as a binary form.
    pub eliminant: Poly,
    /// Degree after setting the second variable to 1.
    pub affine_degree: usize,
    /// Multiplicity of the point at infinity.
    pub infinity_multiplicity: usize,
    pub total: usize,
    /// Integer coordinate change applied before eliminating (rows).
    pub coordinate_change: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCount {
    pub p: u64,
    /// `(multiplicity, degree)` of each squarefree part of the affine eliminant.
    pub squarefree_profile: Vec<(usize, usize)>,
    pub infinity_multiplicity: usize,
    pub total: usize,
    /// Distinct `F_p`-rational roots found by enumeration, including infinity.
    pub rational_roots: usize,
}

fn nonzero_z_leading(f: &Poly) -> FieldElement {
    let d = f.degree().unwrap_or(0) as u16;
    f.coeff(&[0, 0, d])
}

fn change_coordinates(f: &Poly, m: &[Vec<i64>]) -> Result<Poly, PolyError> {
    let images: Vec<Poly> =
        m.iter().map(|row| Poly::linear(&row.iter().map(|&c| FieldElement::from_int(c)).collect::<Vec<_>>())).collect();
    f.substitute(&images)
}

fn binary_profile(b: &Poly) -> (usize, usize) {
    let mut affine = 0;
    let mut inf = usize::MAX;
    for (e, _) in b.terms() {
        affine = affine.max(e[0] as usize);
        inf = inf.min(e[1] as usize);
    }
    (affine, inf)
}

/// Exact count with multiplicity by resultant elimination. Ternary systems
/// are first moved to coordinates where `(0:0:1)` lies on neither curve.
pub fn count_by_resultant(system: &ZeroDimSystem, seed: u64) -> Result<ResultantCount, LatticeError> {
    match system {
        ZeroDimSystem::Binary(b) => {
            if b.is_zero() {
                return Err(LatticeError::NonGeneric("binary form vanishes identically".into()));
            }
            let (affine, inf) = binary_profile(b);
            Ok(ResultantCount {
                eliminant: b.clone(),
                affine_degree: affine,
                infinity_multiplicity: inf,
                total: affine + inf,
                coordinate_change: None,
            })
        }
        ZeroDimSystem::Ternary(f, g) => {
            let m = generic_change(f, g, seed)?;
            let (f2, g2) = (change_coordinates(f, &m)?, change_coordinates(g, &m)?);
            let r = poly::resultant(&f2, &g2, 2)?;
            if r.is_zero() {
                return Err(LatticeError::NonGeneric("resultant vanishes identically".into()));
            }
            let eliminant = r.rename(2, &[0, 1, 0]);
            let (affine, inf) = binary_profile(&eliminant);
            let bezout = (f.degree().unwrap_or(0) * g.degree().unwrap_or(0)) as usize;
            if affine + inf != bezout || !eliminant.is_homogeneous() {
                return Err(LatticeError::Invariant(format!("eliminant {eliminant} is not a form of degree {bezout}")));
            }
            Ok(ResultantCount {
                eliminant,
                affine_degree: affine,
                infinity_multiplicity: inf,
                total: affine + inf,
                coordinate_change: Some(m),
            })
        }
    }
}

fn generic_change(f: &Poly, g: &Poly, seed: u64) -> Result<Vec<Vec<i64>>, LatticeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x006c_6174_7469_6365);
    let identity = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    for attempt in 0..64 {
        let m = if attempt == 0 {
            identity.clone()
        } else {
            (0..3).map(|_| (0..3).map(|_| rng.gen_range(-3..=3)).collect()).collect()
        };
        let det: linalg::Matrix =
            m.iter().map(|r: &Vec<i64>| r.iter().map(|&x| FieldElement::from_int(x)).collect()).collect();
        if linalg::determinant(&det).is_zero() {
            continue;
        }
        let (f2, g2) = (change_coordinates(f, &m)?, change_coordinates(g, &m)?);
        if !nonzero_z_leading(&f2).is_zero() && !nonzero_z_leading(&g2).is_zero() {
            return Ok(m);
        }
    }
    Err(LatticeError::NonGeneric("no coordinate change separates the projection centre".into()))
}

/// Evaluates `f(t, s, z)` as a polynomial in `z` of formal degree `d`.
fn z_coeffs(f: &ModPoly, t: u64, s: u64, d: usize) -> Vec<u64> {
    let p = f.p;
    let mut out = vec![0u64; d + 1];
    for (e, c) in &f.terms {
        let v = field::mul_mod(
            *c,
            field::mul_mod(field::pow_mod(t, e[0] as u64, p), field::pow_mod(s, e[1] as u64, p), p),
            p,
        );
        let k = e[2] as usize;
        out[k] = (out[k] + v) % p;
    }
    out
}

/// Independent count over `F_p`: the eliminant is sampled at every
/// element of `F_p`, interpolated from its first values, checked against
/// the remaining ones, and split into squarefree parts. `None` for primes
/// of bad reduction.
pub fn count_mod_p(
    system: &ZeroDimSystem,
    change: Option<&Vec<Vec<i64>>>,
    p: u64,
) -> Result<Option<PrimeCount>, LatticeError> {
    let (values, values_inf, bound): (Box<dyn Fn(u64) -> u64 + Sync>, Box<dyn Fn(u64) -> u64 + Sync>, usize) =
        match system {
            ZeroDimSystem::Binary(b) => {
                let Ok(bp) = ModPoly::reduce(b, p) else { return Ok(None) };
                let d = b.degree().unwrap_or(0) as usize;
                let bp2 = bp.clone();
                (Box::new(move |t| bp.eval(&[t, 1])), Box::new(move |u| bp2.eval(&[1, u])), d)
            }
            ZeroDimSystem::Ternary(f, g) => {
                let m =
                    change.ok_or_else(|| LatticeError::Invariant("ternary count needs a coordinate change".into()))?;
                let (f2, g2) = (change_coordinates(f, m)?, change_coordinates(g, m)?);
                let (Ok(fp), Ok(gp)) = (ModPoly::reduce(&f2, p), ModPoly::reduce(&g2, p)) else { return Ok(None) };
                let (df, dg) = (f.degree().unwrap_or(0) as usize, g.degree().unwrap_or(0) as usize);
                let lead = |h: &ModPoly, d: usize| z_coeffs(h, 0, 0, d)[d];
                if lead(&fp, df) == 0 || lead(&gp, dg) == 0 {
                    return Ok(None);
                }
                let (fp2, gp2) = (fp.clone(), gp.clone());
                (
                    Box::new(move |t| uni::resultant(&z_coeffs(&fp, t, 1, df), &z_coeffs(&gp, t, 1, dg), p)),
                    Box::new(move |u| uni::resultant(&z_coeffs(&fp2, 1, u, df), &z_coeffs(&gp2, 1, u, dg), p)),
                    df * dg,
                )
            }
        };
    if p <= bound as u64 + 1 {
        return Err(LatticeError::Invariant(format!("prime {p} too small for degree {bound}")));
    }
    let all: Vec<u64> = (0..p).map(&values).collect();
    let xs: Vec<u64> = (0..=bound as u64).collect();
    let r = uni::interpolate(&xs, &all[..=bound], p);
    if r.is_empty() {
        return Ok(None);
    }
    if let Some(t) = (0..p).find(|&t| uni::eval(&r, t, p) != all[t as usize]) {
        return Err(LatticeError::Invariant(format!("eliminant mod {p} exceeds degree {bound} (mismatch at {t})")));
    }
    let rinf = uni::interpolate(&xs, &xs.iter().map(|&u| values_inf(u)).collect::<Vec<_>>(), p);
    let infinity = rinf.iter().position(|&c| c != 0).unwrap_or(0);
    let parts = uni::squarefree_parts(&r, p);
    let profile: Vec<(usize, usize)> = parts.iter().map(|(i, a)| (*i, uni::degree(a).unwrap_or(0))).collect();
    let total = profile.iter().map(|(i, d)| i * d).sum::<usize>() + infinity;
    let rational_roots = all.iter().filter(|&&v| v == 0).count() + usize::from(infinity > 0);
    Ok(Some(PrimeCount { p, squarefree_profile: profile, infinity_multiplicity: infinity, total, rational_roots }))
}

// ---------------------------------------------------------------------------
// the two test curves

/// `Gamma`: schemes `{x, a}` with `a` moving on the hyperplane section
/// `C = Sigma ∩ {c = 0}`; `Lambda`: nonreduced schemes supported at `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "curve", rename_all = "snake_case")]
pub enum CurveSpec {
    Gamma { x: Point, hyperplane: Vec<FieldElement> },
    Lambda { x: Point },
}

impl CurveSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CurveSpec::Gamma { .. } => "gamma",
            CurveSpec::Lambda { .. } => "lambda",
        }
    }

    fn point(&self) -> &Point {
        match self {
            CurveSpec::Gamma { x, .. } | CurveSpec::Lambda { x } => x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisorKind {
    H,
    Delta,
    Psi,
}

impl DivisorKind {
    pub fn name(&self) -> &'static str {
        match self {
            DivisorKind::H => "h",
            DivisorKind::Delta => "delta",
            DivisorKind::Psi => "psi",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Resultant,
    /// The locus is empty because the support misses a hyperplane.
    EmptySupport,
    InputConstant,
}

/// Extra data for a count: the hyperplane representing `h`, the primes for
/// the finite-field oracle, and the seed for coordinate changes.
#[derive(Clone, Debug)]
pub struct CountContext {
    pub auxiliary: Vec<FieldElement>,
    pub primes: Vec<u64>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionCount {
    pub curve: &'static str,
    pub divisor: &'static str,
    pub value: i64,
    pub method: CountMethod,
    pub resultant: Option<ResultantCount>,
    pub finite_field: Vec<PrimeCount>,
    /// For `Psi`: the count of the condition list `h1 = q1 = k1 = 0`
    /// (resp. `h1 = h2 = q1 = 0`) in the frame with `x = e1`, `C = {x1 = 0}`.
    pub frame_conditions: Option<i64>,
    /// Resultant, finite-field and frame counts all agree.
    pub agree: bool,
}

fn linear_value(l: &[FieldElement], x: &[FieldElement]) -> FieldElement {
    field::dot(l, x)
}

fn e0_row() -> Vec<FieldElement> {
    field::int_vec(&[1, 0, 0, 0, 0, 0])
}

fn restrict(f: &Poly, basis: &[Point]) -> Result<Poly, PolyError> {
    let images: Vec<Poly> =
        (0..6).map(|i| Poly::linear(&basis.iter().map(|b| b[i].clone()).collect::<Vec<_>>())).collect();
    f.substitute(&images)
}

fn kernel_exact(rows: Vec<Vec<FieldElement>>, dim: usize, what: &str) -> Result<Vec<Point>, LatticeError> {
    let cols = rows[0].len();
    let ker = linalg::kernel(&rows, cols);
    if ker.len() != dim {
        return Err(LatticeError::NonGeneric(format!("{what}: expected a {dim}-dimensional space, got {}", ker.len())));
    }
    Ok(ker)
}

/// The frame of the counting argument: columns `e0, x` and a basis of
/// `{x0 = 0, c = 0}`, so that `x = e1` and `C = {x1 = 0}`.
fn counting_frame(y: &SingularCubicFourfold, x: &Point, c: &[FieldElement]) -> Result<(Poly, Poly), LatticeError> {
    let w = kernel_exact(vec![e0_row(), c.to_vec()], 4, "hyperplane section")?;
    let mut cols = vec![e0_row(), x.clone()];
    cols.extend(w);
    let images: Vec<Poly> =
        (0..6).map(|i| Poly::linear(&cols.iter().map(|b| b[i].clone()).collect::<Vec<_>>())).collect();
    Ok((y.q().substitute(&images)?, y.k().substitute(&images)?))
}

/// `h1, q1, h2, k1` of the frame forms as polynomials in `(a2, a3, a4, a5)`.
fn counting_pieces(q: &Poly, k: &Poly) -> [Poly; 4] {
    let a_block = |f: &Poly| f.rename(4, &[0, 0, 0, 1, 2, 3]);
    let at = |f: &Poly, e1: u16| a_block(&f.coeff_of(&[0, 1], &[0, e1]));
    [at(q, 1), at(q, 0), at(k, 2), at(k, 0)]
}

fn linear_coeffs(f: &Poly) -> Vec<FieldElement> {
    let n = f.nvars();
    (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            f.coeff(&e)
        })
        .collect()
}

fn restrict_a(f: &Poly, basis: &[Point]) -> Result<Poly, PolyError> {
    let images: Vec<Poly> =
        (0..4).map(|i| Poly::linear(&basis.iter().map(|b| b[i].clone()).collect::<Vec<_>>())).collect();
    f.substitute(&images)
}

fn psi_frame_system(y: &SingularCubicFourfold, curve: &CurveSpec) -> Result<ZeroDimSystem, LatticeError> {
    let x = curve.point();
    let (c, is_gamma) = match curve {
        CurveSpec::Gamma { hyperplane, .. } => (hyperplane.clone(), true),
        CurveSpec::Lambda { .. } => (default_complement(x), false),
    };
    let (q, k) = counting_frame(y, x, &c)?;
    let [h1, q1, h2, k1] = counting_pieces(&q, &k);
    if is_gamma {
        let ker = kernel_exact(vec![linear_coeffs(&h1)], 3, "h1 = 0")?;
        Ok(ZeroDimSystem::Ternary(restrict_a(&q1, &ker)?, restrict_a(&k1, &ker)?))
    } else {
        let ker = kernel_exact(vec![linear_coeffs(&h1), linear_coeffs(&h2)], 2, "h1 = h2 = 0")?;
        Ok(ZeroDimSystem::Binary(restrict_a(&q1, &ker)?))
    }
}

/// A coordinate hyperplane of `{x0 = 0}` missing `x`.
fn default_complement(x: &Point) -> Vec<FieldElement> {
    let i = (1..6).find(|&i| !x[i].is_zero()).expect("nonzero point of x0 = 0");
    let mut c = field::int_vec(&[0; 6]);
    c[i] = FieldElement::one();
    c
}

fn psi_trident_system(y: &SingularCubicFourfold, curve: &CurveSpec) -> Result<ZeroDimSystem, LatticeError> {
    let x = curve.point();
    let gq = y.q().gradient_at(x)?;
    match curve {
        CurveSpec::Gamma { hyperplane, .. } => {
            // a on C with the line xa inside the quadric
            let basis = kernel_exact(vec![e0_row(), hyperplane.clone(), gq], 3, "C ∩ T_x Q")?;
            Ok(ZeroDimSystem::Ternary(restrict(y.q(), &basis)?, restrict(y.k(), &basis)?))
        }
        CurveSpec::Lambda { .. } => {
            let gk = y.k().gradient_at(x)?;
            let basis = kernel_exact(vec![e0_row(), gq, gk, default_complement(x)], 2, "tangent directions")?;
            Ok(ZeroDimSystem::Binary(restrict(y.q(), &basis)?))
        }
    }
}

fn check_curve(y: &SingularCubicFourfold, curve: &CurveSpec, ctx: &CountContext) -> Result<(), LatticeError> {
    let x = curve.point();
    if !y.sigma_membership(x) {
        return Err(LatticeError::BadCurve("base point is not on the surface".into()));
    }
    let on = |l: &[FieldElement]| l.len() == 6 && l[0].is_zero() && linear_value(l, x).is_zero();
    if ctx.auxiliary.len() != 6 || !ctx.auxiliary[0].is_zero() || on(&ctx.auxiliary) {
        return Err(LatticeError::NonGeneric("auxiliary hyperplane must miss the base point".into()));
    }
    if let CurveSpec::Gamma { hyperplane, .. } = curve {
        if hyperplane.len() != 6 || !hyperplane[0].is_zero() || on(hyperplane) {
            return Err(LatticeError::NonGeneric("the section C must miss the base point".into()));
        }
        if linalg::rank(&vec![hyperplane.clone(), ctx.auxiliary.clone()]) != 2 {
            return Err(LatticeError::NonGeneric("C and the auxiliary hyperplane coincide".into()));
        }
    }
    Ok(())
}

fn counted(
    curve: &CurveSpec,
    divisor: DivisorKind,
    system: &ZeroDimSystem,
    ctx: &CountContext,
    frame: Option<&ZeroDimSystem>,
) -> Result<IntersectionCount, LatticeError> {
    let res = count_by_resultant(system, ctx.seed)?;
    let finite: Vec<Option<PrimeCount>> = ctx
        .primes
        .par_iter()
        .map(|&p| count_mod_p(system, res.coordinate_change.as_ref(), p))
        .collect::<Result<_, _>>()?;
    let finite: Vec<PrimeCount> = finite.into_iter().flatten().collect();
    let frame_conditions = frame.map(|s| count_by_resultant(s, ctx.seed).map(|r| r.total as i64)).transpose()?;
    let value = res.total as i64;
    let agree = !finite.is_empty()
        && finite.iter().all(|c| c.total as i64 == value)
        && frame_conditions.is_none_or(|f| f == value);
    Ok(IntersectionCount {
        curve: curve.name(),
        divisor: divisor.name(),
        value,
        method: CountMethod::Resultant,
        resultant: Some(res),
        finite_field: finite,
        frame_conditions,
        agree,
    })
}

fn trivial(curve: &CurveSpec, divisor: DivisorKind, value: i64, method: CountMethod) -> IntersectionCount {
    IntersectionCount {
        curve: curve.name(),
        divisor: divisor.name(),
        value,
        method,
        resultant: None,
        finite_field: Vec::new(),
        frame_conditions: None,
        agree: true,
    }
}

/// Intersection number of a test curve with `h`, `delta` or `Psi`, counted
/// from the explicit finite locus it reduces to.
pub fn count_curve_divisor_intersection(
    y: &SingularCubicFourfold,
    curve: &CurveSpec,
    divisor: DivisorKind,
    ctx: &CountContext,
) -> Result<IntersectionCount, LatticeError> {
    check_curve(y, curve, ctx)?;
    match (curve, divisor) {
        (CurveSpec::Gamma { hyperplane, .. }, DivisorKind::H) => {
            // points of C on a second hyperplane
            let basis = kernel_exact(vec![e0_row(), hyperplane.clone(), ctx.auxiliary.clone()], 3, "C ∩ H'")?;
            let sys = ZeroDimSystem::Ternary(restrict(y.q(), &basis)?, restrict(y.k(), &basis)?);
            counted(curve, divisor, &sys, ctx, None)
        }
        // a = x is impossible on C
        (CurveSpec::Gamma { .. }, DivisorKind::Delta) => Ok(trivial(curve, divisor, 0, CountMethod::EmptySupport)),
        (CurveSpec::Lambda { .. }, DivisorKind::H) => Ok(trivial(curve, divisor, 0, CountMethod::EmptySupport)),
        (CurveSpec::Lambda { .. }, DivisorKind::Delta) => {
            Ok(trivial(curve, divisor, LAMBDA_DELTA, CountMethod::InputConstant))
        }
        (_, DivisorKind::Psi) => {
            let sys = psi_trident_system(y, curve)?;
            let frame = psi_frame_system(y, curve)?;
            counted(curve, divisor, &sys, ctx, Some(&frame))
        }
    }
}

/// One seeded choice of base point, section `C` and auxiliary hyperplane.
#[derive(Clone, Debug, Serialize)]
pub struct CurveChoice {
    pub point_index: usize,
    pub x: Point,
    pub section: Vec<FieldElement>,
    pub auxiliary: Vec<FieldElement>,
}

fn random_hyperplane(rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    let mut v = vec![FieldElement::zero()];
    v.extend((0..5).map(|_| FieldElement::from_int(rng.gen_range(-3..=3))));
    v
}

pub fn curve_choices(points: &[Point], seed: u64, count: usize) -> Vec<CurveChoice> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let point_index = (seed as usize + 5 * i) % points.len();
            let x = points[point_index].clone();
            let draw = |rng: &mut ChaCha8Rng| loop {
                let h = random_hyperplane(rng);
                if !linear_value(&h, &x).is_zero() {
                    return h;
                }
            };
            let section = draw(&mut rng);
            let auxiliary = loop {
                let h = draw(&mut rng);
                if linalg::rank(&vec![h.clone(), section.clone()]) == 2 {
                    break h;
                }
            };
            CurveChoice { point_index, x, section, auxiliary }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveIntersections {
    pub choice: CurveChoice,
    pub counts: Vec<IntersectionCount>,
    pub table: IntersectionTable,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorReport {
    pub primes: Vec<u64>,
    pub curves: Vec<CurveIntersections>,
    pub solution: DivisorSolution,
    /// Rays orthogonal to `delta` and to the solved class.
    pub nef_rays: Vec<NSClass>,
    pub all_counts_agree: bool,
}

pub fn intersections_for(
    y: &SingularCubicFourfold,
    choice: &CurveChoice,
    primes: &[u64],
    seed: u64,
) -> Result<CurveIntersections, LatticeError> {
    let ctx = CountContext { auxiliary: choice.auxiliary.clone(), primes: primes.to_vec(), seed };
    let gamma = CurveSpec::Gamma { x: choice.x.clone(), hyperplane: choice.section.clone() };
    let lambda = CurveSpec::Lambda { x: choice.x.clone() };
    let mut counts = Vec::with_capacity(6);
    for curve in [&gamma, &lambda] {
        for d in [DivisorKind::Psi, DivisorKind::H, DivisorKind::Delta] {
            counts.push(count_curve_divisor_intersection(y, curve, d, &ctx)?);
        }
    }
    let table = IntersectionTable::from_array([0, 1, 2, 3, 4, 5].map(|i| counts[i].value));
    Ok(CurveIntersections { choice: choice.clone(), counts, table })
}

/// Counts on `curves` seeded choices, the solved class and the two rays.
pub fn divisor_suite(
    y: &SingularCubicFourfold,
    points: &[Point],
    seed: u64,
    curves: usize,
    primes: &[u64],
) -> Result<DivisorReport, LatticeError> {
    let results: Vec<CurveIntersections> = curve_choices(points, seed, curves)
        .iter()
        .map(|c| intersections_for(y, c, primes, seed))
        .collect::<Result<_, _>>()?;
    let tables: Vec<IntersectionTable> = results.iter().map(|r| r.table).collect();
    let solution = solve_divisor_class(&tables)?;
    let mut nef_rays = vec![orthogonal_ray(NSClass::DELTA)];
    if let Some(c) = solution.class {
        nef_rays.push(orthogonal_ray(c));
    }
    let all_counts_agree = results.iter().all(|r| r.counts.iter().all(|c| c.agree));
    Ok(DivisorReport { primes: primes.to_vec(), curves: results, solution, nef_rays, all_counts_agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourfold::Fixture;
    use proptest::prelude::*;

    fn load(id: &str) -> Fixture {
        let path = format!("{}/../../fixtures/{id}.json", env!("CARGO_MANIFEST_DIR"));
        Fixture::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn pairing_constants() {
        assert_eq!(NSClass::H.square(), 6);
        assert_eq!(NSClass::DELTA.square(), -2);
        assert_eq!(NSClass::H.pairing(&NSClass::DELTA), 0);
        let l = IntegralLattice::diagonal(&[H_SQUARE, DELTA_SQUARE]);
        assert_eq!(l.signature(), Signature { positive: 1, negative: 1, null: 0 });
    }

    #[test]
    fn rays() {
        assert_eq!(orthogonal_ray(NSClass::DELTA), NSClass::H);
        assert_eq!(orthogonal_ray(NSClass::new(1, -2)), NSClass::new(2, -3));
        assert_eq!(orthogonal_ray(NSClass::H), NSClass::DELTA);
    }

    #[test]
    fn class_solve() {
        let t = IntersectionTable::from_array([6, 6, 0, 2, 0, -1]);
        let s = solve_divisor_class(&[t]).unwrap();
        assert_eq!(s.class, Some(NSClass::new(1, -2)));
        assert!(s.consistent);
        let e = IntersectionTable::from_array([0, 6, 0, -2, 0, -1]);
        assert_eq!(solve_divisor_class(&[e]).unwrap().class, Some(NSClass::new(0, 2)));
        let bad = IntersectionTable::from_array([7, 6, 0, 2, 0, -1]);
        let s = solve_divisor_class(&[t, bad]).unwrap();
        assert!(!s.consistent);
        assert!(!solve_divisor_class(&[IntersectionTable::from_array([5, 6, 0, 2, 0, -1])]).unwrap().integral);
        let singular = IntersectionTable::from_array([6, 6, 0, 2, 0, 0]);
        assert_eq!(solve_divisor_class(&[singular]), Err(LatticeError::SingularSystem));
    }

    #[test]
    fn small_lattices() {
        let u3 = IntegralLattice::hyperbolic(3).direct_sum(&IntegralLattice::diagonal(&[-2]));
        let other = IntegralLattice::diagonal(&[6]).direct_sum(&IntegralLattice::a2(-1));
        assert_eq!(u3.determinant(), BigInt::from(18));
        assert_eq!(other.determinant(), BigInt::from(18));
        let rep = lattice_isometric(&u3, &other, 5).unwrap();
        let IsometryOutcome::Certificate { matrix } = &rep.outcome else { panic!("{rep:?}") };
        assert_eq!(transform_gram(&u3.gram, matrix), other.gram);
        let id = lattice_isometric(&u3, &u3, 1).unwrap();
        assert!(matches!(id.outcome, IsometryOutcome::Certificate { .. }));
        let obs = lattice_isometric(&IntegralLattice::diagonal(&[6]), &IntegralLattice::diagonal(&[-6]), 3).unwrap();
        let IsometryOutcome::Obstruction { reason } = obs.outcome else { panic!() };
        assert!(reason.contains("signature"));
    }

    #[test]
    fn counts_on_fixtures() {
        for id in ["FX-N1", "FX-C1"] {
            let fx = load(id);
            let primes = fx.fourfold.good_primes(1000, 3);
            let rep = divisor_suite(&fx.fourfold, &fx.points, 0, 2, &primes).unwrap();
            for c in &rep.curves {
                assert_eq!(c.table, IntersectionTable::from_array([6, 6, 0, 2, 0, -1]), "{id}");
                for n in &c.counts {
                    assert!(n.agree, "{id}: {n:?}");
                }
            }
            assert_eq!(rep.solution.class, Some(NSClass::new(1, -2)));
            assert_eq!(rep.nef_rays, vec![NSClass::H, NSClass::new(2, -3)]);
        }
    }

    #[test]
    fn positive_dimensional_locus_is_rejected() {
        let x = Poly::var(3, 0);
        let sys = ZeroDimSystem::Ternary(&x * &Poly::var(3, 1), &x * &Poly::var(3, 2));
        assert!(matches!(count_by_resultant(&sys, 0), Err(LatticeError::NonGeneric(_))));
    }

    proptest! {
        #[test]
        fn ray_is_orthogonal_and_primitive(a in -50i64..50, b in -50i64..50) {
            prop_assume!(a != 0 || b != 0);
            let c = NSClass::new(a, b);
            let r = orthogonal_ray(c);
            prop_assert_eq!(r.pairing(&c), 0);
            prop_assert!(r.is_primitive());
        }

        #[test]
        fn pairing_is_symmetric(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
            let (u, v) = (NSClass::new(a, b), NSClass::new(c, d));
            prop_assert_eq!(u.pairing(&v), v.pairing(&u));
        }
    }
}
