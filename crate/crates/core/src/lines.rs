//! Lines in `P^5`, Plücker coordinates, the affine chart of the Grassmannian
//! around a line through the singular point, and length-two subschemes of
//! the surface of lines through that point.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::{self, FieldElement};
use crate::fourfold::SingularCubicFourfold;
use crate::linalg;
use crate::poly::{AdaptedDecomposition, Poly, PolyError};

pub type Point = Vec<FieldElement>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("points are proportional or zero")]
    Proportional,
    #[error("expected points with {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("point is not on the surface of lines through the singular point")]
    NotOnSigma,
    #[error("tangent vector is not in the tangent space of the surface")]
    NotTangent,
    #[error("no rational points available")]
    NoPoints,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A line of `P^n` stored as the reduced row echelon form of a spanning
/// pair, so equal lines compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveLine {
    span: [Point; 2],
    plucker: Vec<FieldElement>,
}

impl ProjectiveLine {
    pub fn from_span(a: &[FieldElement], b: &[FieldElement]) -> Result<Self, LineError> {
        if a.len() != b.len() {
            return Err(LineError::Arity { expected: a.len(), got: b.len() });
        }
        let mut m = vec![a.to_vec(), b.to_vec()];
        let pivots = linalg::rref(&mut m);
        if pivots.len() != 2 {
            return Err(LineError::Proportional);
        }
        let span = [m[0].clone(), m[1].clone()];
        let plucker = plucker_vector(&span[0], &span[1]);
        Ok(ProjectiveLine { span, plucker })
    }

    pub fn span(&self) -> &[Point; 2] {
        &self.span
    }

    pub fn dim(&self) -> usize {
        self.span[0].len()
    }

    /// `p_ij`, `i < j`, in lexicographic order of `(i, j)`.
    pub fn plucker(&self) -> &[FieldElement] {
        &self.plucker
    }

    pub fn contains_point(&self, x: &[FieldElement]) -> bool {
        let m = vec![self.span[0].clone(), self.span[1].clone(), x.to_vec()];
        linalg::rank(&m) == 2
    }

    /// Linear images `x = lambda a + mu b` in the two variables
    /// `(lambda, mu)`.
    pub fn parametrization(&self) -> Vec<Poly> {
        let [a, b] = &self.span;
        a.iter().zip(b).map(|(x, y)| Poly::linear(&[x.clone(), y.clone()])).collect()
    }

    /// Pullback of `f` to the line, a binary form.
    pub fn restrict(&self, f: &Poly) -> Result<Poly, PolyError> {
        f.substitute(&self.parametrization())
    }

    /// Image under the linear map `x -> m x`.
    pub fn transform(&self, m: &linalg::Matrix) -> Result<Self, LineError> {
        let a = linalg::mat_vec(m, &self.span[0]);
        let b = linalg::mat_vec(m, &self.span[1]);
        Self::from_span(&a, &b)
    }

    /// The point `lambda a + mu b`.
    pub fn point(&self, lambda: &FieldElement, mu: &FieldElement) -> Point {
        field::add_vec(&field::scale_vec(lambda, &self.span[0]), &field::scale_vec(mu, &self.span[1]))
    }
}

impl fmt::Display for ProjectiveLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &Point| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "[[{}], [{}]]", row(&self.span[0]), row(&self.span[1]))
    }
}

impl Serialize for ProjectiveLine {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.span[0])?;
        seq.serialize_element(&self.span[1])?;
        seq.end()
    }
}

pub fn plucker_vector(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let n = a.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(&(&a[i] * &b[j]) - &(&a[j] * &b[i]));
        }
    }
    out
}

fn plucker_index(n: usize, i: usize, j: usize) -> usize {
    // offset of row i in the upper triangle
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Values of the three-term Grassmann-Plücker relations
/// `p_ij p_kl - p_ik p_jl + p_il p_jk` for `i < j < k < l`.
pub fn plucker_relations(p: &[FieldElement], n: usize) -> Vec<FieldElement> {
    let at = |i: usize, j: usize| &p[plucker_index(n, i, j)];
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let v = &(&(at(i, j) * at(k, l)) - &(at(i, k) * at(j, l))) + &(at(i, l) * at(j, k));
                    out.push(v);
                }
            }
        }
    }
    out
}

pub fn plucker_of_span(a: &[FieldElement], b: &[FieldElement]) -> Result<ProjectiveLine, LineError> {
    ProjectiveLine::from_span(a, b)
}

/// Whether `F` vanishes identically on the line.
pub fn line_in_y(y: &SingularCubicFourfold, line: &ProjectiveLine) -> Result<bool, LineError> {
    Ok(line.restrict(&y.equation())?.is_zero())
}

/// Variables of the affine chart: `p0 = (p02, .., p05)` are indices 0..4,
/// `p1 = (p12, .., p15)` are indices 4..8.
pub const CHART_VARS: usize = 8;

/// A point of the affine chart around `x2 = ... = x5 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerChart {
    pub p0: Vec<FieldElement>,
    pub p1: Vec<FieldElement>,
}

impl PluckerChart {
    pub fn new(p0: Vec<FieldElement>, p1: Vec<FieldElement>) -> Self {
        assert_eq!((p0.len(), p1.len()), (4, 4), "chart vectors have four entries");
        PluckerChart { p0, p1 }
    }

    pub fn origin() -> Self {
        Self::new(field::int_vec(&[0; 4]), field::int_vec(&[0; 4]))
    }

    /// Chart coordinates as one 8-vector `(p0, p1)`.
    pub fn coords(&self) -> Vec<FieldElement> {
        self.p0.iter().chain(&self.p1).cloned().collect()
    }

    /// The line through `(1 : 0 : -p1)` and `(0 : 1 : p0)`.
    pub fn line(&self) -> ProjectiveLine {
        let like = self.p0[0].zero_like();
        let mut a = vec![like.one_like(), like.clone()];
        a.extend(self.p1.iter().map(|x| -x));
        let mut b = vec![like.clone(), like.one_like()];
        b.extend(self.p0.iter().cloned());
        ProjectiveLine::from_span(&a, &b).expect("chart points are independent")
    }

    /// Inverse of [`PluckerChart::line`] when the line meets the chart.
    pub fn from_line(line: &ProjectiveLine) -> Option<Self> {
        let [a, b] = line.span();
        // canonical RREF with pivots in columns 0 and 1 is exactly the chart
        if a[0].is_one() && a[1].is_zero() && b[0].is_zero() && b[1].is_one() {
            let p1 = a[2..].iter().map(|x| -x).collect();
            let p0 = b[2..].to_vec();
            Some(Self::new(p0, p1))
        } else {
            None
        }
    }
}

/// Which coefficient of `lambda^i mu^(3-i)` an equation extracts.
pub const CHART_EQUATION_NAMES: [&str; 4] = ["psi30", "psi03", "psi21", "psi12"];

/// Restriction of `F` to the chart line, with the four coefficients of
/// `lambda^3, mu^3, lambda^2 mu, lambda mu^2` returned as polynomials in the
/// eight chart variables.
pub fn chart_equations_direct(f: &Poly) -> Result<[Poly; 4], PolyError> {
    // ring: lambda, mu, p0 (4), p1 (4)
    let n = 10;
    let lam = Poly::var(n, 0);
    let mu = Poly::var(n, 1);
    let mut images = vec![lam.clone(), mu.clone()];
    for i in 0..4 {
        let p0i = Poly::var(n, 2 + i);
        let p1i = Poly::var(n, 6 + i);
        images.push(&(&mu * &p0i) - &(&lam * &p1i));
    }
    let g = f.substitute(&images)?;
    let drop: Vec<usize> = (0..n).map(|i| i.saturating_sub(2)).collect();
    let pick = |u: u16, v: u16| -> Poly {
        let c = g.coeff_of(&[0, 1], &[u, v]);
        // remaining variables are indices 2..10; shift them down
        let mut out = Poly::zero(CHART_VARS);
        for (e, x) in c.terms() {
            let mut f = vec![0; CHART_VARS];
            for (i, &k) in e.iter().enumerate().skip(2) {
                f[drop[i]] = k;
            }
            out = &out + &Poly::monomial(CHART_VARS, f, x.clone());
        }
        out
    };
    Ok([pick(3, 0), pick(0, 3), pick(2, 1), pick(1, 2)])
}

/// Embeds a form in `x2..x5` (six-variable ring) into the chart ring,
/// reading `x_{2+i}` as chart variable `offset + i`.
pub(crate) fn to_chart_block(f: &Poly, offset: usize) -> Poly {
    let mut map = vec![0; 6];
    for i in 0..4 {
        map[2 + i] = offset + i;
    }
    debug_assert!(!f.involves(0) && !f.involves(1));
    f.rename(CHART_VARS, &map)
}

/// Bidegree pieces of `k1(-lambda p1 + mu p0)`, coefficient of
/// `lambda^u mu^v` as a polynomial in the chart variables.
pub fn k1_bidegree(k1: &Poly, u: u16, v: u16) -> Result<Poly, PolyError> {
    let n = 2 + CHART_VARS;
    let lam = Poly::var(n, 0);
    let mu = Poly::var(n, 1);
    let zero = Poly::zero(n);
    let mut images = vec![zero.clone(), zero];
    for i in 0..4 {
        images.push(&(&mu * &Poly::var(n, 2 + i)) - &(&lam * &Poly::var(n, 6 + i)));
    }
    let g = k1.substitute(&images)?;
    let c = g.coeff_of(&[0, 1], &[u, v]);
    let map: Vec<usize> = (0..n).map(|i| i.saturating_sub(2)).collect();
    Ok(c.rename(CHART_VARS, &map))
}

/// Bilinear form of a quadratic `q` on `x2..x5`, as a polynomial in the
/// chart variables `b(p_first, p_second)`.
pub fn chart_bilinear(q: &Poly, first: usize, second: usize) -> Poly {
    let qa = to_chart_block(q, 0);
    let g = crate::poly::gram_matrix(&qa);
    let mut out = Poly::zero(CHART_VARS);
    for i in 0..4 {
        for j in 0..4 {
            let c = &g[i][j];
            if c.is_zero() {
                continue;
            }
            let t = &Poly::var(CHART_VARS, first + i) * &Poly::var(CHART_VARS, second + j);
            out = &out + &t.scale(c);
        }
    }
    out
}

/// The four chart equations assembled from the pieces of the adapted
/// decomposition. Signs follow direct restriction of `F`.
pub fn chart_equations(d: &AdaptedDecomposition) -> Result<[Poly; 4], PolyError> {
    let k1 = d.full_k1();
    let at0 = |f: &Poly| to_chart_block(f, 0);
    let at1 = |f: &Poly| to_chart_block(f, 4);
    let psi30 = &at1(&d.q1) - &at1(&k1);
    let psi03 = &(&at0(&d.h2) + &at0(&d.q2)) + &at0(&k1);
    let b1 = chart_bilinear(&d.q1, 4, 0);
    let b2 = chart_bilinear(&d.q2, 4, 0);
    let two = FieldElement::from_int(2);
    let psi21 = -at1(&d.h1) - b1.scale(&two) + at1(&d.q2) + k1_bidegree(&k1, 2, 1)?;
    let psi12 = at0(&d.h1) - at1(&d.h2) + at0(&d.q1) - b2.scale(&two) + k1_bidegree(&k1, 1, 2)?;
    Ok([psi30, psi03, psi21, psi12])
}

/// Length-two subscheme of the surface: two points, or a point with a
/// tangent direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LengthTwoScheme {
    Reduced(Point, Point),
    Nonreduced { point: Point, tangent: Point },
}

fn normalized(v: &[FieldElement]) -> Point {
    field::normalize_projective(v).expect("nonzero point")
}

impl LengthTwoScheme {
    /// Canonical representative: points scaled so the first nonzero entry
    /// is 1, reduced pairs sorted, tangent reduced modulo the point.
    pub fn canonical(&self) -> Self {
        match self {
            LengthTwoScheme::Reduced(a, b) => {
                let (a, b) = (normalized(a), normalized(b));
                if cmp_points(&a, &b).is_le() {
                    LengthTwoScheme::Reduced(a, b)
                } else {
                    LengthTwoScheme::Reduced(b, a)
                }
            }
            LengthTwoScheme::Nonreduced { point, tangent } => {
                let x = normalized(point);
                let piv = x.iter().position(|c| !c.is_zero()).unwrap();
                let t = field::sub_vec(tangent, &field::scale_vec(&tangent[piv], &x));
                LengthTwoScheme::Nonreduced { point: x, tangent: normalized(&t) }
            }
        }
    }

    /// The line of `P^5` spanned by the scheme.
    pub fn spanned_line(&self) -> Result<ProjectiveLine, LineError> {
        match self {
            LengthTwoScheme::Reduced(a, b) => ProjectiveLine::from_span(a, b),
            LengthTwoScheme::Nonreduced { point, tangent } => ProjectiveLine::from_span(point, tangent),
        }
    }

    pub fn validate(&self, y: &SingularCubicFourfold) -> Result<(), LineError> {
        match self {
            LengthTwoScheme::Reduced(a, b) => {
                for p in [a, b] {
                    if p.len() != 6 {
                        return Err(LineError::Arity { expected: 6, got: p.len() });
                    }
                    if !y.sigma_membership(p) {
                        return Err(LineError::NotOnSigma);
                    }
                }
                if field::proportional(a, b) {
                    return Err(LineError::Proportional);
                }
            }
            LengthTwoScheme::Nonreduced { point, tangent } => {
                if point.len() != 6 || tangent.len() != 6 {
                    return Err(LineError::Arity { expected: 6, got: point.len().min(tangent.len()) });
                }
                if !y.sigma_membership(point) {
                    return Err(LineError::NotOnSigma);
                }
                if !tangent[0].is_zero() || field::proportional(point, tangent) || field::is_zero_vec(tangent) {
                    return Err(LineError::NotTangent);
                }
                let gq = y.q().gradient_at(point)?;
                let gk = y.k().gradient_at(point)?;
                if !field::dot(&gq, tangent).is_zero() || !field::dot(&gk, tangent).is_zero() {
                    return Err(LineError::NotTangent);
                }
            }
        }
        Ok(())
    }

    pub fn is_reduced(&self) -> bool {
        matches!(self, LengthTwoScheme::Reduced(..))
    }

    /// Applies `f` to every point and tangent vector.
    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> Self {
        match self {
            LengthTwoScheme::Reduced(a, b) => LengthTwoScheme::Reduced(f(a), f(b)),
            LengthTwoScheme::Nonreduced { point, tangent } => {
                LengthTwoScheme::Nonreduced { point: f(point), tangent: f(tangent) }
            }
        }
    }
}

impl Serialize for LengthTwoScheme {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(tag = "variant", rename_all = "snake_case")]
        enum Repr<'a> {
            Reduced { points: [&'a Point; 2] },
            Nonreduced { point: &'a Point, tangent: &'a Point },
        }
        match self {
            LengthTwoScheme::Reduced(a, b) => Repr::Reduced { points: [a, b] }.serialize(s),
            LengthTwoScheme::Nonreduced { point, tangent } => Repr::Nonreduced { point, tangent }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for LengthTwoScheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
        enum Repr {
            Reduced { points: [Point; 2] },
            Nonreduced { point: Point, tangent: Point },
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Reduced { points: [a, b] } => LengthTwoScheme::Reduced(a, b),
            Repr::Nonreduced { point, tangent } => LengthTwoScheme::Nonreduced { point, tangent },
        })
    }
}

pub fn cmp_points(a: &[FieldElement], b: &[FieldElement]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.canonical_cmp(y);
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Tangent directions at `x` to the surface: vectors `v` in `{x0 = 0}` with
/// `grad q(x) . v = grad k(x) . v = 0`, modulo `x`.
pub fn tangent_directions(y: &SingularCubicFourfold, x: &[FieldElement]) -> Result<Vec<Point>, LineError> {
    let gq = y.q().gradient_at(x)?;
    let gk = y.k().gradient_at(x)?;
    let like = x.iter().find(|c| !c.is_zero()).map(|c| c.zero_like()).unwrap_or_else(FieldElement::zero);
    let mut e0 = vec![like.clone(); 6];
    e0[0] = like.one_like();
    let ker = linalg::kernel(&vec![gq, gk, e0], 6);
    // drop the direction of x itself
    let mut out: Vec<Point> = Vec::new();
    for v in ker {
        let mut trial = vec![x.to_vec()];
        trial.extend(out.iter().cloned());
        trial.push(v.clone());
        if linalg::rank(&trial) == trial.len() {
            out.push(v);
        }
    }
    Ok(out)
}

/// A seeded length-two scheme on the fixture's known points.
pub fn random_length_two(
    y: &SingularCubicFourfold,
    points: &[Point],
    seed: u64,
    reduced: bool,
) -> Result<LengthTwoScheme, LineError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    if reduced {
        if points.len() < 2 {
            return Err(LineError::NoPoints);
        }
        let i = rng.gen_range(0..points.len());
        let mut j = rng.gen_range(0..points.len() - 1);
        if j >= i {
            j += 1;
        }
        let xi = LengthTwoScheme::Reduced(points[i].clone(), points[j].clone());
        xi.validate(y)?;
        Ok(xi)
    } else {
        if points.is_empty() {
            return Err(LineError::NoPoints);
        }
        let x = &points[rng.gen_range(0..points.len())];
        let dirs = tangent_directions(y, x)?;
        loop {
            let c: Vec<FieldElement> = dirs.iter().map(|_| FieldElement::from_int(rng.gen_range(-4..=4))).collect();
            let mut v = vec![x[0].zero_like(); 6];
            for (ci, d) in c.iter().zip(&dirs) {
                v = field::add_vec(&v, &field::scale_vec(ci, d));
            }
            if !field::is_zero_vec(&v) && !field::proportional(&v, x) {
                let xi = LengthTwoScheme::Nonreduced { point: x.clone(), tangent: v };
                xi.validate(y)?;
                return Ok(xi);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int_vec;
    use proptest::prelude::*;

    #[test]
    fn plucker_of_coordinate_points() {
        let l = plucker_of_span(&int_vec(&[1, 0, 0, 0, 0, 0]), &int_vec(&[0, 1, 0, 0, 0, 0])).unwrap();
        let mut expect = vec![FieldElement::zero(); 15];
        expect[0] = FieldElement::one();
        assert_eq!(l.plucker(), expect.as_slice());
        let a = int_vec(&[1, 2, 0, 1, 0, 3]);
        let b = int_vec(&[0, 1, 1, 0, 2, 0]);
        let l1 = plucker_of_span(&a, &b).unwrap();
        let l2 = plucker_of_span(&b, &a).unwrap();
        assert_eq!(l1, l2);
        let raw = plucker_vector(&a, &b);
        let swapped = plucker_vector(&b, &a);
        assert!(raw.iter().zip(&swapped).all(|(x, y)| x == &-y));
        assert!(plucker_of_span(&a, &field::scale_vec(&FieldElement::from_int(3), &a)).is_err());
    }

    #[test]
    fn chart_roundtrip() {
        let c = PluckerChart::new(int_vec(&[1, 2, 3, 4]), int_vec(&[0, -1, 5, 2]));
        let l = c.line();
        assert_eq!(PluckerChart::from_line(&l), Some(c));
        assert_eq!(PluckerChart::origin().line().span()[1], int_vec(&[0, 1, 0, 0, 0, 0]));
    }

    #[test]
    fn canonical_scheme_ordering() {
        let a = int_vec(&[0, 2, 0, 2, 0, 0]);
        let b = int_vec(&[0, 0, 1, 0, 0, 0]);
        let x = LengthTwoScheme::Reduced(a.clone(), b.clone()).canonical();
        let y = LengthTwoScheme::Reduced(b, a).canonical();
        assert_eq!(x, y);
        let n1 =
            LengthTwoScheme::Nonreduced { point: int_vec(&[0, 1, 0, 0, 0, 0]), tangent: int_vec(&[0, 3, 2, 0, 0, 0]) };
        let n2 =
            LengthTwoScheme::Nonreduced { point: int_vec(&[0, 2, 0, 0, 0, 0]), tangent: int_vec(&[0, 0, 1, 0, 0, 0]) };
        assert_eq!(n1.canonical(), n2.canonical());
    }

    fn arb_point() -> impl Strategy<Value = Vec<FieldElement>> {
        prop::collection::vec(-6i64..=6, 6).prop_map(|v| int_vec(&v))
    }

    proptest! {
        #[test]
        fn plucker_relations_vanish(a in arb_point(), b in arb_point()) {
            let p = plucker_vector(&a, &b);
            prop_assert!(plucker_relations(&p, 6).iter().all(FieldElement::is_zero));
        }

        #[test]
        fn plucker_invariant_under_row_ops(a in arb_point(), b in arb_point(), c in -4i64..=4) {
            prop_assume!(linalg::rank(&vec![a.clone(), b.clone()]) == 2);
            let b2 = field::add_vec(&b, &field::scale_vec(&FieldElement::from_int(c), &a));
            let l1 = ProjectiveLine::from_span(&a, &b).unwrap();
            let l2 = ProjectiveLine::from_span(&a, &b2).unwrap();
            prop_assert_eq!(l1, l2);
            prop_assert!(field::proportional(&plucker_vector(&a, &b), &plucker_vector(&a, &b2)));
        }
    }
}
