//! The residual-line map from length-two subschemes of the surface to lines
//! of the fourfold, its inverse, the trident test, and the conics and
//! quintic attached to a line of the surface in an adapted frame.

use serde::Serialize;
use thiserror::Error;

use crate::field::{self, FieldElement};
use crate::fourfold::SingularCubicFourfold;
use crate::linalg;
use crate::lines::{self, LengthTwoScheme, LineError, Point, ProjectiveLine};
use crate::localmodel::{lines_block, AdaptedFrame, FrameMode};
use crate::poly::{self, HomogeneousForm, Poly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanoError {
    #[error("invalid length-two scheme: {0}")]
    InvalidScheme(LineError),
    #[error("line is not contained in the fourfold")]
    NotInY,
    #[error("line passes through the singular point")]
    ThroughNode,
    #[error("cannot extract a square root of {0} in its field")]
    NoSquareRoot(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Line(#[from] LineError),
}

/// A plane, the restriction of `F` to it in the plane coordinates
/// `(t0, t1, t2)`, the known linear factors, and the quotient.
#[derive(Clone, Debug, Serialize)]
pub struct PlaneCubicFactorization {
    pub plane: [Point; 3],
    pub restricted_cubic: Poly,
    pub known_linear_factors: Vec<Poly>,
    pub residual: Poly,
}

impl PlaneCubicFactorization {
    /// `product of known factors * residual == restricted cubic`.
    pub fn verify(&self) -> bool {
        let mut prod = self.residual.clone();
        for f in &self.known_linear_factors {
            prod = &prod * f;
        }
        prod == self.restricted_cubic
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PhiOutcome {
    Line {
        line: ProjectiveLine,
    },
    /// The plane spanned by the singular point and the scheme lies in `Y`.
    PlaneInY {
        plane: [Point; 3],
    },
}

impl PhiOutcome {
    pub fn line(&self) -> Option<&ProjectiveLine> {
        match self {
            PhiOutcome::Line { line } => Some(line),
            PhiOutcome::PlaneInY { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PhiInverseOutcome {
    Scheme {
        scheme: LengthTwoScheme,
    },
    /// The plane through the singular point and the line lies in the cone
    /// over the quadric.
    PlaneInQhat,
}

fn node() -> Point {
    SingularCubicFourfold::singular_point()
}

fn plane_images(plane: &[Point; 3]) -> Vec<Poly> {
    (0..6).map(|i| Poly::linear(&[plane[0][i].clone(), plane[1][i].clone(), plane[2][i].clone()])).collect()
}

/// Restriction of `F` to the plane through the singular point and the
/// scheme, divided by the two known factors (`t1 t2` for two points, `t2^2`
/// for a point with a tangent). `None` when `F` vanishes on the plane.
pub fn plane_factorization(
    y: &SingularCubicFourfold,
    xi: &LengthTwoScheme,
) -> Result<Option<PlaneCubicFactorization>, FanoError> {
    xi.validate(y).map_err(FanoError::InvalidScheme)?;
    let (u, v) = match xi {
        LengthTwoScheme::Reduced(a, b) => (a, b),
        LengthTwoScheme::Nonreduced { point, tangent } => (point, tangent),
    };
    let plane = [node(), u.clone(), v.clone()];
    let cubic = y.equation().substitute(&plane_images(&plane))?;
    if cubic.is_zero() {
        return Ok(None);
    }
    let t1 = Poly::var(3, 1);
    let t2 = Poly::var(3, 2);
    let known = if xi.is_reduced() { vec![t1, t2] } else { vec![t2.clone(), t2] };
    let mut rest = cubic.clone();
    for f in &known {
        rest = rest
            .div_exact(f)
            .ok_or_else(|| FanoError::Invariant(format!("{f} does not divide the plane cubic {cubic}")))?;
    }
    let fact = PlaneCubicFactorization { plane, restricted_cubic: cubic, known_linear_factors: known, residual: rest };
    debug_assert!(fact.verify());
    Ok(Some(fact))
}

/// The residual line of the plane cubic through the singular point and
/// `xi`, or the plane itself when it lies in `Y`.
pub fn phi(y: &SingularCubicFourfold, xi: &LengthTwoScheme) -> Result<PhiOutcome, FanoError> {
    let Some(fact) = plane_factorization(y, xi)? else {
        let (u, v) = match xi {
            LengthTwoScheme::Reduced(a, b) => (a.clone(), b.clone()),
            LengthTwoScheme::Nonreduced { point, tangent } => (point.clone(), tangent.clone()),
        };
        return Ok(PhiOutcome::PlaneInY { plane: [node(), u, v] });
    };
    let coeffs: Vec<FieldElement> = (0..3)
        .map(|i| {
            let mut e = vec![0; 3];
            e[i] = 1;
            fact.residual.coeff(&e)
        })
        .collect();
    if fact.residual.degree() != Some(1) {
        return Err(FanoError::Invariant(format!("residual {} is not linear", fact.residual)));
    }
    let ker = linalg::kernel(&vec![coeffs], 3);
    let to_ambient = |t: &[FieldElement]| -> Point {
        (0..6)
            .map(|i| field::dot(t, &[fact.plane[0][i].clone(), fact.plane[1][i].clone(), fact.plane[2][i].clone()]))
            .collect()
    };
    let line = ProjectiveLine::from_span(&to_ambient(&ker[0]), &to_ambient(&ker[1]))?;
    if !lines::line_in_y(y, &line)? {
        return Err(FanoError::Invariant(format!("residual line {line} is not in Y")));
    }
    Ok(PhiOutcome::Line { line })
}

fn project_to_h0(x: &[FieldElement]) -> Point {
    let mut p = x.to_vec();
    p[0] = p[0].zero_like();
    p
}

/// Roots `(lambda : mu)` of `A l^2 + B l m + C m^2`, extending to
/// `Q(sqrt d)` for rational non-square discriminants.
fn binary_roots(a: &FieldElement, b: &FieldElement, c: &FieldElement) -> Result<Vec<[FieldElement; 2]>, FanoError> {
    let one = a.one_like();
    let zero = one.zero_like();
    if a.is_zero() {
        if b.is_zero() {
            return Ok(vec![[one.clone(), zero.clone()]]);
        }
        return Ok(vec![[one.clone(), zero.clone()], [c.clone(), -b]]);
    }
    let disc = &(b * b) - &(&a.int_like(4) * &(a * c));
    if disc.is_zero() {
        let r = &(-b) * &(&a.int_like(2) * a).inv().unwrap();
        return Ok(vec![[r, one]]);
    }
    let root = match disc.sqrt() {
        Some(r) => r,
        None => {
            let q = disc.as_rational().ok_or_else(|| FanoError::NoSquareRoot(disc.to_string()))?;
            let (m, d) = field::squarefree_decomposition(q).map_err(PolyError::from)?;
            FieldElement::quadratic_big(d, num::BigRational::from_integer(0.into()), m).map_err(PolyError::from)?
        }
    };
    let inv2a = (&a.int_like(2) * a).inv().unwrap();
    let r1 = &(&(-b) + &root) * &inv2a;
    let r2 = &(&(-b) - &root) * &inv2a;
    Ok(vec![[r1, one.clone()], [r2, one]])
}

/// The length-two scheme cut on the surface by the plane through the
/// singular point and `line`.
pub fn phi_inverse(y: &SingularCubicFourfold, line: &ProjectiveLine) -> Result<PhiInverseOutcome, FanoError> {
    if line.contains_point(&node()) {
        return Err(FanoError::ThroughNode);
    }
    if !lines::line_in_y(y, line)? {
        return Err(FanoError::NotInY);
    }
    let [a, b] = line.span();
    let (pa, pb) = (project_to_h0(a), project_to_h0(b));
    let image = ProjectiveLine::from_span(&pa, &pb)?;
    let binary = image.restrict(y.q())?;
    if binary.is_zero() {
        return Ok(PhiInverseOutcome::PlaneInQhat);
    }
    let c = |e: [u16; 2]| binary.coeff(&e);
    let roots = binary_roots(&c([2, 0]), &c([1, 1]), &c([0, 2]))?;
    let point = |r: &[FieldElement; 2]| -> Point { image.point(&r[0], &r[1]) };
    let scheme = match roots.as_slice() {
        [r] => {
            let x = point(r);
            let tangent = [&image.span()[0], &image.span()[1]]
                .into_iter()
                .find(|v| !field::proportional(v, &x))
                .expect("image line has two independent points")
                .clone();
            LengthTwoScheme::Nonreduced { point: x, tangent }
        }
        [r1, r2] => LengthTwoScheme::Reduced(point(r1), point(r2)),
        _ => unreachable!(),
    };
    Ok(PhiInverseOutcome::Scheme { scheme: scheme.canonical() })
}

/// Whether the plane through the singular point and `xi` meets `Y` in
/// three lines through the singular point: the line spanned by `xi` lies in
/// the quadric.
pub fn trident_membership(y: &SingularCubicFourfold, xi: &LengthTwoScheme) -> Result<bool, FanoError> {
    xi.validate(y).map_err(FanoError::InvalidScheme)?;
    Ok(xi.spanned_line()?.restrict(y.q())?.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FibreType {
    NonsingularConic,
    /// Two distinct lines through `vertex`, spanned with the points
    /// `line_points` (possibly over a quadratic extension).
    TwoLines {
        vertex: Point,
        line_points: [Point; 2],
        discriminant: FieldElement,
    },
}

/// The fibre over a line of the surface: the curve `{h1 = q1 = 0}` of
/// `P^3` in the coordinates `(a2 : a3 : a4 : a5)`.
#[derive(Clone, Debug, Serialize)]
pub struct FibreConic {
    pub h1: Poly,
    pub q1: Poly,
    pub classification: FibreType,
    /// Point of the fibre whose plane meets `Y` in a triple line.
    pub tritangent: Option<Point>,
}

pub fn fibre_conic(frame: &AdaptedFrame) -> Result<FibreConic, FanoError> {
    let d = &frame.decomposition;
    let h1 = lines_block(&d.h1);
    let q1 = lines_block(&d.q1);
    let coeffs: Vec<FieldElement> = (0..4)
        .map(|i| {
            let mut e = vec![0; 4];
            e[i] = 1;
            h1.coeff(&e)
        })
        .collect();
    let ker = linalg::kernel(&vec![coeffs], 4);
    let restricted = HomogeneousForm::in_coordinates(q1.clone())?.restrict_to_subspace(&ker)?;
    let rank = restricted.quadratic_rank()?;
    let cuspidal = frame.mode != FrameMode::Nodal;
    let classification = match (cuspidal, rank) {
        (false, 3) => FibreType::NonsingularConic,
        (true, 2) => {
            let g = poly::gram_matrix(restricted.poly());
            let kv = linalg::kernel(&g, 3).remove(0);
            let vertex = field::normalize_projective(&linalg::mat_vec(&linalg::transpose(&ker), &kv)).unwrap();
            if vertex != field::int_vec(&[0, 0, 0, 1]) {
                return Err(FanoError::Invariant(format!("fibre lines meet at {vertex:?}, not at (0:0:0:1)")));
            }
            // q1 on {h1 = 0} is a binary form in the two directions other than the vertex
            let others: Vec<Point> = (0..3)
                .map(|i| {
                    let mut e = field::int_vec(&[0; 3]);
                    e[i] = FieldElement::one();
                    e
                })
                .filter(|e| linalg::rank(&vec![kv.clone(), e.clone()]) == 2)
                .take(2)
                .collect();
            let basis: Vec<Point> = others.iter().map(|e| linalg::mat_vec(&linalg::transpose(&ker), e)).collect();
            let binary = HomogeneousForm::in_coordinates(q1.clone())?.restrict_to_subspace(&basis)?;
            let bp = binary.poly();
            let (a, b, c) = (bp.coeff(&[2, 0]), bp.coeff(&[1, 1]), bp.coeff(&[0, 2]));
            let discriminant = &(&b * &b) - &(&a.int_like(4) * &(&a * &c));
            if discriminant.is_zero() {
                return Err(FanoError::Invariant("fibre lines coincide".into()));
            }
            let roots = binary_roots(&a, &b, &c)?;
            let pt = |r: &[FieldElement; 2]| -> Point {
                let v = field::add_vec(&field::scale_vec(&r[0], &basis[0]), &field::scale_vec(&r[1], &basis[1]));
                field::normalize_projective(&v).unwrap()
            };
            FibreType::TwoLines { vertex, line_points: [pt(&roots[0]), pt(&roots[1])], discriminant }
        }
        _ => {
            return Err(FanoError::Invariant(format!("q1 restricted to ker h1 has rank {rank}: {}", restricted.poly())))
        }
    };
    let tritangent = match frame.mode {
        FrameMode::CuspidalCompatible => Some(field::int_vec(&[0, 0, 0, 1])),
        _ => None,
    };
    Ok(FibreConic { h1, q1, classification, tritangent })
}

/// `h1(a) t0 t1 + q1(a) t0 t2 + h2(a) t1^2 + q2(a) t1 t2 + k1(a) t2^2`, with
/// `k1` including the `a5^3` term in the cuspidal case.
pub fn residual_conic(frame: &AdaptedFrame, a: &[FieldElement]) -> Result<Poly, FanoError> {
    let d = &frame.decomposition;
    let k1 = d.full_k1();
    let at = |f: &Poly| lines_block(f).eval(a);
    let c = [at(&d.h1)?, at(&d.q1)?, at(&d.h2)?, at(&d.q2)?, at(&k1)?];
    let exps: [[u16; 3]; 5] = [[1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]];
    Ok(Poly::from_terms(3, exps.iter().zip(c).map(|(e, x)| (e.to_vec(), x))))
}

/// Restriction of the frame equation to the plane through `e0`, `e1` and
/// `(0, 0, a)`, in the coordinates `(t0, t1, t2)`.
pub fn plane_restriction(frame: &AdaptedFrame, a: &[FieldElement]) -> Result<Poly, FanoError> {
    let like = a.iter().find(|x| !x.is_zero()).map(|x| x.zero_like()).unwrap_or_else(FieldElement::zero);
    let mut p2 = vec![like.clone(), like.clone()];
    p2.extend(a.iter().cloned());
    let mut e0 = vec![like.clone(); 6];
    e0[0] = like.one_like();
    let mut e1 = vec![like.clone(); 6];
    e1[1] = like.one_like();
    Ok(frame.equation().substitute(&plane_images(&[e0, e1, p2]))?)
}

/// `F|_{P_a} == t2 * C_a`.
pub fn residual_conic_identity(frame: &AdaptedFrame, a: &[FieldElement]) -> Result<bool, FanoError> {
    let lhs = plane_restriction(frame, a)?;
    let rhs = &Poly::var(3, 2) * &residual_conic(frame, a)?;
    Ok(lhs == rhs)
}

/// Whether all three lines of `F|_{P_a}` pass through the singular point,
/// i.e. the restriction has no `t0` terms.
pub fn plane_is_trident(frame: &AdaptedFrame, a: &[FieldElement]) -> Result<bool, FanoError> {
    let f = plane_restriction(frame, a)?;
    Ok(!f.is_zero() && !f.involves(0))
}

/// `det [[0, h1, q1], [h1, 2 h2, q2], [q1, q2, 2 k1]]` as a quintic form in
/// `(a2, a3, a4, a5)`.
pub fn togliatti_quintic(frame: &AdaptedFrame) -> Result<HomogeneousForm, FanoError> {
    let d = &frame.decomposition;
    let two = FieldElement::from_int(2);
    let b = |f: &Poly| lines_block(f);
    let h1 = b(&d.h1);
    let q1 = b(&d.q1);
    let m = vec![
        vec![Poly::zero(4), h1.clone(), q1.clone()],
        vec![h1, b(&d.h2).scale(&two), b(&d.q2)],
        vec![q1, b(&d.q2), b(&d.full_k1()).scale(&two)],
    ];
    let det = poly::poly_determinant(&m);
    let names = ["a2", "a3", "a4", "a5"].iter().map(|s| s.to_string()).collect();
    Ok(HomogeneousForm::new(names, det)?)
}

/// Seeded exact points of `{h1 = q1 = 0}`: fix `(a3, a4)` on a small grid
/// and solve for `a5`, in `Q(sqrt d)` when necessary. Assumes the nodal
/// normalization `h1 = a2`.
pub fn fibre_points(frame: &AdaptedFrame, count: usize) -> Result<Vec<Point>, FanoError> {
    let q1 = lines_block(&frame.decomposition.q1);
    if lines_block(&frame.decomposition.h1) != Poly::var(4, 0) {
        return Err(FanoError::Invariant("frame is not normalized".into()));
    }
    let mut out = Vec::new();
    let grid = (1i64..).flat_map(|r| (-r..=r).flat_map(move |i| [(i, r), (r, i)]));
    for (s, t) in grid.take(200) {
        if out.len() >= count {
            break;
        }
        let a3 = FieldElement::from_int(s);
        let a4 = FieldElement::from_int(t);
        let z = FieldElement::zero();
        let one = FieldElement::one();
        // q1(0, a3, a4, w) = A w^2 + B w + C
        let at = |w: &FieldElement| q1.eval(&[z.clone(), a3.clone(), a4.clone(), w.clone()]);
        let c0 = at(&z)?;
        let c1 = at(&one)?;
        let cm = at(&-&one)?;
        let two_inv = FieldElement::from_ratio(1, 2);
        let aa = &(&(&c1 + &cm) - &(&c0 + &c0)) * &two_inv;
        let bb = &(&c1 - &cm) * &two_inv;
        if aa.is_zero() {
            continue;
        }
        for [lam, mu] in binary_roots(&aa, &bb, &c0)? {
            let w = &lam * &mu.inv().unwrap();
            let p = vec![z.clone(), a3.clone(), a4.clone(), w];
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.truncate(count);
    Ok(out)
}

/// Seeded length-two schemes on the fixture's known surface points:
/// `reduced` pairs followed by `nonreduced` tangent schemes.
pub fn sample_schemes(
    y: &SingularCubicFourfold,
    points: &[Point],
    seed: u64,
    reduced: usize,
    nonreduced: usize,
) -> Result<Vec<LengthTwoScheme>, FanoError> {
    let mut out = Vec::with_capacity(reduced + nonreduced);
    for i in 0..reduced + nonreduced {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        out.push(lines::random_length_two(y, points, s, i < reduced).map_err(FanoError::InvalidScheme)?);
    }
    Ok(out)
}

/// The two lines of the quadric through `x` inside the tangent plane of the
/// surface meet the cubic once more each; the two residual points are
/// conjugate over `Q(sqrt d)` when the lines are. `None` when the tangent
/// plane lies in the quadric or a residual point collapses to `x`.
pub fn conjugate_points(y: &SingularCubicFourfold, x: &[FieldElement]) -> Result<Option<[Point; 2]>, FanoError> {
    if !y.sigma_membership(x) {
        return Err(FanoError::InvalidScheme(LineError::NotOnSigma));
    }
    let dirs = lines::tangent_directions(y, x)?;
    let [v1, v2] = [&dirs[0], &dirs[1]];
    let a = y.q().eval(v1)?;
    let c = y.q().eval(v2)?;
    let bl = poly::bilinear_value(y.q(), v1, v2);
    let b = &bl + &bl;
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Ok(None);
    }
    let roots = binary_roots(&a, &b, &c)?;
    if roots.len() != 2 {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(2);
    for [l, m] in &roots {
        let v = field::add_vec(&field::scale_vec(l, v1), &field::scale_vec(m, v2));
        // k(mu x + lambda v) = lambda^2 (c2 mu + c3 lambda)
        let images: Vec<Poly> = (0..6).map(|i| Poly::linear(&[x[i].clone(), v[i].clone()])).collect();
        let cubic = y.k().substitute(&images)?;
        let (c2, c3) = (cubic.coeff(&[1, 2]), cubic.coeff(&[0, 3]));
        if c2.is_zero() {
            return Ok(None);
        }
        let p = field::sub_vec(&field::scale_vec(&c3, x), &field::scale_vec(&c2, &v));
        let p = field::normalize_projective(&p).expect("nonzero residual point");
        if !y.sigma_membership(&p) {
            return Err(FanoError::Invariant("residual point is not on the surface".into()));
        }
        out.push(p);
    }
    Ok(Some([out[0].clone(), out[1].clone()]))
}

/// Length-two schemes over quadratic fields built from [`conjugate_points`]
/// at the fixture's rational points: conjugate pairs, mixed pairs with a
/// rational point, and tangent schemes at irrational points.
pub fn quadratic_samples(
    y: &SingularCubicFourfold,
    points: &[Point],
    count: usize,
) -> Result<Vec<LengthTwoScheme>, FanoError> {
    let mut out = Vec::with_capacity(count);
    for (i, x) in points.iter().enumerate() {
        let Some([a, b]) = conjugate_points(y, x)? else { continue };
        let other = &points[(i + 1) % points.len()];
        out.push(LengthTwoScheme::Reduced(a.clone(), b.clone()));
        out.push(LengthTwoScheme::Reduced(a.clone(), other.clone()));
        let t = lines::tangent_directions(y, &a)?;
        out.push(LengthTwoScheme::Nonreduced { point: a.clone(), tangent: t[(i % 2).min(t.len() - 1)].clone() });
        if out.len() >= count {
            break;
        }
    }
    out.truncate(count);
    Ok(out.into_iter().map(|s| s.canonical()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourfold::Fixture;
    use crate::localmodel::adapt_frame;

    fn load(id: &str) -> Fixture {
        let path = format!("{}/../../fixtures/{id}.json", env!("CARGO_MANIFEST_DIR"));
        Fixture::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn roundtrip_small_sample() {
        for id in ["FX-N1", "FX-C1"] {
            let fx = load(id);
            for xi in sample_schemes(&fx.fourfold, &fx.points, 7, 6, 4).unwrap() {
                let out = phi(&fx.fourfold, &xi).unwrap();
                let line = out.line().expect("no plane through the node");
                assert!(lines::line_in_y(&fx.fourfold, line).unwrap());
                let through = line.contains_point(&node());
                assert_eq!(through, trident_membership(&fx.fourfold, &xi).unwrap());
                if !through {
                    let back = phi_inverse(&fx.fourfold, line).unwrap();
                    assert_eq!(back, PhiInverseOutcome::Scheme { scheme: xi.canonical() });
                }
            }
        }
    }

    #[test]
    fn quadratic_field_roundtrip() {
        let fx = load("FX-N1");
        let samples = quadratic_samples(&fx.fourfold, &fx.points, 6).unwrap();
        assert_eq!(samples.len(), 6);
        assert!(samples.iter().any(|s| matches!(s, LengthTwoScheme::Reduced(a, _) if a.iter().any(|c| matches!(c.tag(), field::FieldTag::Quadratic(_))))));
        for xi in samples {
            let line = phi(&fx.fourfold, &xi).unwrap().line().unwrap().clone();
            assert_eq!(phi_inverse(&fx.fourfold, &line).unwrap(), PhiInverseOutcome::Scheme { scheme: xi.canonical() });
        }
    }

    #[test]
    fn designed_plane_is_detected() {
        for id in ["FX-N2", "FX-C2"] {
            let fx = load(id);
            let [a, b] = fx.line.clone().unwrap();
            let out = phi(&fx.fourfold, &LengthTwoScheme::Reduced(a, b)).unwrap();
            assert!(matches!(out, PhiOutcome::PlaneInY { .. }));
        }
    }

    #[test]
    fn irrational_splitting_extends_the_field() {
        let one = FieldElement::one();
        let roots = binary_roots(&one, &FieldElement::zero(), &FieldElement::from_int(-2)).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0][0].conjugate(), roots[1][0]);
        assert_eq!(&roots[0][0] * &roots[0][0], FieldElement::from_int(2));
    }

    #[test]
    fn fibre_conics_by_kind() {
        let n1 = load("FX-N1");
        let fr = adapt_frame(&n1.fourfold, &n1.points[0]).unwrap();
        let fc = fibre_conic(&fr).unwrap();
        assert_eq!(fc.classification, FibreType::NonsingularConic);
        let c1 = load("FX-C1");
        let fr = adapt_frame(&c1.fourfold, &c1.points[0]).unwrap();
        let fc = fibre_conic(&fr).unwrap();
        assert!(matches!(fc.classification, FibreType::TwoLines { .. }));
        let e5 = field::int_vec(&[0, 0, 0, 1]);
        assert_eq!(residual_conic(&fr, &e5).unwrap(), Poly::var(3, 2).pow(2));
        assert!(residual_conic_identity(&fr, &field::int_vec(&[1, -2, 3, 1])).unwrap());
    }

    #[test]
    fn togliatti_vanishes_to_second_order_on_fibre() {
        let n1 = load("FX-N1");
        let fr = adapt_frame(&n1.fourfold, &n1.points[3]).unwrap();
        let t = togliatti_quintic(&fr).unwrap();
        assert_eq!(t.degree(), 5);
        let pts = fibre_points(&fr, 4).unwrap();
        assert_eq!(pts.len(), 4);
        for a in &pts {
            assert!(t.eval(a).unwrap().is_zero());
            assert!(t.gradient(a).unwrap().iter().all(FieldElement::is_zero));
            assert!(plane_is_trident(&fr, a).unwrap());
        }
    }
}
