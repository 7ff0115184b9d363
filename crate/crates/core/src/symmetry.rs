//! The order-three covering automorphism of a cyclic cuspidal fourfold and
//! its induced actions on points, the surface, lines, length-two schemes
//! and the blowup chart.

use serde::Serialize;
use thiserror::Error;

use crate::fanomaps::{self, FanoError, PhiOutcome};
use crate::field::{self, FieldElement, FieldTag};
use crate::fourfold::{Check, FourfoldKind, SingularCubicFourfold};
use crate::linalg;
use crate::lines::{self, LengthTwoScheme, LineError, PluckerChart, Point, ProjectiveLine, CHART_VARS};
use crate::localmodel::{self, AdaptedFrame, LocalError, BLOWUP_P15};
use crate::poly::{Poly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("field {0} does not contain the chosen cube root of unity")]
    FieldLacksZeta3(String),
    #[error("{0} is not a primitive cube root of unity")]
    NotPrimitive(String),
    #[error("the fourfold is not cyclic cuspidal")]
    NotCuspidal,
    #[error("object does not live at level {0:?}")]
    LevelMismatch(Level),
    #[error("frame does not commute with scaling x5")]
    FrameNotCompatible,
    #[error(transparent)]
    Line(#[from] LineError),
    #[error(transparent)]
    Fano(#[from] FanoError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    AmbientP5,
    SigmaSurface,
    Grassmannian,
    Hilb2,
    BlowupChart,
}

/// Scaling of `x5` by a primitive cube root of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicAction {
    zeta: FieldElement,
}

impl CyclicAction {
    pub fn new(zeta: FieldElement) -> Result<Self, SymmetryError> {
        if zeta.is_one() || !zeta.pow(3).is_one() {
            return Err(SymmetryError::NotPrimitive(zeta.to_string()));
        }
        Ok(CyclicAction { zeta })
    }

    /// The action over `Q(zeta3)`.
    pub fn rational() -> Self {
        CyclicAction { zeta: FieldElement::zeta3() }
    }

    /// The action over `F_p`, `p = 1 mod 3`, with the smallest nontrivial
    /// cube root of unity.
    pub fn mod_p(p: u64) -> Result<Self, SymmetryError> {
        let root = field::cube_roots_of_unity_mod(p).into_iter().find(|&r| r != 1);
        let Some(r) = root else {
            return Err(SymmetryError::FieldLacksZeta3(format!("F_{p}")));
        };
        Self::new(FieldElement::prime(p, r as i64).expect("prime modulus"))
    }

    pub fn zeta(&self) -> &FieldElement {
        &self.zeta
    }

    /// The action `zeta -> zeta^2`.
    pub fn inverse(&self) -> CyclicAction {
        CyclicAction { zeta: self.zeta.pow(2) }
    }

    /// `iota^k` on a point.
    pub fn act_point_times(&self, x: &[FieldElement], k: u32) -> Result<Point, SymmetryError> {
        let mut y = field::normalize_projective(x).expect("nonzero point");
        for _ in 0..k % 3 {
            y = self.act_point(&y)?;
        }
        Ok(y)
    }

    fn accepts(&self, x: &FieldElement) -> bool {
        match (self.zeta.tag(), x.tag()) {
            (FieldTag::Zeta3, FieldTag::Rational | FieldTag::Zeta3) => true,
            (FieldTag::Prime(p), FieldTag::Prime(q)) => p == q,
            _ => false,
        }
    }

    fn check(&self, v: &[FieldElement]) -> Result<(), SymmetryError> {
        match v.iter().find(|x| !self.accepts(x)) {
            Some(x) => Err(SymmetryError::FieldLacksZeta3(x.tag().to_string())),
            None => Ok(()),
        }
    }

    /// `iota`: `x5 -> zeta x5` on `P^5`; the result is normalized.
    pub fn act_point(&self, x: &[FieldElement]) -> Result<Point, SymmetryError> {
        self.check(x)?;
        let mut y = x.to_vec();
        y[5] = &self.zeta * &y[5];
        Ok(field::normalize_projective(&y).expect("nonzero point"))
    }

    /// `tau` on points of the surface in `{x0 = 0}`.
    pub fn act_surface(&self, y: &SingularCubicFourfold, x: &[FieldElement]) -> Result<Point, SymmetryError> {
        if !y.sigma_membership(x) {
            return Err(SymmetryError::Line(LineError::NotOnSigma));
        }
        self.act_point(x)
    }

    /// `sigma` on lines.
    pub fn act_line(&self, line: &ProjectiveLine) -> Result<ProjectiveLine, SymmetryError> {
        let [a, b] = line.span();
        Ok(ProjectiveLine::from_span(&self.act_point(a)?, &self.act_point(b)?)?)
    }

    /// `tau^[2]` on length-two schemes.
    pub fn act_scheme(&self, xi: &LengthTwoScheme) -> Result<LengthTwoScheme, SymmetryError> {
        match xi {
            LengthTwoScheme::Reduced(a, b) => self.check(a).and(self.check(b))?,
            LengthTwoScheme::Nonreduced { point, tangent } => self.check(point).and(self.check(tangent))?,
        }
        let z = self.zeta.clone();
        Ok(xi
            .map_points(|v| {
                let mut w = v.clone();
                w[5] = &z * &w[5];
                w
            })
            .canonical())
    }

    /// `p_{j,5} -> zeta p_{j,5}` on the chart of an `x5`-compatible frame.
    pub fn act_chart(&self, c: &PluckerChart) -> Result<PluckerChart, SymmetryError> {
        self.check(&c.coords())?;
        let mut d = c.clone();
        d.p0[3] = &self.zeta * &d.p0[3];
        d.p1[3] = &self.zeta * &d.p1[3];
        Ok(d)
    }

    /// The chart action as a substitution of the eight chart variables.
    pub fn chart_substitution(&self) -> Vec<Poly> {
        (0..CHART_VARS)
            .map(|i| {
                let v = Poly::var(CHART_VARS, i);
                if i == 3 || i == 7 {
                    v.scale(&self.zeta)
                } else {
                    v
                }
            })
            .collect()
    }

    /// The blowup-chart action induced by `a5 -> zeta a5`: `p05` and `p15`
    /// scale by `zeta`, the ratios `a~_i = a_i / a5` by `zeta^2`.
    pub fn blowup_substitution(&self) -> Vec<Poly> {
        let z2 = self.zeta.pow(2);
        (0..CHART_VARS)
            .map(|i| {
                let v = Poly::var(CHART_VARS, i);
                match i {
                    3 | BLOWUP_P15 => v.scale(&self.zeta),
                    4..=6 => v.scale(&z2),
                    _ => v,
                }
            })
            .collect()
    }

    pub fn act_blowup_point(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>, SymmetryError> {
        self.check(b)?;
        let sub = self.blowup_substitution();
        Ok(sub.iter().map(|f| f.eval(b)).collect::<Result<_, _>>()?)
    }

    /// `a5 -> zeta a5` on `(a2, a3, a4, a5)`.
    pub fn a_substitution(&self) -> Vec<Poly> {
        (0..4).map(|i| if i == 3 { Poly::var(4, 3).scale(&self.zeta) } else { Poly::var(4, i) }).collect()
    }

    /// `x5 -> zeta x5` on the ambient ring.
    pub fn ambient_substitution(&self) -> Vec<Poly> {
        (0..6).map(|i| if i == 5 { Poly::var(6, 5).scale(&self.zeta) } else { Poly::var(6, i) }).collect()
    }
}

/// An object at one of the levels, for uniform order checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelObject {
    Point(Point),
    Line(ProjectiveLine),
    Scheme(LengthTwoScheme),
    Chart(PluckerChart),
    Blowup(Vec<FieldElement>),
}

pub fn act(
    action: &CyclicAction,
    y: &SingularCubicFourfold,
    level: Level,
    obj: &LevelObject,
) -> Result<LevelObject, SymmetryError> {
    Ok(match (level, obj) {
        (Level::AmbientP5, LevelObject::Point(x)) => LevelObject::Point(action.act_point(x)?),
        (Level::SigmaSurface, LevelObject::Point(x)) => LevelObject::Point(action.act_surface(y, x)?),
        (Level::Grassmannian, LevelObject::Line(l)) => LevelObject::Line(action.act_line(l)?),
        (Level::Hilb2, LevelObject::Scheme(s)) => LevelObject::Scheme(action.act_scheme(s)?),
        (Level::BlowupChart, LevelObject::Chart(c)) => LevelObject::Chart(action.act_chart(c)?),
        (Level::BlowupChart, LevelObject::Blowup(b)) => LevelObject::Blowup(action.act_blowup_point(b)?),
        _ => return Err(SymmetryError::LevelMismatch(level)),
    })
}

fn normalize_object(obj: &LevelObject) -> LevelObject {
    match obj {
        LevelObject::Point(x) => LevelObject::Point(field::normalize_projective(x).expect("nonzero")),
        LevelObject::Scheme(s) => LevelObject::Scheme(s.canonical()),
        other => other.clone(),
    }
}

/// Size of the orbit of `obj`: 1 for fixed objects, 3 otherwise; `None`
/// when the third power is not the identity.
pub fn orbit_size(
    action: &CyclicAction,
    y: &SingularCubicFourfold,
    level: Level,
    obj: &LevelObject,
) -> Result<Option<usize>, SymmetryError> {
    let start = normalize_object(obj);
    let once = act(action, y, level, &start)?;
    let twice = act(action, y, level, &once)?;
    let thrice = act(action, y, level, &twice)?;
    if thrice != start {
        return Ok(None);
    }
    Ok(Some(if once == start { 1 } else { 3 }))
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub checks: Vec<Check>,
    pub samples: usize,
    pub failures: Vec<String>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

fn require_cuspidal(y: &SingularCubicFourfold) -> Result<(), SymmetryError> {
    if y.kind() != FourfoldKind::CuspidalCyclic {
        return Err(SymmetryError::NotCuspidal);
    }
    Ok(())
}

/// `Q(zeta3)` samples: pairs and tangent schemes built from the orbits of
/// the rational points. The first samples are fixed by the action when the
/// fixture has two rational points with `x5 = 0`.
pub fn zeta_samples(
    y: &SingularCubicFourfold,
    points: &[Point],
    count: usize,
    seed: u64,
) -> Result<Vec<LengthTwoScheme>, SymmetryError> {
    let act = CyclicAction::rational();
    let orbit = |x: &Point, k: u32| act.act_point_times(x, k);
    let mut out = Vec::with_capacity(count);
    let fixed: Vec<&Point> = points.iter().filter(|p| p[5].is_zero()).collect();
    if fixed.len() >= 2 {
        out.push(LengthTwoScheme::Reduced(fixed[0].clone(), fixed[1].clone()).canonical());
    }
    // a fixed point with a tangent that is not fixed
    if let Some(x) = fixed.first() {
        let dirs = lines::tangent_directions(y, x)?;
        if let Some(t) = dirs.iter().find(|v| !v[5].is_zero()) {
            out.push(LengthTwoScheme::Nonreduced { point: (*x).clone(), tangent: t.clone() }.canonical());
        }
    }
    let base = fanomaps::sample_schemes(y, points, seed, count, count / 3 + 1)?;
    let mut k = 0u32;
    for xi in base {
        if out.len() >= count {
            break;
        }
        k += 1;
        let s = match &xi {
            LengthTwoScheme::Reduced(a, b) => LengthTwoScheme::Reduced(orbit(a, k % 3)?, orbit(b, (k / 3 + 1) % 3)?),
            LengthTwoScheme::Nonreduced { .. } if k.is_multiple_of(2) => act.act_scheme(&xi)?,
            LengthTwoScheme::Nonreduced { .. } => act.inverse().act_scheme(&xi)?,
        };
        if s.validate(y).is_ok() {
            out.push(s.canonical());
        }
    }
    Ok(out)
}

/// `phi(tau^[2] xi) = sigma(phi(xi))` on `samples` schemes over `Q(zeta3)`.
pub fn check_equivariance_phi(
    y: &SingularCubicFourfold,
    points: &[Point],
    samples: usize,
    seed: u64,
) -> Result<SymmetryReport, SymmetryError> {
    require_cuspidal(y)?;
    let act = CyclicAction::rational();
    let schemes = zeta_samples(y, points, samples, seed)?;
    let mut failures = Vec::new();
    let mut irrational = 0;
    let mut nonreduced = 0;
    for (i, xi) in schemes.iter().enumerate() {
        let moved = act.act_scheme(xi)?;
        let lhs = fanomaps::phi(y, &moved)?;
        let rhs = match fanomaps::phi(y, xi)? {
            PhiOutcome::Line { line } => PhiOutcome::Line { line: act.act_line(&line)? },
            PhiOutcome::PlaneInY { plane } => {
                let p = [act.act_point(&plane[0])?, act.act_point(&plane[1])?, act.act_point(&plane[2])?];
                PhiOutcome::PlaneInY { plane: p }
            }
        };
        let same = match (&lhs, &rhs) {
            (PhiOutcome::Line { line: a }, PhiOutcome::Line { line: b }) => a == b,
            (PhiOutcome::PlaneInY { plane: a }, PhiOutcome::PlaneInY { plane: b }) => {
                linalg::rank(&[a.to_vec(), b.to_vec()].concat()) == 3
            }
            _ => false,
        };
        if !same {
            failures.push(format!("sample {i}: phi(tau xi) != sigma(phi(xi))"));
        }
        let coords: Vec<&FieldElement> = match xi {
            LengthTwoScheme::Reduced(a, b) => a.iter().chain(b.iter()).collect(),
            LengthTwoScheme::Nonreduced { point, tangent } => {
                nonreduced += 1;
                point.iter().chain(tangent.iter()).collect()
            }
        };
        if coords.iter().any(|c| c.tag() == FieldTag::Zeta3) {
            irrational += 1;
        }
    }
    let mut checks = vec![
        Check::new(
            "phi-equivariance",
            failures.is_empty(),
            format!("{} samples, {} failures", schemes.len(), failures.len()),
        ),
        Check::new(
            "zeta-samples",
            irrational > 0,
            format!("{irrational} samples with zeta3 coordinates, {nonreduced} nonreduced"),
        ),
    ];
    if let Some(first) = schemes.first() {
        if let LengthTwoScheme::Reduced(a, b) = first {
            if a[5].is_zero() && b[5].is_zero() {
                let fixed = act.act_scheme(first)? == *first;
                let phi_fixed = match fanomaps::phi(y, first)? {
                    PhiOutcome::Line { line } => act.act_line(&line)? == line,
                    PhiOutcome::PlaneInY { .. } => true,
                };
                checks.push(Check::new("fixed-input-fixed-output", fixed && phi_fixed, "both points on x5 = 0".into()));
            }
        }
    }
    Ok(SymmetryReport { checks, samples: schemes.len(), failures })
}

/// Orbit sizes at every level on seeded objects.
pub fn check_orders(
    y: &SingularCubicFourfold,
    points: &[Point],
    frame: &AdaptedFrame,
    seed: u64,
) -> Result<SymmetryReport, SymmetryError> {
    require_cuspidal(y)?;
    let act = CyclicAction::rational();
    let mut objects: Vec<(Level, LevelObject)> = Vec::new();
    for p in points {
        objects.push((Level::AmbientP5, LevelObject::Point(p.clone())));
        objects.push((Level::SigmaSurface, LevelObject::Point(p.clone())));
    }
    for xi in fanomaps::sample_schemes(y, points, seed, 6, 3)? {
        if let PhiOutcome::Line { line } = fanomaps::phi(y, &xi)? {
            objects.push((Level::Grassmannian, LevelObject::Line(line.clone())));
            if let Some(c) = frame.chart_point(&line)? {
                objects.push((Level::BlowupChart, LevelObject::Chart(c)));
            }
        }
        objects.push((Level::Hilb2, LevelObject::Scheme(xi)));
    }
    let l0 = ProjectiveLine::from_span(&field::int_vec(&[1, 0, 0, 0, 0, 0]), &field::int_vec(&[0, 1, 0, 0, 0, 0]))?;
    objects.push((Level::Grassmannian, LevelObject::Line(l0.clone())));
    objects.push((Level::BlowupChart, LevelObject::Blowup(field::int_vec(&[1, -2, 3, 1, 2, -1, 1, 3]))));
    let mut failures = Vec::new();
    let mut moved = 0;
    for (i, (level, obj)) in objects.iter().enumerate() {
        match orbit_size(&act, y, *level, obj)? {
            None => failures.push(format!("object {i} at {level:?}: third power is not the identity")),
            Some(3) => moved += 1,
            Some(_) => {}
        }
    }
    let l0_fixed = act.act_line(&l0)? == l0;
    let checks = vec![
        Check::new(
            "order-three",
            failures.is_empty(),
            format!("{} objects, {moved} with orbit of size 3", objects.len()),
        ),
        Check::new("x5-free-line-fixed", l0_fixed, "span(e0, e1)".into()),
    ];
    Ok(SymmetryReport { checks, samples: objects.len(), failures })
}

/// Fixed points on the surface are the points with `x5 = 0`, and they lie
/// on `q = g = 0`; non-fixed points have orbits of size three on the
/// surface; the vertex `e5` is fixed and off the surface.
pub fn fixed_locus_check(y: &SingularCubicFourfold, points: &[Point]) -> Result<SymmetryReport, SymmetryError> {
    require_cuspidal(y)?;
    let act = CyclicAction::rational();
    let mut failures = Vec::new();
    let g = y.cubic_part();
    let mut fixed = 0;
    for (i, p) in points.iter().enumerate() {
        let size = orbit_size(&act, y, Level::SigmaSurface, &LevelObject::Point(p.clone()))?;
        let on_x5 = p[5].is_zero();
        match size {
            Some(1) if on_x5 => {
                fixed += 1;
                if !y.q().eval(p)?.is_zero() || !g.eval(p)?.is_zero() {
                    failures.push(format!("fixed point {i} is not on q = g = 0"));
                }
            }
            Some(3) if !on_x5 => {
                let mut x = p.clone();
                for _ in 0..2 {
                    x = act.act_point(&x)?;
                    if !y.sigma_membership(&x) {
                        failures.push(format!("orbit of point {i} leaves the surface"));
                    }
                }
            }
            other => failures.push(format!("point {i}: x5 = 0 is {on_x5}, orbit size {other:?}")),
        }
    }
    let vertex = field::int_vec(&[0, 0, 0, 0, 0, 1]);
    let vertex_fixed = act.act_point(&vertex)? == vertex;
    let vertex_off = !y.sigma_membership(&vertex);
    // ambient points: fixed exactly on x5 = 0 and at the vertex
    let probes = [
        (field::int_vec(&[1, 2, -1, 3, 5, 0]), true),
        (field::int_vec(&[1, 2, -1, 3, 5, 1]), false),
        (field::int_vec(&[0, 0, 0, 0, 0, 7]), true),
        (field::int_vec(&[0, 1, 0, 0, 0, 1]), false),
    ];
    let ambient_ok = probes.iter().all(|(x, want)| {
        act.act_point(x).map(|y| y == field::normalize_projective(x).unwrap()).unwrap_or(false) == *want
    });
    let checks = vec![
        Check::new(
            "surface-fixed-iff-x5-zero",
            failures.is_empty(),
            format!("{fixed} fixed of {} points", points.len()),
        ),
        Check::new("vertex-fixed", vertex_fixed, "(0:0:0:0:0:1)".into()),
        Check::new("vertex-off-surface", vertex_off, "k(e5) != 0".into()),
        Check::new("ambient-fixed-locus", ambient_ok, "x5 = 0 hyperplane and the vertex".into()),
    ];
    Ok(SymmetryReport { checks, samples: points.len(), failures })
}

fn stable_up_to_unit(eqs: &[Poly], sub: &[Poly]) -> Result<Vec<bool>, PolyError> {
    eqs.iter()
        .map(|f| {
            let g = f.substitute(sub)?;
            Ok(eqs.iter().any(|h| localmodel::proportional_polys(&g, h) && !g.is_zero()))
        })
        .collect()
}

/// Stability of `F`, `q`, `k`, the chart equations and the blowup chart
/// equations under the action, and the fixed points on the exceptional
/// fibre, at an `x5`-compatible frame.
pub fn blowup_equivariance_check(
    y: &SingularCubicFourfold,
    frame: &AdaptedFrame,
) -> Result<SymmetryReport, SymmetryError> {
    require_cuspidal(y)?;
    if !frame.x5_compatible() {
        return Err(SymmetryError::FrameNotCompatible);
    }
    let act = CyclicAction::rational();
    let amb = act.ambient_substitution();
    let forms_stable = y.equation().substitute(&amb)? == y.equation()
        && y.q().substitute(&amb)? == *y.q()
        && y.k().substitute(&amb)? == *y.k();
    // the frame commutes with the action
    let frame_commutes =
        (0..6).all(|i| frame.transform[5][i].is_zero() == (i != 5) && frame.transform[i][5].is_zero() == (i != 5));
    let chart = frame.chart_equations()?;
    let chart_stable = stable_up_to_unit(&chart, &act.chart_substitution())?;
    let bar = localmodel::blowup_chart_equations(frame)?;
    let bar_stable = stable_up_to_unit(&bar, &act.blowup_substitution())?;
    // p1i = a~_i p15 is preserved: blowup map intertwines the two actions
    let n = CHART_VARS;
    let p15 = Poly::var(n, BLOWUP_P15);
    let blow: Vec<Poly> =
        (0..n).map(|i| if (4..7).contains(&i) { &Poly::var(n, i) * &p15 } else { Poly::var(n, i) }).collect();
    let mut relations = true;
    for i in 0..n {
        let lhs = act.chart_substitution()[i].substitute(&blow)?;
        let rhs = blow[i].substitute(&act.blowup_substitution())?;
        relations &= lhs == rhs;
    }
    let (quadric, linear) = localmodel::exceptional_fibre(frame)?;
    let a_sub = act.a_substitution();
    let fibre_stable = localmodel::proportional_polys(&quadric.substitute(&a_sub)?, &quadric)
        && localmodel::proportional_polys(&linear.substitute(&a_sub)?, &linear);
    // eigenspaces of diag(1, 1, 1, zeta) on (a2 : a3 : a4 : a5)
    let z = act.zeta().clone();
    let diag = |lam: &FieldElement| -> linalg::Matrix {
        (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        if i != j {
                            FieldElement::zero()
                        } else if i == 3 {
                            &z - lam
                        } else {
                            &FieldElement::one() - lam
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let e1 = linalg::kernel(&diag(&FieldElement::one()), 4);
    let ez = linalg::kernel(&diag(&z), 4);
    let slice_fixed = e1.len() == 3 && e1.iter().all(|v| v[3].is_zero());
    let apex_fixed = ez.len() == 1 && field::proportional(&ez[0], &field::int_vec(&[0, 0, 0, 1]));
    let apex_on_fibre = quadric.eval(&field::int_vec(&[0, 0, 0, 1]))?.is_zero()
        && linear.eval(&field::int_vec(&[0, 0, 0, 1]))?.is_zero();
    let checks = vec![
        Check::new("forms-stable", forms_stable, "F, q, k invariant under x5 -> z x5".into()),
        Check::new("frame-commutes", frame_commutes, "frame touches x1..x4 only".into()),
        Check::new("chart-equations-stable", chart_stable.iter().all(|b| *b), format!("{chart_stable:?}")),
        Check::new("blowup-equations-stable", bar_stable.iter().all(|b| *b), format!("{bar_stable:?}")),
        Check::new("blowup-relations-preserved", relations, "p1i = (ai/a5) p15".into()),
        Check::new("exceptional-fibre-stable", fibre_stable, "h1, q1 are a5-free".into()),
        Check::new(
            "fixed-slice-and-apex",
            slice_fixed && apex_fixed && apex_on_fibre,
            "{a5 = 0} pointwise, (0:0:0:1)".into(),
        ),
    ];
    Ok(SymmetryReport { checks, samples: 1, failures: Vec::new() })
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
    fn zeta_is_primitive() {
        assert!(CyclicAction::new(FieldElement::one()).is_err());
        let a = CyclicAction::mod_p(7).unwrap();
        assert_eq!(a.zeta().pow(3), FieldElement::prime(7, 1).unwrap());
        assert!(CyclicAction::mod_p(5).is_err());
    }

    #[test]
    fn field_without_zeta_is_rejected() {
        let x = vec![
            FieldElement::zero(),
            FieldElement::sqrt_of(2).unwrap(),
            FieldElement::zero(),
            FieldElement::zero(),
            FieldElement::zero(),
            FieldElement::one(),
        ];
        assert!(matches!(CyclicAction::rational().act_point(&x), Err(SymmetryError::FieldLacksZeta3(_))));
    }

    #[test]
    fn chart_action_matches_line_action() {
        let act = CyclicAction::rational();
        let c = PluckerChart::new(field::int_vec(&[1, 2, -1, 3]), field::int_vec(&[0, 1, 4, -2]));
        let lhs = act.act_line(&c.line()).unwrap();
        let rhs = act.act_chart(&c).unwrap().line();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cuspidal_fixture_checks() {
        let fx = load("FX-C1");
        let y = &fx.fourfold;
        let rep = check_equivariance_phi(y, &fx.points, 12, 0).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let rep = fixed_locus_check(y, &fx.points).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let frame = adapt_frame(y, &fx.points[0]).unwrap();
        let rep = blowup_equivariance_check(y, &frame).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let rep = check_orders(y, &fx.points, &frame, 0).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
