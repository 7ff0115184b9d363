//! Coordinates adapted to a line of the surface, the local equations of the
//! Fano variety around that line, the transversal singularity type, and the
//! equations of the blowup along the surface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{self, FieldElement};
use crate::fourfold::{FourfoldError, FourfoldKind, SingularCubicFourfold};
use crate::linalg::{self, Matrix};
use crate::lines::{self, LineError, PluckerChart, Point, ProjectiveLine, CHART_VARS};
use crate::poly::{self, AdaptedDecomposition, DecompositionMode, Poly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("point is not on the surface of lines through the singular point")]
    NotOnSigma,
    #[error("h1 and h2 are proportional at this point")]
    NotTransversal,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Line(#[from] LineError),
    #[error(transparent)]
    Fourfold(#[from] FourfoldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameMode {
    Nodal,
    /// Cuspidal frame fixing `x5`, available when the point has `x5 = 0`.
    CuspidalCompatible,
    /// Cuspidal frame at a point with `x5 != 0`: the vertex stays at `e5` but
    /// `x5` is shifted by a multiple of the new `x1`.
    CuspidalShifted,
}

/// Linear coordinates `y` with `x = T y` in which the singular point is `e0`
/// and the chosen line through it is `{y2 = ... = y5 = 0}`.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub point: Point,
    pub transform: Matrix,
    pub inverse: Matrix,
    pub mode: FrameMode,
    pub q: Poly,
    pub k: Poly,
    pub decomposition: AdaptedDecomposition,
}

fn basis_vec(i: usize, like: &FieldElement) -> Point {
    let mut v = vec![like.zero_like(); 6];
    v[i] = like.one_like();
    v
}

/// First vectors of `candidates` that stay independent together with `base`.
fn pick_independent(base: &[Point], candidates: Vec<Point>, count: usize) -> Vec<Point> {
    let mut chosen: Vec<Point> = Vec::new();
    for v in candidates {
        if chosen.len() == count {
            break;
        }
        let mut trial: Vec<Point> = base.to_vec();
        trial.extend(chosen.iter().cloned());
        trial.push(v.clone());
        if linalg::rank(&trial) == trial.len() {
            chosen.push(v);
        }
    }
    chosen
}

fn columns_to_matrix(cols: &[Point]) -> Matrix {
    linalg::transpose(&cols.to_vec())
}

/// Builds the adapted frame at a point `s` of the surface. The choice is
/// deterministic: kernel vectors and particular solutions come from reduced
/// row echelon forms with free variables set to zero.
pub fn adapt_frame(y: &SingularCubicFourfold, s: &[FieldElement]) -> Result<AdaptedFrame, LocalError> {
    if !y.sigma_membership(s) {
        return Err(LocalError::NotOnSigma);
    }
    let s = field::normalize_projective(s).expect("nonzero point");
    let like = s.iter().find(|c| !c.is_zero()).unwrap().zero_like();
    let e = |i| basis_vec(i, &like);
    let gq = y.q().gradient_at(&s)?;
    let (cols, mode) = match y.kind() {
        FourfoldKind::Nodal => {
            let gk = y.k().gradient_at(&s)?;
            let rows = vec![e(0), gq, gk];
            if linalg::rank(&rows) < 3 {
                return Err(LocalError::NotTransversal);
            }
            let ker = linalg::kernel(&rows, 6);
            let rest = pick_independent(std::slice::from_ref(&s), ker, 2);
            let rhs = |a: i64, b: i64| vec![like.clone(), like.int_like(a), like.int_like(b)];
            let u2 = linalg::solve(&rows, &rhs(1, 0)).ok_or(LocalError::NotTransversal)?;
            let u3 = linalg::solve(&rows, &rhs(0, 1)).ok_or(LocalError::NotTransversal)?;
            (vec![e(0), s.clone(), u2, u3, rest[0].clone(), rest[1].clone()], FrameMode::Nodal)
        }
        FourfoldKind::CuspidalCyclic => {
            let rows = vec![e(0), e(5), gq];
            if linalg::rank(&rows) < 3 {
                return Err(LocalError::Invariant("q has zero gradient at a surface point".into()));
            }
            let mut base = s.clone();
            base[5] = like.clone();
            let ker = linalg::kernel(&rows, 6);
            let rest = pick_independent(std::slice::from_ref(&base), ker, 2);
            let rhs = vec![like.clone(), like.clone(), like.one_like()];
            let u2 = linalg::solve(&rows, &rhs).expect("rank three system");
            let mode = if s[5].is_zero() { FrameMode::CuspidalCompatible } else { FrameMode::CuspidalShifted };
            (vec![e(0), s.clone(), u2, rest[0].clone(), rest[1].clone(), e(5)], mode)
        }
    };
    let transform = columns_to_matrix(&cols);
    let inverse = linalg::inverse(&transform).map_err(|_| LocalError::Invariant("frame is singular".into()))?;
    let images: Vec<Poly> = transform.iter().map(|row| Poly::linear(row)).collect();
    let q = y.q().substitute(&images)?;
    let k = y.k().substitute(&images)?;
    let dmode = match mode {
        FrameMode::CuspidalCompatible => DecompositionMode::Cuspidal,
        _ => DecompositionMode::Nodal,
    };
    let decomposition = AdaptedDecomposition::decompose(&q, &k, dmode)?;
    let frame = AdaptedFrame { point: s, transform, inverse, mode, q, k, decomposition };
    frame.check_normalization()?;
    Ok(frame)
}

impl AdaptedFrame {
    fn check_normalization(&self) -> Result<(), LocalError> {
        let d = &self.decomposition;
        if d.h1 != Poly::var(6, 2) {
            return Err(LocalError::Invariant(format!("h1 = {} after normalization", d.h1)));
        }
        if self.mode == FrameMode::Nodal && d.h2 != Poly::var(6, 3) {
            return Err(LocalError::Invariant(format!("h2 = {} after normalization", d.h2)));
        }
        Ok(())
    }

    /// `F` in frame coordinates.
    pub fn equation(&self) -> Poly {
        &(&Poly::var(6, 0) * &self.q) + &self.k
    }

    pub fn to_ambient(&self, y: &[FieldElement]) -> Point {
        linalg::mat_vec(&self.transform, y)
    }

    pub fn to_frame(&self, x: &[FieldElement]) -> Point {
        linalg::mat_vec(&self.inverse, x)
    }

    pub fn line_to_frame(&self, line: &ProjectiveLine) -> Result<ProjectiveLine, LineError> {
        line.transform(&self.inverse)
    }

    pub fn line_to_ambient(&self, line: &ProjectiveLine) -> Result<ProjectiveLine, LineError> {
        line.transform(&self.transform)
    }

    /// Whether the frame commutes with scaling `x5`.
    pub fn x5_compatible(&self) -> bool {
        self.mode == FrameMode::CuspidalCompatible
    }

    /// The four chart equations assembled from the decomposition pieces.
    pub fn chart_equations(&self) -> Result<[Poly; 4], LocalError> {
        Ok(lines::chart_equations(&self.decomposition)?)
    }

    /// The same four equations by restricting `F` to the chart line.
    pub fn chart_equations_direct(&self) -> Result<[Poly; 4], LocalError> {
        Ok(lines::chart_equations_direct(&self.equation())?)
    }

    /// Chart coordinates of a line given in ambient coordinates, if it lies
    /// in the chart.
    pub fn chart_point(&self, line: &ProjectiveLine) -> Result<Option<PluckerChart>, LocalError> {
        Ok(PluckerChart::from_line(&self.line_to_frame(line)?))
    }
}

fn jacobian(eqs: &[Poly; 4], at: &[FieldElement]) -> Result<Matrix, LocalError> {
    eqs.iter().map(|f| f.gradient_at(at).map_err(LocalError::from)).collect()
}

/// Coefficients of a linear form in `x2..x5`.
fn linear_coeffs(h: &Poly) -> Vec<FieldElement> {
    (2..6)
        .map(|i| {
            let mut e = vec![0; 6];
            e[i] = 1;
            h.coeff(&e)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterJacobian {
    pub matrix: Matrix,
    pub rank: usize,
    pub p0_block_rank: usize,
    pub p1_block_rank: usize,
    pub pattern_matches: bool,
}

/// Jacobian of the chart equations at the chart center, compared against
/// the block pattern built from the gradients of `h1` and `h2`: rows
/// `(0 | 0)`, `(grad h2 | 0)`, `(0 | -grad h1)`, `(grad h1 | -grad h2)`.
pub fn jacobian_at_center(frame: &AdaptedFrame) -> Result<CenterJacobian, LocalError> {
    let eqs = frame.chart_equations()?;
    let zero = field::int_vec(&[0; CHART_VARS]);
    let matrix = jacobian(&eqs, &zero)?;
    let d = &frame.decomposition;
    let g1 = linear_coeffs(&d.h1);
    let g2 = linear_coeffs(&d.h2);
    let z = field::int_vec(&[0; 4]);
    let neg = |v: &[FieldElement]| v.iter().map(|x| -x).collect::<Vec<_>>();
    let cat = |a: &[FieldElement], b: &[FieldElement]| a.iter().chain(b).cloned().collect::<Vec<_>>();
    let expected = vec![cat(&z, &z), cat(&g2, &z), cat(&z, &neg(&g1)), cat(&g1, &neg(&g2))];
    let pattern_matches = matrix == expected;
    if !pattern_matches {
        return Err(LocalError::Invariant("Jacobian at the center does not have the block pattern".into()));
    }
    let block = |r: std::ops::Range<usize>| -> Matrix { matrix.iter().map(|row| row[r.clone()].to_vec()).collect() };
    Ok(CenterJacobian {
        rank: linalg::rank(&matrix),
        p0_block_rank: linalg::rank(&block(0..4)),
        p1_block_rank: linalg::rank(&block(4..8)),
        pattern_matches,
        matrix,
    })
}

/// Jacobian of the chart equations at an arbitrary chart point.
pub fn jacobian_at(frame: &AdaptedFrame, at: &PluckerChart) -> Result<(Matrix, usize), LocalError> {
    let m = jacobian(&frame.chart_equations()?, &at.coords())?;
    let r = linalg::rank(&m);
    Ok((m, r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransversalType {
    A1,
    A2,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularityVerdict {
    #[serde(rename = "type")]
    pub kind: TransversalType,
    /// Quadratic part of the reduced equation of the transversal slice, in
    /// the chart variables `p13, p14, p15`.
    pub quadratic_part: Poly,
    pub witness_rank: usize,
    /// Rank of `q1` on `ker h1`, read off the decomposition directly.
    pub restricted_q1_rank: usize,
    pub kernel: Option<Vec<FieldElement>>,
    pub cubic_coefficient: Option<FieldElement>,
    /// The eliminated `p12` has no linear term.
    pub p12_linear_term_zero: bool,
    pub p12_series: Poly,
}

/// Solves `E(z, t) = 0` for the unknowns `z` (indices into the chart ring)
/// as power series in the remaining variables, truncated at `order`.
fn solve_series(eqs: &[Poly], unknowns: &[usize], order: u32) -> Result<Vec<Poly>, LocalError> {
    let n = CHART_VARS;
    let zero = field::int_vec(&[0; CHART_VARS]);
    let a: Matrix = eqs
        .iter()
        .map(|f| {
            let g = f.gradient_at(&zero)?;
            Ok(unknowns.iter().map(|&i| g[i].clone()).collect())
        })
        .collect::<Result<_, PolyError>>()?;
    let a_inv = linalg::inverse(&a).map_err(|_| LocalError::Invariant("implicit function step is singular".into()))?;
    let mut z: Vec<Poly> = vec![Poly::zero(n); unknowns.len()];
    for _ in 0..=order + 1 {
        let images: Vec<Poly> = (0..n)
            .map(|i| match unknowns.iter().position(|&u| u == i) {
                Some(j) => z[j].clone(),
                None => Poly::var(n, i),
            })
            .collect();
        // residual = E(z, t) - A z, so that z = -A^{-1} residual
        let residual: Vec<Poly> = eqs
            .iter()
            .zip(&a)
            .map(|(f, row)| -> Result<Poly, LocalError> {
                let mut r = f.substitute_up_to(&images, order)?;
                for (c, zj) in row.iter().zip(&z) {
                    r = &r - &zj.scale(c);
                }
                Ok(r)
            })
            .collect::<Result<_, _>>()?;
        let next: Vec<Poly> = a_inv
            .iter()
            .map(|row| {
                let mut acc = Poly::zero(n);
                for (c, r) in row.iter().zip(&residual) {
                    acc = &acc - &r.scale(c);
                }
                acc.truncate(order)
            })
            .collect();
        if next == z {
            return Ok(z);
        }
        z = next;
    }
    Err(LocalError::Invariant("power series iteration did not stabilize".into()))
}

/// Transversal singularity type along the surface at the frame's line:
/// eliminate `p02`, one further `p0` coordinate and `p12`, restrict to the
/// fibre `p0 = 0` and read the 2-jet and 3-jet of the remaining equation in
/// `(p13, p14, p15)`.
pub fn classify_transversal_type(frame: &AdaptedFrame) -> Result<SingularityVerdict, LocalError> {
    let d = &frame.decomposition;
    let [psi30, psi03, psi21, psi12] = frame.chart_equations_direct()?;
    let g2 = linear_coeffs(&d.h2);
    let j = (1..4).find(|&i| !g2[i].is_zero()).ok_or(LocalError::NotTransversal)?;
    let unknowns = [0, j, 4];
    // fibre over the chart center: the other p0 coordinates vanish
    let n = CHART_VARS;
    let on_fibre: Vec<Poly> =
        (0..n).map(|i| if i < 4 && !unknowns.contains(&i) { Poly::zero(n) } else { Poly::var(n, i) }).collect();
    let restrict = |f: &Poly| f.substitute(&on_fibre);
    let eqs = [restrict(&psi12)?, restrict(&psi03)?, restrict(&psi21)?];
    let z = solve_series(&eqs, &unknowns, 3)?;
    let images: Vec<Poly> = (0..n)
        .map(|i| match unknowns.iter().position(|&u| u == i) {
            Some(k) => z[k].clone(),
            None => on_fibre[i].clone(),
        })
        .collect();
    let f = restrict(&psi30)?.substitute_up_to(&images, 3)?;
    if !f.homogeneous_part(0).is_zero() || !f.homogeneous_part(1).is_zero() {
        return Err(LocalError::Invariant(format!("reduced equation has low order terms: {f}")));
    }
    let quad = f.homogeneous_part(2);
    let cubic = f.homogeneous_part(3);
    let gram = poly::gram_matrix(&quad);
    let t_vars = [5usize, 6, 7];
    let sub: Matrix = t_vars.iter().map(|&i| t_vars.iter().map(|&j| gram[i][j].clone()).collect()).collect();
    let witness_rank = linalg::rank(&sub);
    let p12_series = z[2].clone();
    let p12_linear_term_zero = p12_series.homogeneous_part(1).is_zero();

    let ker_h1 = linalg::kernel(&vec![linear_coeffs(&d.h1)], 4);
    let q1_block = lines_block(&d.q1);
    let restricted = poly::HomogeneousForm::in_coordinates(q1_block)?.restrict_to_subspace(&ker_h1)?;
    let restricted_q1_rank = restricted.quadratic_rank()?;

    let (kind, kernel, cubic_coefficient) = match witness_rank {
        3 => (TransversalType::A1, None, None),
        2 => {
            let ker = linalg::kernel(&sub, 3).remove(0);
            let v = field::normalize_projective(&ker).expect("nonzero kernel");
            let mut at = field::int_vec(&[0; CHART_VARS]);
            for (slot, x) in t_vars.iter().zip(&v) {
                at[*slot] = x.clone();
            }
            let c = cubic.eval(&at)?;
            if c.is_zero() {
                return Err(LocalError::Invariant(format!(
                    "rank two quadratic part {quad} with vanishing cubic term along {v:?}"
                )));
            }
            (TransversalType::A2, Some(v), Some(c))
        }
        r => {
            return Err(LocalError::Invariant(format!("quadratic part {quad} has rank {r}")));
        }
    };
    Ok(SingularityVerdict {
        kind,
        quadratic_part: quad,
        witness_rank,
        restricted_q1_rank,
        kernel,
        cubic_coefficient,
        p12_linear_term_zero,
        p12_series,
    })
}

/// A form in `x2..x5` of the six-variable ring, moved to four variables.
pub fn lines_block(f: &Poly) -> Poly {
    debug_assert!(!f.involves(0) && !f.involves(1));
    f.rename(4, &[0, 0, 0, 1, 2, 3])
}

/// Variables of the blowup chart `a5 != 0`: `p0` at 0..4, `a2~, a3~, a4~`
/// at 4..7 and `p15` at 7.
pub const BLOWUP_P15: usize = 7;

fn blowup_substitution() -> Vec<Poly> {
    let n = CHART_VARS;
    let p15 = Poly::var(n, BLOWUP_P15);
    (0..n)
        .map(|i| match i {
            4..=6 => &Poly::var(n, i) * &p15,
            _ => Poly::var(n, i),
        })
        .collect()
}

fn divide_by_p15(f: &Poly, times: u32) -> Result<Poly, LocalError> {
    let d = Poly::var(CHART_VARS, BLOWUP_P15).pow(times);
    f.div_exact(&d).ok_or_else(|| LocalError::Invariant(format!("chart equation not divisible by p15^{times}")))
}

/// Blowup equations obtained by substituting `p1 = p15 (a~, 1)` into the
/// chart equations and clearing the powers of `p15`.
pub fn blowup_chart_equations(frame: &AdaptedFrame) -> Result<[Poly; 4], LocalError> {
    let [psi30, psi03, psi21, psi12] = frame.chart_equations_direct()?;
    let sub = blowup_substitution();
    Ok([
        divide_by_p15(&psi30.substitute(&sub)?, 2)?,
        psi03.substitute(&sub)?,
        divide_by_p15(&psi21.substitute(&sub)?, 1)?,
        psi12.substitute(&sub)?,
    ])
}

/// The same equations assembled from the decomposition pieces.
pub fn blowup_chart_equations_formula(frame: &AdaptedFrame) -> Result<[Poly; 4], LocalError> {
    let d = &frame.decomposition;
    let n = CHART_VARS;
    let k1 = d.full_k1();
    let p15 = Poly::var(n, BLOWUP_P15);
    // chart polynomial in (p0, p1) evaluated at p1 = (a~, 1)
    let dehom: Vec<Poly> = (0..n).map(|i| if i == BLOWUP_P15 { Poly::one(n) } else { Poly::var(n, i) }).collect();
    let at_a = |f: &Poly| -> Result<Poly, LocalError> { Ok(lines::to_chart_block(f, 4).substitute(&dehom)?) };
    let at0 = |f: &Poly| lines::to_chart_block(f, 0);
    let on_a = |f: Poly| -> Result<Poly, LocalError> { Ok(f.substitute(&dehom)?) };
    let two = FieldElement::from_int(2);
    let b1 = on_a(lines::chart_bilinear(&d.q1, 4, 0))?;
    let b2 = on_a(lines::chart_bilinear(&d.q2, 4, 0))?;
    let k21 = on_a(lines::k1_bidegree(&k1, 2, 1)?)?;
    let k12 = on_a(lines::k1_bidegree(&k1, 1, 2)?)?;
    let bar30 = at_a(&d.q1)? - &p15 * &at_a(&k1)?;
    let bar03 = &(&at0(&d.h2) + &at0(&d.q2)) + &at0(&k1);
    let bar21 = -at_a(&d.h1)? - b1.scale(&two) + &p15 * &at_a(&d.q2)? + &p15 * &k21;
    let bar12 = at0(&d.h1) + at0(&d.q1) - &p15 * &at_a(&d.h2)? - (&p15 * &b2).scale(&two) + &p15 * &k12;
    Ok([bar30, bar03, bar21, bar12])
}

/// Checks `psi30 = p15^2 bar30`, `psi21 = p15 bar21`, `psi12 = bar12`,
/// `psi03 = bar03` at seeded rational points with `p15 != 0`.
pub fn blowup_pullback_check(frame: &AdaptedFrame, seed: u64, count: usize) -> Result<usize, LocalError> {
    let chart = frame.chart_equations()?;
    let bar = blowup_chart_equations_formula(frame)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let powers = [2u32, 0, 1, 0];
    for _ in 0..count {
        let mut b: Vec<FieldElement> =
            (0..CHART_VARS).map(|_| FieldElement::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
        if b[BLOWUP_P15].is_zero() {
            b[BLOWUP_P15] = FieldElement::one();
        }
        let t = b[BLOWUP_P15].clone();
        let mut c = b.clone();
        for slot in c.iter_mut().take(7).skip(4) {
            *slot = &*slot * &t;
        }
        for i in 0..4 {
            let lhs = chart[i].eval(&c)?;
            let rhs = &t.pow(powers[i]) * &bar[i].eval(&b)?;
            if lhs != rhs {
                return Err(LocalError::Invariant(format!(
                    "{} pullback mismatch at {:?}",
                    lines::CHART_EQUATION_NAMES[i],
                    b.iter().map(ToString::to_string).collect::<Vec<_>>()
                )));
            }
        }
    }
    Ok(count)
}

/// Homogenizes a polynomial in `a2~, a3~, a4~` (chart indices 4..7) to a
/// form of degree `d` in four variables `(a2, a3, a4, a5)`.
fn homogenize_a(f: &Poly, d: u16) -> Poly {
    let mut out = Poly::zero(4);
    for (e, c) in f.terms() {
        let deg: u16 = e[4..7].iter().sum();
        let mono = vec![e[4], e[5], e[6], d - deg];
        out = &out + &Poly::monomial(4, mono, c.clone());
    }
    out
}

/// The exceptional fibre `p0 = 0, p15 = 0` of the blowup chart, as the two
/// nonzero equations homogenized in `(a2 : a3 : a4 : a5)`: first the
/// quadric, then the linear form.
pub fn exceptional_fibre(frame: &AdaptedFrame) -> Result<(Poly, Poly), LocalError> {
    let eqs = blowup_chart_equations(frame)?;
    let n = CHART_VARS;
    let slice: Vec<Poly> = (0..n).map(|i| if (4..7).contains(&i) { Poly::var(n, i) } else { Poly::zero(n) }).collect();
    let restricted: Vec<Poly> = eqs.iter().map(|f| f.substitute(&slice)).collect::<Result<_, _>>()?;
    if !restricted[1].is_zero() || !restricted[3].is_zero() {
        return Err(LocalError::Invariant("psi03 or psi12 survives on the exceptional fibre".into()));
    }
    Ok((homogenize_a(&restricted[0], 2), homogenize_a(&restricted[2], 1)))
}

/// Whether `(quadric, linear)` and `(quadric', linear')` generate the same
/// ideal: the linear forms are proportional and the quadrics agree up to a
/// unit modulo the linear form.
pub fn same_conic_pair(a: (&Poly, &Poly), b: (&Poly, &Poly)) -> Result<bool, LocalError> {
    let (qa, la) = a;
    let (qb, lb) = b;
    if la.is_zero() || lb.is_zero() || !proportional_polys(la, lb) {
        return Ok(false);
    }
    let coeffs: Vec<FieldElement> = (0..4)
        .map(|i| {
            let mut e = vec![0; 4];
            e[i] = 1;
            la.coeff(&e)
        })
        .collect();
    let ker = linalg::kernel(&vec![coeffs], 4);
    let ra = poly::HomogeneousForm::in_coordinates(qa.clone())?.restrict_to_subspace(&ker)?;
    let rb = poly::HomogeneousForm::in_coordinates(qb.clone())?.restrict_to_subspace(&ker)?;
    Ok(proportional_polys(ra.poly(), rb.poly()))
}

/// Nonzero scalar multiples of each other (both zero counts as equal).
pub fn proportional_polys(f: &Poly, g: &Poly) -> bool {
    match (f.leading_term(), g.leading_term()) {
        (None, None) => true,
        (Some((ef, cf)), Some((eg, cg))) if ef == eg => {
            let r = cf * &cg.inv().expect("nonzero leading coefficient");
            g.scale(&r) == *f
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn corpus() -> &'static Vec<crate::fourfold::Fixture> {
        static C: OnceLock<Vec<crate::fourfold::Fixture>> = OnceLock::new();
        C.get_or_init(|| {
            ["FX-N1", "FX-C1"]
                .iter()
                .map(|id| {
                    let path = format!("{}/../../fixtures/{id}.json", env!("CARGO_MANIFEST_DIR"));
                    crate::fourfold::Fixture::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
                })
                .collect()
        })
    }

    #[test]
    fn frame_normalizes_h1_and_h2() {
        for fx in corpus() {
            for s in &fx.points {
                let fr = adapt_frame(&fx.fourfold, s).unwrap();
                assert_eq!(fr.decomposition.h1, Poly::var(6, 2));
                assert_eq!(fr.to_ambient(&basis_vec(1, &FieldElement::zero())), fr.point);
                let (q, k) = fr.decomposition.reconstruct();
                assert_eq!((q, k), (fr.q.clone(), fr.k.clone()));
            }
        }
    }

    #[test]
    fn adapting_twice_is_identity() {
        for fx in corpus() {
            let s = &fx.points[0];
            let fr = adapt_frame(&fx.fourfold, s).unwrap();
            let y2 = SingularCubicFourfold::new(fx.kind(), fr.q.clone(), fr.k.clone()).unwrap();
            let fr2 = adapt_frame(&y2, &basis_vec(1, &FieldElement::zero())).unwrap();
            assert_eq!(fr2.transform, linalg::identity(6, &FieldElement::zero()));
            assert_eq!((fr2.q, fr2.k), (fr.q, fr.k));
        }
    }

    #[test]
    fn chart_equation_routes_agree() {
        for fx in corpus() {
            for s in fx.points.iter().take(4) {
                let fr = adapt_frame(&fx.fourfold, s).unwrap();
                assert_eq!(fr.chart_equations().unwrap(), fr.chart_equations_direct().unwrap());
            }
        }
    }

    #[test]
    fn center_jacobian_pattern() {
        for fx in corpus() {
            let fr = adapt_frame(&fx.fourfold, &fx.points[1]).unwrap();
            let j = jacobian_at_center(&fr).unwrap();
            assert!(j.pattern_matches);
            assert!(j.matrix[0].iter().all(FieldElement::is_zero));
            assert_eq!((j.p0_block_rank, j.p1_block_rank), (2, 2));
        }
    }

    #[test]
    fn transversal_types() {
        let [n1, c1] = [&corpus()[0], &corpus()[1]];
        for s in &n1.points {
            let v = classify_transversal_type(&adapt_frame(&n1.fourfold, s).unwrap()).unwrap();
            assert_eq!((v.kind, v.witness_rank, v.restricted_q1_rank), (TransversalType::A1, 3, 3));
        }
        for s in &c1.points {
            let v = classify_transversal_type(&adapt_frame(&c1.fourfold, s).unwrap()).unwrap();
            assert_eq!((v.kind, v.witness_rank), (TransversalType::A2, 2));
            assert!(v.p12_linear_term_zero);
            assert_eq!(v.kernel.unwrap(), field::int_vec(&[0, 0, 1]));
            assert_eq!(v.cubic_coefficient.unwrap(), FieldElement::from_int(-1));
        }
    }

    #[test]
    fn blowup_routes_and_fibre() {
        for fx in corpus() {
            let fr = adapt_frame(&fx.fourfold, &fx.points[2]).unwrap();
            assert_eq!(blowup_chart_equations(&fr).unwrap(), blowup_chart_equations_formula(&fr).unwrap());
            assert_eq!(blowup_pullback_check(&fr, 3, 20).unwrap(), 20);
            let (quad, lin) = exceptional_fibre(&fr).unwrap();
            let h1 = lines_block(&fr.decomposition.h1);
            let q1 = lines_block(&fr.decomposition.q1);
            assert!(same_conic_pair((&quad, &lin), (&q1, &h1)).unwrap());
        }
    }

    #[test]
    fn series_solver_matches_known_inverse() {
        // z - t^2 - z t = 0  =>  z = t^2 + t^3 + ...
        let n = CHART_VARS;
        let z = Poly::var(n, 0);
        let t = Poly::var(n, 5);
        let e = &(&z - &(&t * &t)) - &(&z * &t);
        let sol = solve_series(&[e], &[0], 3).unwrap();
        assert_eq!(sol[0], &(&t * &t) + &t.pow(3));
    }

    #[test]
    fn off_fixture_point_rejected() {
        let fx = &corpus()[0];
        assert!(matches!(adapt_frame(&fx.fourfold, &field::int_vec(&[0, 1, 1, 1, 1, 1])), Err(LocalError::NotOnSigma)));
    }
}
