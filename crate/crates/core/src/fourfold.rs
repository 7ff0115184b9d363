//! Cubic fourfolds `F = x0 q + k` with a node or a cyclic cusp at
//! `(1:0:...:0)`, their surface of lines through the singular point, and a
//! seeded fixture generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{self, is_prime, FieldElement, FieldError};
use crate::linalg;
use crate::lines::{LineError, Point, ProjectiveLine};
use crate::modp::{self, ModPoly, TernaryForm};
use crate::poly::{quadratic_rank_of, Poly, PolyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourfoldKind {
    Nodal,
    CuspidalCyclic,
}

impl FourfoldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FourfoldKind::Nodal => "nodal",
            FourfoldKind::CuspidalCyclic => "cuspidal_cyclic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FourfoldError {
    #[error("q degenerate: rank {rank}, expected {expected}")]
    QDegenerate { rank: usize, expected: usize },
    #[error("the vertex of the quadric cone lies on the cubic")]
    VertexOnK,
    #[error("malformed fourfold: {0}")]
    Malformed(String),
    #[error("point is not on the surface")]
    NotOnSigma,
    #[error("no valid fixture after {attempts} attempts; last failed check: {check}")]
    FixtureFailed { attempts: usize, check: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Line(#[from] LineError),
}

/// `F = x0 q + k` in coordinates `x0..x5`; `q` and `k` do not involve `x0`.
/// In the cuspidal cyclic case `q` and `k - x5^3` do not involve `x5`
/// either.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularCubicFourfold {
    kind: FourfoldKind,
    q: Poly,
    k: Poly,
}

fn x5_cubed() -> Poly {
    Poly::monomial(6, vec![0, 0, 0, 0, 0, 3], FieldElement::one())
}

impl SingularCubicFourfold {
    pub fn new(kind: FourfoldKind, q: Poly, k: Poly) -> Result<Self, FourfoldError> {
        let bad = |m: &str| Err(FourfoldError::Malformed(m.to_string()));
        if q.nvars() != 6 || k.nvars() != 6 {
            return bad("forms must live in six variables");
        }
        if !q.is_homogeneous() || q.degree() != Some(2) {
            return bad("q must be a nonzero quadratic form");
        }
        if !k.is_homogeneous() || k.degree() != Some(3) {
            return bad("k must be a nonzero cubic form");
        }
        if q.involves(0) || k.involves(0) {
            return bad("q and k must not involve x0");
        }
        if kind == FourfoldKind::CuspidalCyclic {
            if q.involves(5) {
                return bad("cuspidal q must not involve x5");
            }
            if (&k - &x5_cubed()).involves(5) {
                return bad("cuspidal k must be g(x1..x4) + x5^3");
            }
        }
        Ok(SingularCubicFourfold { kind, q, k })
    }

    pub fn kind(&self) -> FourfoldKind {
        self.kind
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn k(&self) -> &Poly {
        &self.k
    }

    /// `k` for a nodal fourfold, `g = k - x5^3` for a cuspidal one.
    pub fn cubic_part(&self) -> Poly {
        match self.kind {
            FourfoldKind::Nodal => self.k.clone(),
            FourfoldKind::CuspidalCyclic => &self.k - &x5_cubed(),
        }
    }

    pub fn equation(&self) -> Poly {
        &(&Poly::var(6, 0) * &self.q) + &self.k
    }

    pub fn singular_point() -> Point {
        field::int_vec(&[1, 0, 0, 0, 0, 0])
    }

    /// The vertex `(0:...:0:1)` of the quadric cone in the cuspidal case.
    pub fn vertex(&self) -> Option<Point> {
        (self.kind == FourfoldKind::CuspidalCyclic).then(|| field::int_vec(&[0, 0, 0, 0, 0, 1]))
    }

    pub fn expected_q_rank(&self) -> usize {
        match self.kind {
            FourfoldKind::Nodal => 5,
            FourfoldKind::CuspidalCyclic => 4,
        }
    }

    pub fn sigma_membership(&self, s: &[FieldElement]) -> bool {
        s.len() == 6
            && !field::is_zero_vec(s)
            && s[0].is_zero()
            && self.q.eval(s).map(|v| v.is_zero()).unwrap_or(false)
            && self.k.eval(s).map(|v| v.is_zero()).unwrap_or(false)
    }

    /// Rank of the Jacobian of `(q, k)` at `s`.
    pub fn sigma_jacobian_rank(&self, s: &[FieldElement]) -> Result<usize, FourfoldError> {
        let gq = self.q.gradient_at(s)?;
        let gk = self.k.gradient_at(s)?;
        Ok(linalg::rank(&vec![gq, gk]))
    }

    pub fn line_through_node(&self, s: &[FieldElement]) -> Result<ProjectiveLine, FourfoldError> {
        if !self.sigma_membership(s) {
            return Err(FourfoldError::NotOnSigma);
        }
        Ok(ProjectiveLine::from_span(&Self::singular_point(), s)?)
    }

    /// Whether a line of `{x0 = 0}` lies on the surface, so that the plane it
    /// spans with the singular point lies in the fourfold.
    pub fn contains_plane_candidate(&self, line: &ProjectiveLine) -> Result<bool, FourfoldError> {
        let [a, b] = line.span();
        if !a[0].is_zero() || !b[0].is_zero() {
            return Ok(false);
        }
        Ok(line.restrict(&self.q)?.is_zero() && line.restrict(&self.k)?.is_zero())
    }

    pub fn validate(&self, samples: &[Point]) -> Result<ValidationReport, FourfoldError> {
        let mut checks = Vec::new();
        let rank = quadratic_rank_of(&self.q);
        let expected = self.expected_q_rank();
        if rank != expected {
            return Err(FourfoldError::QDegenerate { rank, expected });
        }
        checks.push(Check::new("q-rank", true, format!("rank {rank}")));
        if let Some(v) = self.vertex() {
            let kv = self.k.eval(&v)?;
            if kv.is_zero() {
                return Err(FourfoldError::VertexOnK);
            }
            checks.push(Check::new("vertex-off-cubic", true, format!("k(vertex) = {kv}")));
        }
        let f = self.equation();
        let node = Self::singular_point();
        let fv = f.eval(&node)?;
        let grad = f.gradient_at(&node)?;
        checks.push(Check::new(
            "singular-point",
            fv.is_zero() && field::is_zero_vec(&grad),
            "F and grad F vanish at (1:0:0:0:0:0)".to_string(),
        ));
        let mut on_sigma = true;
        let mut transversal = true;
        let mut smooth_on_y = true;
        for s in samples {
            if !self.sigma_membership(s) {
                on_sigma = false;
                continue;
            }
            if self.sigma_jacobian_rank(s)? != 2 {
                transversal = false;
            }
            // points of the surface are smooth points of the fourfold
            if field::is_zero_vec(&f.gradient_at(s)?) {
                smooth_on_y = false;
            }
        }
        checks.push(Check::new("samples-on-sigma", on_sigma, format!("{} samples", samples.len())));
        checks.push(Check::new("sigma-transversal", transversal, "Jacobian of (q, k) has rank 2".into()));
        checks.push(Check::new("no-other-singular-sample", smooth_on_y, "grad F nonzero at samples".into()));
        Ok(ValidationReport { checks })
    }

    /// Primes `p > min` of good reduction for this fourfold.
    pub fn good_primes(&self, min: u64, count: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let mut p = min + 1;
        while out.len() < count {
            if is_prime(p) && self.reduces_well(p) {
                out.push(p);
            }
            p += 1;
        }
        out
    }

    fn reduces_well(&self, p: u64) -> bool {
        let (Ok(q), Ok(_)) = (self.q.reduce_mod_p(p), self.k.reduce_mod_p(p)) else {
            return false;
        };
        if quadratic_rank_of(&q) != self.expected_q_rank() {
            return false;
        }
        match self.vertex() {
            Some(v) => {
                let vp: Vec<FieldElement> = v.iter().map(|c| c.reduce_mod_p(p).unwrap()).collect();
                !self.k.reduce_mod_p(p).unwrap().eval(&vp).unwrap().is_zero()
            }
            None => true,
        }
    }

    /// Searches random planes of `{x0 = 0}` over several `F_p` for singular
    /// points of the surface.
    pub fn probe_smoothness(&self, seed: u64, probes: usize, primes: &[u64]) -> Result<SmoothnessProbe, FourfoldError> {
        let mut points = 0usize;
        let mut singular = Vec::new();
        let per_prime = probes.div_ceil(primes.len().max(1));
        for &p in primes {
            let q = ModPoly::reduce(&self.q, p)?;
            let k = ModPoly::reduce(&self.k, p)?;
            let dq: Vec<ModPoly> = (1..6).map(|i| q.partial(i)).collect();
            let dk: Vec<ModPoly> = (1..6).map(|i| k.partial(i)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
            for _ in 0..per_prime {
                let basis = loop {
                    let b: [Vec<u64>; 3] = std::array::from_fn(|_| {
                        let mut v = vec![0u64];
                        v.extend((0..5).map(|_| rng.gen_range(0..p)));
                        v
                    });
                    if modp::rank_mod(b.to_vec(), p) == 3 {
                        break b;
                    }
                };
                let qt = TernaryForm::from_restriction(&q, &basis);
                let kt = TernaryForm::from_restriction(&k, &basis);
                for t in plane_zeros(&qt, &kt, p) {
                    let x: Vec<u64> = (0..6)
                        .map(|j| (0..3).fold(0, |acc, i| (acc + field::mul_mod(t[i], basis[i][j], p)) % p))
                        .collect();
                    points += 1;
                    let jac = vec![
                        dq.iter().map(|d| d.eval(&x)).collect::<Vec<_>>(),
                        dk.iter().map(|d| d.eval(&x)).collect::<Vec<_>>(),
                    ];
                    if modp::rank_mod(jac, p) < 2 {
                        singular.push((p, x));
                    }
                }
            }
        }
        Ok(SmoothnessProbe { primes: primes.to_vec(), planes: per_prime * primes.len(), points, singular })
    }

    /// Exhaustive search for lines on the surface over small prime fields.
    /// A rational line reduces to a line modulo every prime, so an empty
    /// search at one prime rules out rational lines.
    pub fn bounded_line_search(&self, primes: &[u64]) -> Result<LineSearch, FourfoldError> {
        let mut tried = Vec::new();
        let mut last = None;
        for &p in primes {
            if !self.reduces_well(p) {
                continue;
            }
            tried.push(p);
            let q = ModPoly::reduce(&self.q, p)?;
            let k = ModPoly::reduce(&self.k, p)?;
            let pts = sigma_points_mod(&q, &k, p);
            let mut found = None;
            'outer: for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let (a, b) = (&pts[i], &pts[j]);
                    let on = |t: u64| {
                        let x: Vec<u64> = a.iter().zip(b).map(|(u, v)| (u + field::mul_mod(t, *v, p)) % p).collect();
                        q.eval(&x) == 0 && k.eval(&x) == 0
                    };
                    if on(1) && on(2) && on(3) {
                        found = Some((a.clone(), b.clone()));
                        break 'outer;
                    }
                }
            }
            match found {
                None => return Ok(LineSearch { primes: tried, line_mod_p: None, certified_free: true }),
                Some((a, b)) => last = Some((p, a, b)),
            }
        }
        Ok(LineSearch { primes: tried, line_mod_p: last, certified_free: false })
    }
}

/// Zeros of a conic and a cubic on `P^2(F_p)`.
fn plane_zeros(qt: &TernaryForm, kt: &TernaryForm, p: u64) -> Vec<[u64; 3]> {
    let mut out = Vec::new();
    let push_roots = |x0: u64, x1: u64, out: &mut Vec<[u64; 3]>| {
        let [a, b, c] = qt.as_quadratic_in_last(x0, x1);
        let ws: Vec<u64> = match modp::quadratic_roots(a, b, c, p) {
            Some(r) => r,
            None => (0..p).collect(),
        };
        for w in ws {
            let t = [x0, x1, w];
            if kt.eval(t) == 0 {
                out.push(t);
            }
        }
    };
    for u in 0..p {
        push_roots(1, u, &mut out);
    }
    push_roots(0, 1, &mut out);
    if qt.eval([0, 0, 1]) == 0 && kt.eval([0, 0, 1]) == 0 {
        out.push([0, 0, 1]);
    }
    out
}

/// All points of the surface over `F_p`, normalized.
pub fn sigma_points_mod(q: &ModPoly, k: &ModPoly, p: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    // chart by the first nonzero coordinate among x1..x4, then solve for x5
    let mut prefix = [0u64; 4];
    for lead in 0..4 {
        let free = 3 - lead;
        let total = p.pow(free as u32);
        for idx in 0..total {
            prefix.iter_mut().for_each(|x| *x = 0);
            prefix[lead] = 1;
            let mut r = idx;
            for j in lead + 1..4 {
                prefix[j] = r % p;
                r /= p;
            }
            let mut coeffs = [0u64; 3];
            // q(prefix, t) as a quadratic in t
            for t in 0..3u64 {
                let mut x = vec![0u64];
                x.extend(prefix.iter().copied());
                x.push(t);
                coeffs[t as usize] = q.eval(&x);
            }
            // interpolate a t^2 + b t + c from values at 0, 1, 2
            let c = coeffs[0];
            let inv2 = field::inv_mod(2, p).unwrap();
            let a = field::mul_mod((coeffs[2] + 2 * p + c - 2 * coeffs[1] % p) % p, inv2, p);
            let b = (coeffs[1] + 2 * p - a - c) % p;
            let roots = modp::quadratic_roots(a, b, c, p).unwrap_or_else(|| (0..p).collect());
            for t in roots {
                let mut x = vec![0u64];
                x.extend(prefix.iter().copied());
                x.push(t);
                if k.eval(&x) == 0 {
                    out.push(x);
                }
            }
        }
    }
    let e5 = vec![0, 0, 0, 0, 0, 1];
    if q.eval(&e5) == 0 && k.eval(&e5) == 0 {
        out.push(e5);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothnessProbe {
    pub primes: Vec<u64>,
    pub planes: usize,
    pub points: usize,
    pub singular: Vec<(u64, Vec<u64>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineSearch {
    pub primes: Vec<u64>,
    pub line_mod_p: Option<(u64, Vec<u64>, Vec<u64>)>,
    /// An empty search at some prime rules out rational lines.
    pub certified_free: bool,
}

/// A named fourfold together with the rational surface points it was built
/// through and, optionally, a line on the surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub id: String,
    pub seed: u64,
    pub fourfold: SingularCubicFourfold,
    pub points: Vec<Point>,
    pub line: Option<[Point; 2]>,
}

fn json<T: Serialize + ?Sized>(x: &T) -> String {
    serde_json::to_string(x).expect("serializable")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureParseError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl Fixture {
    pub fn kind(&self) -> FourfoldKind {
        self.fourfold.kind()
    }

    /// Pretty JSON with one monomial per line; stable byte for byte.
    pub fn to_json(&self) -> String {
        let terms = |f: &Poly| -> String {
            let rows: Vec<String> =
                f.terms().map(|(e, c)| format!("    {{\"exp\":{},\"c\":{}}}", json(e), json(c))).collect();
            format!("[\n{}\n  ]", rows.join(",\n"))
        };
        let points = |ps: &[Point]| -> String {
            let rows: Vec<String> = ps.iter().map(|p| format!("    {}", json(p))).collect();
            format!("[\n{}\n  ]", rows.join(",\n"))
        };
        let mut out = String::from("{\n");
        out += &format!("  \"id\": {},\n", json(&self.id));
        out += &format!("  \"kind\": {},\n", json(&self.kind()));
        out += &format!("  \"seed\": {},\n", self.seed);
        out += &format!("  \"q\": {},\n", terms(self.fourfold.q()));
        out += &format!("  \"k\": {},\n", terms(self.fourfold.k()));
        match &self.line {
            Some(l) => {
                out += &format!("  \"points\": {},\n", points(&self.points));
                out += &format!("  \"line\": {}\n", points(l));
            }
            None => out += &format!("  \"points\": {}\n", points(&self.points)),
        }
        out += "}\n";
        out
    }

    pub fn from_json(text: &str) -> Result<Self, FixtureParseError> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| FixtureParseError::Json(e.to_string()))?;
        let obj = raw.as_object().ok_or_else(|| FixtureParseError::Json("top level must be an object".into()))?;
        let field_err = |field: &str, message: String| FixtureParseError::Field { field: field.into(), message };
        let get = |name: &str| obj.get(name).ok_or_else(|| field_err(name, "missing".into()));
        let kind: FourfoldKind =
            serde_json::from_value(get("kind")?.clone()).map_err(|e| field_err("kind", e.to_string()))?;
        let q = Poly::from_records_json(get("q")?, 6).map_err(|m| field_err("q", m))?;
        let k = Poly::from_records_json(get("k")?, 6).map_err(|m| field_err("k", m))?;
        let seed = match obj.get("seed") {
            None => 0,
            Some(v) => v.as_u64().ok_or_else(|| field_err("seed", "expected a nonnegative integer".into()))?,
        };
        let id = match obj.get("id") {
            None => String::new(),
            Some(v) => v.as_str().ok_or_else(|| field_err("id", "expected a string".into()))?.to_string(),
        };
        let points: Vec<Point> = match obj.get("points") {
            None => Vec::new(),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| field_err("points", e.to_string()))?,
        };
        if let Some(bad) = points.iter().find(|p| p.len() != 6) {
            return Err(field_err("points", format!("point with {} coordinates", bad.len())));
        }
        let line = match obj.get("line") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => {
                let rows: Vec<Point> =
                    serde_json::from_value(v.clone()).map_err(|e| field_err("line", e.to_string()))?;
                if rows.len() != 2 || rows.iter().any(|r| r.len() != 6) {
                    return Err(field_err("line", "expected two points with six coordinates".into()));
                }
                Some([rows[0].clone(), rows[1].clone()])
            }
        };
        let fourfold = SingularCubicFourfold::new(kind, q, k).map_err(|e| field_err("q/k", e.to_string()))?;
        Ok(Fixture { id, seed, fourfold, points, line })
    }

    pub fn designed_line(&self) -> Option<ProjectiveLine> {
        self.line.as_ref().map(|[a, b]| ProjectiveLine::from_span(a, b).expect("fixture line"))
    }
}

/// Inputs of [`make_fixture`].
#[derive(Clone, Debug)]
pub struct FixtureRequest {
    pub id: String,
    pub kind: FourfoldKind,
    pub prescribed_points: Vec<Point>,
    /// Pairs `(x, v)` forcing `v` into the tangent space at `x`.
    pub prescribed_tangents: Vec<(Point, Point)>,
    pub want_line_on_sigma: bool,
    pub seed: u64,
}

pub const FIXTURE_POINTS: usize = 12;
const RETRY_BOUND: usize = 8;
/// Number of random finite-field plane probes used when validating.
pub const SMOOTHNESS_PROBES: usize = 1000;

fn monomials(vars: &[usize], degree: u16) -> Vec<Vec<u16>> {
    fn rec(vars: &[usize], d: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if vars.len() == 1 {
            cur[vars[0]] = d;
            out.push(cur.clone());
            cur[vars[0]] = 0;
            return;
        }
        for k in (0..=d).rev() {
            cur[vars[0]] = k;
            rec(&vars[1..], d - k, cur, out);
        }
        cur[vars[0]] = 0;
    }
    let mut out = Vec::new();
    rec(vars, degree, &mut vec![0; 6], &mut out);
    out
}

fn mono_poly(e: &[u16]) -> Poly {
    Poly::monomial(6, e.to_vec(), FieldElement::one())
}

/// Linear conditions on the coefficient vector of a form with the given
/// monomials: vanishing at points, on lines, and tangency.
struct Conditions<'a> {
    monos: &'a [Vec<u16>],
    rows: Vec<Vec<FieldElement>>,
    rhs: Vec<FieldElement>,
}

impl<'a> Conditions<'a> {
    fn new(monos: &'a [Vec<u16>]) -> Self {
        Conditions { monos, rows: Vec::new(), rhs: Vec::new() }
    }

    fn value_at(&mut self, x: &[FieldElement], rhs: FieldElement) {
        self.rows.push(self.monos.iter().map(|m| mono_poly(m).eval(x).unwrap()).collect());
        self.rhs.push(rhs);
    }

    fn derivative(&mut self, x: &[FieldElement], v: &[FieldElement], rhs: FieldElement) {
        self.rows.push(self.monos.iter().map(|m| field::dot(&mono_poly(m).gradient_at(x).unwrap(), v)).collect());
        self.rhs.push(rhs);
    }

    /// All coefficients of the restriction to the line `span(a, b)` vanish.
    fn on_line(&mut self, a: &[FieldElement], b: &[FieldElement]) {
        let line = ProjectiveLine::from_span(a, b).unwrap();
        let restricted: Vec<Poly> = self.monos.iter().map(|m| line.restrict(&mono_poly(m)).unwrap()).collect();
        let d = self.monos[0].iter().sum::<u16>();
        for i in 0..=d {
            let e = vec![i, d - i];
            self.rows.push(restricted.iter().map(|r| r.coeff(&e)).collect());
            self.rhs.push(FieldElement::zero());
        }
    }

    /// A seeded solution: particular solution plus a random integer
    /// combination of the kernel.
    fn solve(&self, rng: &mut ChaCha8Rng) -> Option<Poly> {
        let n = self.monos.len();
        let base =
            if self.rows.is_empty() { vec![FieldElement::zero(); n] } else { linalg::solve(&self.rows, &self.rhs)? };
        let ker = if self.rows.is_empty() {
            linalg::identity(n, &FieldElement::zero())
        } else {
            linalg::kernel(&self.rows, n)
        };
        let mut coeffs = base;
        for v in &ker {
            let c = FieldElement::from_int(rng.gen_range(-3..=3));
            coeffs = field::add_vec(&coeffs, &field::scale_vec(&c, v));
        }
        let p = Poly::from_terms(6, self.monos.iter().cloned().zip(coeffs));
        (!p.is_zero()).then_some(p)
    }
}

fn random_point(rng: &mut ChaCha8Rng, vars: &[usize]) -> Point {
    loop {
        let mut x = vec![FieldElement::zero(); 6];
        for &v in vars {
            x[v] = FieldElement::from_int(rng.gen_range(-3..=3));
        }
        if !field::is_zero_vec(&x) {
            return x;
        }
    }
}

fn push_distinct(points: &mut Vec<Point>, x: Point) -> bool {
    if field::is_zero_vec(&x) || points.iter().any(|p| field::proportional(p, &x)) {
        return false;
    }
    points.push(x);
    true
}

/// Builds a validated fourfold through the requested points.
pub fn make_fixture(req: &FixtureRequest) -> Result<Fixture, FourfoldError> {
    if req.prescribed_points.len() > FIXTURE_POINTS {
        return Err(FourfoldError::Malformed(format!("at most {FIXTURE_POINTS} prescribed points")));
    }
    for p in &req.prescribed_points {
        if p.len() != 6 || !p[0].is_zero() || field::is_zero_vec(p) {
            return Err(FourfoldError::Malformed("prescribed points must lie in {x0 = 0}".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut last = String::from("none");
    for _ in 0..RETRY_BOUND {
        let attempt = match req.kind {
            FourfoldKind::Nodal => nodal_attempt(req, &mut rng),
            FourfoldKind::CuspidalCyclic => cuspidal_attempt(req, &mut rng),
        };
        let Some((y, points, line)) = attempt else {
            last = "linear system".into();
            continue;
        };
        match check_fixture(&y, &points, line.as_ref(), req.seed) {
            Ok(()) => {
                return Ok(Fixture { id: req.id.clone(), seed: req.seed, fourfold: y, points, line });
            }
            Err(check) => last = check,
        }
    }
    Err(FourfoldError::FixtureFailed { attempts: RETRY_BOUND, check: last })
}

fn check_fixture(
    y: &SingularCubicFourfold,
    points: &[Point],
    line: Option<&[Point; 2]>,
    seed: u64,
) -> Result<(), String> {
    let report = y.validate(points).map_err(|e| e.to_string())?;
    if let Some(c) = report.first_failure() {
        return Err(c.name.clone());
    }
    let primes = y.good_primes(1000, 3);
    let probe = y.probe_smoothness(seed, SMOOTHNESS_PROBES, &primes).map_err(|e| e.to_string())?;
    if !probe.singular.is_empty() {
        return Err("sigma-smooth-probe".into());
    }
    if let Some([a, b]) = line {
        let l = ProjectiveLine::from_span(a, b).map_err(|e| e.to_string())?;
        if !y.contains_plane_candidate(&l).map_err(|e| e.to_string())? {
            return Err("designed-line".into());
        }
    }
    Ok(())
}

type Attempt = Option<(SingularCubicFourfold, Vec<Point>, Option<[Point; 2]>)>;

fn nodal_attempt(req: &FixtureRequest, rng: &mut ChaCha8Rng) -> Attempt {
    let h0 = [1, 2, 3, 4, 5];
    let mut points = Vec::new();
    for p in &req.prescribed_points {
        push_distinct(&mut points, p.clone());
    }
    let line = if req.want_line_on_sigma {
        let a = random_point(rng, &h0);
        let b = loop {
            let b = random_point(rng, &h0);
            if !field::proportional(&a, &b) {
                break b;
            }
        };
        push_distinct(&mut points, a.clone());
        push_distinct(&mut points, b.clone());
        Some([a, b])
    } else {
        None
    };
    while points.len() < FIXTURE_POINTS {
        let x = random_point(rng, &h0);
        push_distinct(&mut points, x);
    }
    let qm = monomials(&h0, 2);
    let km = monomials(&h0, 3);
    let mut qc = Conditions::new(&qm);
    let mut kc = Conditions::new(&km);
    for x in &points {
        qc.value_at(x, FieldElement::zero());
        kc.value_at(x, FieldElement::zero());
    }
    for (x, v) in &req.prescribed_tangents {
        qc.derivative(x, v, FieldElement::zero());
        kc.derivative(x, v, FieldElement::zero());
    }
    if let Some([a, b]) = &line {
        qc.on_line(a, b);
        kc.on_line(a, b);
    }
    let q = qc.solve(rng)?.primitive_integer();
    if quadratic_rank_of(&q) != 5 {
        return None;
    }
    let k = kc.solve(rng)?.primitive_integer();
    let y = SingularCubicFourfold::new(FourfoldKind::Nodal, q, k).ok()?;
    Some((y, points, line))
}

/// Rational points of `{q = 0}` obtained by intersecting lines through a
/// known point `base` with the quadric.
fn quadric_points(q: &Poly, base: &Point, rng: &mut ChaCha8Rng, vars: &[usize], count: usize) -> Vec<Point> {
    let mut out = Vec::new();
    let mut guard = 0;
    while out.len() < count && guard < 200 * count {
        guard += 1;
        let d = random_point(rng, vars);
        let qd = q.eval(&d).unwrap();
        if qd.is_zero() {
            continue;
        }
        let b = crate::poly::bilinear_value(q, base, &d);
        let t = -(&b * &FieldElement::from_int(2)) * qd.inv().unwrap();
        if t.is_zero() {
            continue;
        }
        let x = field::add_vec(base, &field::scale_vec(&t, &d));
        let x = field::normalize_projective(&x).unwrap();
        let denom_lcm = x
            .iter()
            .filter_map(|c| c.as_rational().map(|r| r.denom().clone()))
            .fold(num::BigInt::from(1), num::integer::lcm);
        let x = field::scale_vec(&FieldElement::Rational(num::BigRational::from_integer(denom_lcm)), &x);
        if !out.iter().any(|p: &Point| field::proportional(p, &x)) && !field::proportional(&x, base) {
            out.push(x);
        }
    }
    out
}

fn cuspidal_attempt(req: &FixtureRequest, rng: &mut ChaCha8Rng) -> Attempt {
    let base_vars = [1, 2, 3, 4];
    let mut fixed: Vec<Point> = Vec::new();
    for p in &req.prescribed_points {
        push_distinct(&mut fixed, p.clone());
    }
    let line = if req.want_line_on_sigma {
        let a = random_point(rng, &base_vars);
        let b = loop {
            let b = random_point(rng, &base_vars);
            if !field::proportional(&a, &b) {
                break b;
            }
        };
        Some([a, b])
    } else {
        None
    };
    let proj = |x: &Point| -> Point {
        let mut y = x.clone();
        y[5] = FieldElement::zero();
        y
    };
    let qm = monomials(&base_vars, 2);
    let mut qc = Conditions::new(&qm);
    let base = match fixed.first() {
        Some(p) => proj(p),
        None => random_point(rng, &base_vars),
    };
    qc.value_at(&base, FieldElement::zero());
    for x in fixed.iter().skip(1) {
        qc.value_at(&proj(x), FieldElement::zero());
    }
    for (x, v) in &req.prescribed_tangents {
        qc.derivative(&proj(x), &proj(v), FieldElement::zero());
    }
    if let Some([a, b]) = &line {
        qc.on_line(a, b);
    }
    let q = qc.solve(rng)?.primitive_integer();
    if quadratic_rank_of(&q) != 4 {
        return None;
    }
    let mut points = fixed.clone();
    if let Some([a, b]) = &line {
        push_distinct(&mut points, a.clone());
        push_distinct(&mut points, b.clone());
    }
    if points.is_empty() {
        points.push(base.clone());
    }
    let needed = FIXTURE_POINTS.saturating_sub(points.len());
    // at least three points on {x5 = 0}
    let mut on_curve = points.iter().filter(|p| p[5].is_zero()).count();
    for mut x in quadric_points(&q, &base, rng, &base_vars, needed) {
        if on_curve < 4 {
            on_curve += 1;
        } else {
            x[5] = FieldElement::from_int(*[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
        }
        push_distinct(&mut points, x);
    }
    if points.len() < FIXTURE_POINTS.min(needed + fixed.len()) {
        return None;
    }
    let gm = monomials(&base_vars, 3);
    let mut gc = Conditions::new(&gm);
    for x in &points {
        gc.value_at(&proj(x), -x[5].pow(3));
    }
    for (x, v) in &req.prescribed_tangents {
        let rhs = -(FieldElement::from_int(3) * x[5].pow(2) * v[5].clone());
        gc.derivative(&proj(x), &proj(v), rhs);
    }
    if let Some([a, b]) = &line {
        gc.on_line(a, b);
    }
    let g = gc.solve(rng)?;
    let k = &g + &x5_cubed();
    let y = SingularCubicFourfold::new(FourfoldKind::CuspidalCyclic, q, k).ok()?;
    Some((y, points, line))
}

pub fn e1() -> Point {
    field::int_vec(&[0, 1, 0, 0, 0, 0])
}

/// Requests for the four shipped fixtures.
pub fn corpus_requests(seed: u64) -> Vec<FixtureRequest> {
    let req = |id: &str, kind, want_line| FixtureRequest {
        id: id.to_string(),
        kind,
        prescribed_points: vec![e1()],
        prescribed_tangents: Vec::new(),
        want_line_on_sigma: want_line,
        seed,
    };
    vec![
        req("FX-N1", FourfoldKind::Nodal, false),
        req("FX-N2", FourfoldKind::Nodal, true),
        req("FX-C1", FourfoldKind::CuspidalCyclic, false),
        req("FX-C2", FourfoldKind::CuspidalCyclic, true),
    ]
}

/// Regenerates the fixture corpus; with seed 0 this reproduces the shipped
/// files byte for byte.
pub fn regenerate_fixtures(seed: u64) -> Result<Vec<Fixture>, FourfoldError> {
    corpus_requests(seed).iter().map(make_fixture).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int_vec;

    fn x(i: usize) -> Poly {
        Poly::var(6, i)
    }

    #[test]
    fn degenerate_q_rejected() {
        let q = &(&x(1) * &x(2)) + &(&x(3) * &x(4));
        let k = x(5).pow(3);
        let y = SingularCubicFourfold::new(FourfoldKind::Nodal, q, k).unwrap();
        assert_eq!(y.validate(&[]), Err(FourfoldError::QDegenerate { rank: 4, expected: 5 }));
    }

    #[test]
    fn cuspidal_vertex_check() {
        let q = &(&x(1) * &x(2)) + &(&x(3) * &x(4));
        let k = &x(1).pow(3) + &x(5).pow(3);
        let y = SingularCubicFourfold::new(FourfoldKind::CuspidalCyclic, q, k).unwrap();
        let r = y.validate(&[]).unwrap();
        assert!(r.checks.iter().any(|c| c.name == "vertex-off-cubic" && c.passed));
        assert!(!y.sigma_membership(&y.vertex().unwrap()));
        let bad = SingularCubicFourfold::new(FourfoldKind::CuspidalCyclic, &x(1) * &x(5), x(5).pow(3));
        assert!(bad.is_err());
    }

    #[test]
    fn prescribed_points_land_on_sigma() {
        let req = FixtureRequest {
            id: "T".into(),
            kind: FourfoldKind::Nodal,
            prescribed_points: vec![e1(), int_vec(&[0, 0, 1, 0, 0, 0])],
            prescribed_tangents: Vec::new(),
            want_line_on_sigma: false,
            seed: 5,
        };
        let f = make_fixture(&req).unwrap();
        assert!(f.fourfold.sigma_membership(&e1()));
        assert!(f.fourfold.sigma_membership(&int_vec(&[0, 0, 1, 0, 0, 0])));
        assert!(!f.fourfold.sigma_membership(&int_vec(&[0, 1, 1, 1, 1, 1])));
        let l = f.fourfold.line_through_node(&e1()).unwrap();
        assert!(l.restrict(&f.fourfold.equation()).unwrap().is_zero());
    }

    #[test]
    fn too_many_points_rejected() {
        let req = FixtureRequest {
            id: "T".into(),
            kind: FourfoldKind::Nodal,
            prescribed_points: vec![e1(); 13],
            prescribed_tangents: Vec::new(),
            want_line_on_sigma: false,
            seed: 0,
        };
        assert!(matches!(make_fixture(&req), Err(FourfoldError::Malformed(_))));
    }

    #[test]
    fn fixture_json_errors_name_the_field() {
        let err = Fixture::from_json(r#"{"kind":"nodal","q":[{"exp":[0,2],"c":"1"}],"k":[]}"#).unwrap_err();
        assert!(matches!(err, FixtureParseError::Field { ref field, .. } if field == "q"));
        let err = Fixture::from_json(r#"{"kind":"weird","q":[],"k":[]}"#).unwrap_err();
        assert!(matches!(err, FixtureParseError::Field { ref field, .. } if field == "kind"));
        assert!(matches!(Fixture::from_json("{"), Err(FixtureParseError::Json(_))));
    }
}
