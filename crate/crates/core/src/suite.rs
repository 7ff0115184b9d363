//! Verification suites over a fixture and the versioned JSON report.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::fanomaps::{self, FibreType, PhiInverseOutcome, PhiOutcome};
use crate::field::{self, FieldElement, FieldTag};
use crate::fourfold::{Fixture, FixtureParseError, FourfoldKind, SingularCubicFourfold, SMOOTHNESS_PROBES};
use crate::lattice::{self, DivisorReport, IntegralLattice, IntersectionTable, IsometryOutcome, NSClass};
use crate::lines::{self, LengthTwoScheme, PluckerChart, ProjectiveLine, CHART_VARS};
use crate::localmodel::{self, AdaptedFrame, TransversalType};
use crate::poly::Poly;
use crate::symmetry::{self, SymmetryReport};

pub const REPORT_SCHEMA: &str = "fano-lines-report/1";

/// Every check: name, traceability anchor, one-line statement.
pub const CHECKS: &[(&str, &str, &str)] = &[
    ("validate.fourfold", "T01", "singular point, quadric rank, vertex off the cubic, transversal surface samples"),
    ("validate.smoothness", "T02", "no singular surface point found on random planes over three primes"),
    ("validate.designed-line", "T03", "the designed line lies on the surface and spans a plane in Y"),
    ("phi.roundtrip", "T04", "phi_inverse(phi(xi)) = xi exactly"),
    ("phi.membership", "T05", "phi(xi) lies in Y: all four coefficients of F on the line vanish"),
    ("phi.trident", "T06", "phi(xi) passes through the singular point iff xi is a trident scheme"),
    ("phi.plane-in-y", "T07", "a line of the surface spanning a plane in Y gives the PlaneInY outcome"),
    ("local.chart-routes", "T08", "chart equations from the decomposition equal the direct restriction of F"),
    ("local.chart-biconditional", "T09", "the chart equations vanish at a chart point iff the line lies in Y"),
    ("local.jacobian-sigma", "T10", "Jacobian at a surface point: block pattern and rank 2"),
    ("local.jacobian-off-sigma", "T11", "Jacobian at lines of Y away from the singular point: rank 4"),
    ("local.transversal-type", "T12", "transversal A1 (nodal) or A2 (cuspidal) singularity along the surface"),
    (
        "local.fibre-geometry",
        "T13",
        "fibre of the blowup: smooth conic (nodal) or two lines through (0:0:0:1) (cuspidal)",
    ),
    ("local.residual-conic", "T14", "cuspidal residual conic at a = (0:0:0:1) equals t2^2"),
    ("local.blowup-fibre", "T15", "exceptional fibre of the blowup chart equals {h1 = q1 = 0}"),
    ("local.blowup-pullback", "T16", "chart equations pull back to the blowup chart with the expected powers of p15"),
    ("local.togliatti", "T17", "quintic determinant: degree 5, singular along {h1 = q1 = 0}"),
    (
        "divisors.intersection-numbers",
        "T18",
        "Gamma.h = 6, Gamma.delta = 0, Gamma.Psi = 6, Lambda.h = 0, Lambda.Psi = 2",
    ),
    ("divisors.class", "T19", "the trident divisor has class h - 2 delta"),
    ("divisors.rays", "T20", "the rays orthogonal to delta and to Psi are h and 2h - 3 delta"),
    ("divisors.lattice-isometry", "T21", "U(3) + <-2> and <6> + A2(-1) are isometric"),
    ("divisors.bbf-constants", "T22", "<h, h> = 6, <delta, delta> = -2, <h, delta> = 0"),
    ("symmetry.phi-equivariance", "T23", "phi(tau xi) = sigma(phi(xi)) over Q(zeta3)"),
    ("symmetry.blowup-action", "T24", "the action on the chart and the blowup chart, and its eigenspaces"),
    ("symmetry.orders", "T25", "every level action has order three"),
    (
        "symmetry.fixed-locus",
        "T26",
        "fixed surface points are those with x5 = 0; the vertex is fixed and off the surface",
    ),
];

pub fn anchor_of(name: &str) -> &'static str {
    CHECKS.iter().find(|c| c.0 == name).map(|c| c.1).unwrap_or("-")
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    Parse { path: String, source: FixtureParseError },
    #[error("unknown value `{value}` for {what}")]
    UnknownValue { what: &'static str, value: String },
}

pub fn load_fixture(path: &str) -> Result<Fixture, SuiteError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| SuiteError::Io { path: path.into(), message: e.to_string() })?;
    Fixture::from_json(&text).map_err(|source| SuiteError::Parse { path: path.into(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Validate,
    Phi,
    Local,
    Divisors,
    Symmetry,
    All,
}

impl Suite {
    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Validate => "validate",
            Suite::Phi => "phi",
            Suite::Local => "local",
            Suite::Divisors => "divisors",
            Suite::Symmetry => "symmetry",
            Suite::All => "all",
        }
    }

    fn includes(&self, group: &str) -> bool {
        *self == Suite::All || self.as_str() == group
    }
}

impl FromStr for Suite {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, SuiteError> {
        [Suite::Validate, Suite::Phi, Suite::Local, Suite::Divisors, Suite::Symmetry, Suite::All]
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| SuiteError::UnknownValue { what: "suite", value: s.into() })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficient field of the sampled schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SampleField {
    #[serde(rename = "q")]
    Rational,
    #[serde(rename = "q_sqrt_d")]
    QuadraticReal,
    #[serde(rename = "q_zeta3")]
    Zeta3,
}

impl SampleField {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleField::Rational => "q",
            SampleField::QuadraticReal => "q_sqrt_d",
            SampleField::Zeta3 => "q_zeta3",
        }
    }
}

impl FromStr for SampleField {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, SuiteError> {
        [SampleField::Rational, SampleField::QuadraticReal, SampleField::Zeta3]
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| SuiteError::UnknownValue { what: "field", value: s.into() })
    }
}

impl fmt::Display for SampleField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: usize,
    /// Finite-field oracle primes; chosen from the fixture when `None`.
    pub primes: Option<Vec<u64>>,
    pub field: SampleField,
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, samples: 100, primes: None, field: SampleField::Rational, timings: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Documented special behaviour, counted as a pass.
    Expected,
    Skipped,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Expected => "EXPECTED",
            Status::Skipped => "SKIP",
        }
    }

    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: &'static str,
    pub status: Status,
    pub witness: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub expected: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub fixture: String,
    pub kind: FourfoldKind,
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub field: SampleField,
    pub primes: Vec<u64>,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn human_summary(&self) -> String {
        let mut out = format!(
            "{} [{}] suite={} seed={} samples={}\n",
            self.fixture,
            self.kind.as_str(),
            self.suite,
            self.seed,
            self.samples
        );
        for c in &self.checks {
            out += &format!("  {:<8} {:<30} {}", c.status.label(), c.name, c.anchor);
            if let Some(ms) = c.runtime_ms {
                out += &format!("  {ms} ms");
            }
            out.push('\n');
        }
        let s = &self.summary;
        out += &format!("{} pass, {} fail, {} expected, {} skipped\n", s.pass, s.fail, s.expected, s.skipped);
        out
    }
}

type Outcome = Result<(Status, Value), String>;

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn skipped(reason: &str) -> Outcome {
    Ok((Status::Skipped, json!({ "reason": reason })))
}

/// Rational samples with their `phi` outcomes.
struct PhiData {
    field: SampleField,
    samples: Vec<(LengthTwoScheme, PhiOutcome)>,
    /// Samples whose line passes through the singular point.
    tridents: Vec<(LengthTwoScheme, PhiOutcome)>,
    /// Samples spanning a plane contained in `Y` with the singular point.
    planes: Vec<(LengthTwoScheme, PhiOutcome)>,
}

struct Ctx<'a> {
    fx: &'a Fixture,
    opts: &'a SuiteOptions,
    primes: Vec<u64>,
    phi: OnceLock<Result<Option<PhiData>, String>>,
    frames: OnceLock<Result<Vec<AdaptedFrame>, String>>,
    divisors: OnceLock<Result<DivisorReport, String>>,
    rational_lines: OnceLock<Result<Vec<ProjectiveLine>, String>>,
}

impl<'a> Ctx<'a> {
    fn y(&self) -> &SingularCubicFourfold {
        &self.fx.fourfold
    }

    fn nodal(&self) -> bool {
        self.fx.kind() == FourfoldKind::Nodal
    }

    fn through_node(line: &ProjectiveLine) -> bool {
        line.contains_point(&SingularCubicFourfold::singular_point())
    }

    fn phi_data(&self) -> Result<Option<&PhiData>, String> {
        self.phi.get_or_init(|| self.build_phi_data()).as_ref().map(Option::as_ref).map_err(Clone::clone)
    }

    fn build_phi_data(&self) -> Result<Option<PhiData>, String> {
        let (y, pts, n) = (self.y(), &self.fx.points, self.opts.samples);
        let mut samples = Vec::new();
        let mut tridents = Vec::new();
        let mut planes = Vec::new();
        let mut push = |xi: LengthTwoScheme| -> Result<bool, String> {
            let out = fanomaps::phi(y, &xi).map_err(err)?;
            match out.line() {
                None => planes.push((xi, out)),
                Some(l) if Self::through_node(l) => tridents.push((xi, out)),
                Some(_) => {
                    samples.push((xi, out));
                    return Ok(true);
                }
            }
            Ok(false)
        };
        match self.opts.field {
            SampleField::Rational => {
                let target_nonreduced = n.div_ceil(4);
                let (mut red, mut nonred) = (0, 0);
                let mut i = 0u64;
                while red + nonred < n && i < 20 * n as u64 + 100 {
                    let reduced = red < n - target_nonreduced;
                    let s = self.opts.seed.wrapping_mul(1_000_003).wrapping_add(i);
                    i += 1;
                    let xi = lines::random_length_two(y, pts, s, reduced).map_err(err)?;
                    if push(xi)? {
                        if reduced {
                            red += 1;
                        } else {
                            nonred += 1;
                        }
                    }
                }
            }
            SampleField::QuadraticReal => {
                for xi in fanomaps::quadratic_samples(y, pts, n).map_err(err)? {
                    push(xi)?;
                }
            }
            SampleField::Zeta3 => {
                if self.nodal() {
                    return Ok(None);
                }
                for xi in symmetry::zeta_samples(y, pts, n, self.opts.seed).map_err(err)? {
                    push(xi)?;
                }
            }
        }
        Ok(Some(PhiData { field: self.opts.field, samples, tridents, planes }))
    }

    fn frames(&self) -> Result<&[AdaptedFrame], String> {
        self.frames
            .get_or_init(|| self.fx.points.iter().map(|s| localmodel::adapt_frame(self.y(), s).map_err(err)).collect())
            .as_deref()
            .map_err(Clone::clone)
    }

    fn divisor_report(&self) -> Result<&DivisorReport, String> {
        self.divisors
            .get_or_init(|| {
                lattice::divisor_suite(self.y(), &self.fx.points, self.opts.seed, 2, &self.primes).map_err(err)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Lines of `Y` off the singular point from rational samples.
    fn rational_lines(&self) -> Result<&[ProjectiveLine], String> {
        self.rational_lines
            .get_or_init(|| {
                let n = self.opts.samples.max(40);
                let schemes =
                    fanomaps::sample_schemes(self.y(), &self.fx.points, self.opts.seed ^ 0x5eed, n / 2, n / 4)
                        .map_err(err)?;
                let mut out = Vec::new();
                for xi in schemes {
                    if let PhiOutcome::Line { line } = fanomaps::phi(self.y(), &xi).map_err(err)? {
                        if !Self::through_node(&line) {
                            out.push(line);
                        }
                    }
                }
                Ok(out)
            })
            .as_deref()
            .map_err(Clone::clone)
    }
}

type CheckFn = fn(&Ctx) -> Outcome;

const GROUPS: &[(&str, &[(&str, CheckFn)])] = &[
    (
        "validate",
        &[
            ("validate.fourfold", check_validate),
            ("validate.smoothness", check_smoothness),
            ("validate.designed-line", check_designed_line),
        ],
    ),
    (
        "phi",
        &[
            ("phi.roundtrip", check_roundtrip),
            ("phi.membership", check_membership),
            ("phi.trident", check_trident),
            ("phi.plane-in-y", check_plane_in_y),
        ],
    ),
    (
        "local",
        &[
            ("local.chart-routes", check_chart_routes),
            ("local.chart-biconditional", check_biconditional),
            ("local.jacobian-sigma", check_jacobian_sigma),
            ("local.jacobian-off-sigma", check_jacobian_off_sigma),
            ("local.transversal-type", check_transversal),
            ("local.fibre-geometry", check_fibre),
            ("local.residual-conic", check_residual_conic),
            ("local.blowup-fibre", check_blowup_fibre),
            ("local.blowup-pullback", check_blowup_pullback),
            ("local.togliatti", check_togliatti),
        ],
    ),
    (
        "divisors",
        &[
            ("divisors.intersection-numbers", check_intersections),
            ("divisors.class", check_class),
            ("divisors.rays", check_rays),
            ("divisors.lattice-isometry", check_isometry),
            ("divisors.bbf-constants", check_bbf),
        ],
    ),
    (
        "symmetry",
        &[
            ("symmetry.phi-equivariance", check_sym_phi),
            ("symmetry.blowup-action", check_sym_blowup),
            ("symmetry.orders", check_sym_orders),
            ("symmetry.fixed-locus", check_sym_fixed),
        ],
    ),
];

/// Runs the checks of `suite` on a fixture. Checks run concurrently; the
/// report lists them sorted by name.
pub fn run_suite(fx: &Fixture, suite: Suite, opts: &SuiteOptions) -> Report {
    let primes = opts.primes.clone().unwrap_or_else(|| fx.fourfold.good_primes(1000, 3));
    let ctx = Ctx {
        fx,
        opts,
        primes: primes.clone(),
        phi: OnceLock::new(),
        frames: OnceLock::new(),
        divisors: OnceLock::new(),
        rational_lines: OnceLock::new(),
    };
    let selected: Vec<(&str, CheckFn)> =
        GROUPS.iter().filter(|(g, _)| suite.includes(g)).flat_map(|(_, checks)| checks.iter().copied()).collect();
    let mut checks: Vec<CheckRecord> = selected
        .par_iter()
        .map(|&(name, f)| {
            let start = Instant::now();
            let (status, witness) = match f(&ctx) {
                Ok(x) => x,
                Err(e) => (Status::Fail, json!({ "error": e })),
            };
            let runtime_ms = opts.timings.then(|| start.elapsed().as_millis() as u64);
            CheckRecord { name: name.to_string(), anchor: anchor_of(name), status, witness, runtime_ms }
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let mut summary = Summary::default();
    for c in &checks {
        match c.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Expected => summary.expected += 1,
            Status::Skipped => summary.skipped += 1,
        }
    }
    Report {
        schema: REPORT_SCHEMA,
        fixture: fx.id.clone(),
        kind: fx.kind(),
        suite,
        seed: opts.seed,
        samples: opts.samples,
        field: opts.field,
        primes,
        checks,
        summary,
    }
}

fn show(v: &[FieldElement]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

// ---- validate

fn check_validate(c: &Ctx) -> Outcome {
    let rep = c.y().validate(&c.fx.points).map_err(err)?;
    Ok((Status::of(rep.passed()), json!({ "points": c.fx.points.len(), "checks": rep.checks })))
}

fn check_smoothness(c: &Ctx) -> Outcome {
    let probe = c.y().probe_smoothness(c.fx.seed, SMOOTHNESS_PROBES, &c.primes).map_err(err)?;
    Ok((Status::of(probe.singular.is_empty() && probe.points > 0), json!(probe)))
}

fn check_designed_line(c: &Ctx) -> Outcome {
    let Some(line) = c.fx.designed_line() else {
        return skipped("fixture has no designed line");
    };
    let on_sigma = c.fx.line.as_ref().unwrap().iter().all(|p| c.y().sigma_membership(p));
    let plane = c.y().contains_plane_candidate(&line).map_err(err)?;
    Ok((Status::of(on_sigma && plane), json!({ "line": line, "points_on_sigma": on_sigma, "plane_in_y": plane })))
}

// ---- phi

fn count_kinds(samples: &[(LengthTwoScheme, PhiOutcome)]) -> (usize, usize) {
    let red = samples.iter().filter(|(xi, _)| xi.is_reduced()).count();
    (red, samples.len() - red)
}

fn irrational_count(samples: &[(LengthTwoScheme, PhiOutcome)]) -> usize {
    samples
        .iter()
        .filter(|(xi, _)| {
            let coords: Vec<&FieldElement> = match xi {
                LengthTwoScheme::Reduced(a, b) => a.iter().chain(b).collect(),
                LengthTwoScheme::Nonreduced { point, tangent } => point.iter().chain(tangent).collect(),
            };
            coords.iter().any(|x| x.tag() != FieldTag::Rational)
        })
        .count()
}

fn check_roundtrip(c: &Ctx) -> Outcome {
    let Some(d) = c.phi_data()? else {
        return skipped("q_zeta3 samples need a cuspidal fixture");
    };
    let mut mismatches = Vec::new();
    for (i, (xi, out)) in d.samples.iter().enumerate() {
        let Some(line) = out.line() else {
            continue;
        };
        let back = fanomaps::phi_inverse(c.y(), line).map_err(err)?;
        if back != (PhiInverseOutcome::Scheme { scheme: xi.canonical() }) && mismatches.len() < 5 {
            mismatches.push(json!({ "index": i, "scheme": xi, "line": line, "back": back }));
        }
    }
    let (red, nonred) = count_kinds(&d.samples);
    let n = c.opts.samples;
    let enough = match d.field {
        SampleField::Rational => d.samples.len() >= n && 4 * nonred >= n,
        _ => !d.samples.is_empty(),
    };
    let witness = json!({
        "field": d.field,
        "samples": d.samples.len(),
        "reduced": red,
        "nonreduced": nonred,
        "irrational": irrational_count(&d.samples),
        "tridents_excluded": d.tridents.len(),
        "plane_in_y_excluded": d.planes.len(),
        "mismatches": mismatches,
    });
    Ok((Status::of(enough && mismatches.is_empty()), witness))
}

fn check_membership(c: &Ctx) -> Outcome {
    let Some(d) = c.phi_data()? else {
        return skipped("q_zeta3 samples need a cuspidal fixture");
    };
    let f = c.y().equation();
    let mut bad = Vec::new();
    let mut lines = 0;
    for (xi, out) in d.samples.iter().chain(&d.tridents) {
        if let Some(line) = out.line() {
            lines += 1;
            let r = line.restrict(&f).map_err(err)?;
            let coeffs: Vec<FieldElement> = (0..4u16).map(|i| r.coeff(&[i, 3 - i])).collect();
            let ok = coeffs.iter().all(FieldElement::is_zero)
                && r.is_zero()
                && lines::line_in_y(c.y(), line).map_err(err)?;
            if !ok && bad.len() < 5 {
                bad.push(json!({ "scheme": xi, "line": line, "coefficients": show(&coeffs) }));
            }
        }
    }
    Ok((Status::of(bad.is_empty() && lines > 0), json!({ "lines": lines, "failures": bad })))
}

fn check_trident(c: &Ctx) -> Outcome {
    let Some(d) = c.phi_data()? else {
        return skipped("q_zeta3 samples need a cuspidal fixture");
    };
    let mut bad = 0;
    for (xi, out) in d.samples.iter().chain(&d.tridents) {
        let through = out.line().is_some_and(Ctx::through_node);
        if fanomaps::trident_membership(c.y(), xi).map_err(err)? != through {
            bad += 1;
        }
    }
    let total = d.samples.len() + d.tridents.len();
    let witness = json!({
        "samples": total,
        "tridents": d.tridents.len(),
        "plane_in_y_excluded": d.planes.len(),
        "disagreements": bad,
    });
    Ok((Status::of(bad == 0), witness))
}

fn check_plane_in_y(c: &Ctx) -> Outcome {
    let sampled = c.phi_data()?.map_or(0, |d| d.planes.len());
    let Some([a, b]) = c.fx.line.clone() else {
        if sampled > 0 {
            return Ok((Status::Expected, json!({ "sampled_plane_outcomes": sampled })));
        }
        return skipped("fixture has no designed line");
    };
    let xi = LengthTwoScheme::Reduced(a, b);
    let out = fanomaps::phi(c.y(), &xi).map_err(err)?;
    let status = match out {
        PhiOutcome::PlaneInY { .. } => Status::Expected,
        PhiOutcome::Line { .. } => Status::Fail,
    };
    Ok((status, json!({ "scheme": xi, "outcome": out, "sampled_plane_outcomes": sampled })))
}

// ---- local

fn check_chart_routes(c: &Ctx) -> Outcome {
    let frames = c.frames()?;
    let mut bad = Vec::new();
    for (i, fr) in frames.iter().enumerate() {
        if fr.chart_equations().map_err(err)? != fr.chart_equations_direct().map_err(err)? {
            bad.push(i);
        }
    }
    Ok((Status::of(bad.is_empty()), json!({ "frames": frames.len(), "mismatched_points": bad })))
}

fn random_chart_point(rng: &mut ChaCha8Rng) -> PluckerChart {
    let mut v: Vec<FieldElement> =
        (0..CHART_VARS).map(|_| FieldElement::from_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
    let p1 = v.split_off(4);
    PluckerChart::new(v, p1)
}

fn check_biconditional(c: &Ctx) -> Outcome {
    let frames = c.frames()?;
    let target = (2 * c.opts.samples).max(200);
    let lines_y = c.rational_lines()?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.opts.seed ^ 0xc4a7);
    let (mut total, mut in_y, mut disagreements) = (0usize, 0usize, Vec::new());
    let per_frame = target.div_ceil(frames.len().min(4).max(1));
    for fr in frames.iter().take(4) {
        let eqs = fr.chart_equations().map_err(err)?;
        let mut pts: Vec<PluckerChart> = Vec::new();
        // lines through the singular point and a surface point
        for s in &c.fx.points {
            let cone = ProjectiveLine::from_span(&SingularCubicFourfold::singular_point(), s).map_err(err)?;
            pts.extend(fr.chart_point(&cone).map_err(err)?);
        }
        for l in lines_y {
            pts.extend(fr.chart_point(l).map_err(err)?);
        }
        pts.truncate(per_frame / 2);
        while pts.len() < per_frame {
            pts.push(random_chart_point(&mut rng));
        }
        for p in pts {
            let x = p.coords();
            let vanish = eqs.iter().map(|f| f.eval(&x)).collect::<Result<Vec<_>, _>>().map_err(err)?;
            let vanish = vanish.iter().all(FieldElement::is_zero);
            let line = fr.line_to_ambient(&p.line()).map_err(err)?;
            let direct = lines::line_in_y(c.y(), &line).map_err(err)?;
            total += 1;
            in_y += direct as usize;
            if vanish != direct && disagreements.len() < 5 {
                disagreements.push(json!({ "chart_point": show(&x), "equations_vanish": vanish, "line_in_y": direct }));
            }
        }
    }
    let ok = total >= 200 && in_y > 0 && in_y < total && disagreements.is_empty();
    Ok((
        Status::of(ok),
        json!({ "points": total, "in_y": in_y, "not_in_y": total - in_y, "disagreements": disagreements }),
    ))
}

fn check_jacobian_sigma(c: &Ctx) -> Outcome {
    let frames = c.frames()?;
    let mut ranks = Vec::new();
    let mut pattern = true;
    let mut blocks = Vec::new();
    for fr in frames {
        let j = localmodel::jacobian_at_center(fr).map_err(err)?;
        ranks.push(j.rank);
        pattern &= j.pattern_matches;
        blocks.push([j.p0_block_rank, j.p1_block_rank]);
    }
    let ok = frames.len() >= 5 && pattern && ranks.iter().all(|&r| r == 2);
    let witness = json!({
        "points": frames.len(),
        "required_rank": 2,
        "ranks": ranks,
        "block_pattern": pattern,
        "block_ranks": blocks,
    });
    Ok((Status::of(ok), witness))
}

fn check_jacobian_off_sigma(c: &Ctx) -> Outcome {
    let frames = c.frames()?;
    let mut ranks = Vec::new();
    for (i, l) in c.rational_lines()?.iter().enumerate() {
        let fr = &frames[i % frames.len()];
        if let Some(p) = fr.chart_point(l).map_err(err)? {
            let (_, r) = localmodel::jacobian_at(fr, &p).map_err(err)?;
            ranks.push(r);
        }
        if ranks.len() >= 20.max(c.opts.samples / 4) {
            break;
        }
    }
    let ok = ranks.len() >= 20 && ranks.iter().all(|&r| r == 4);
    Ok((Status::of(ok), json!({ "points": ranks.len(), "ranks": ranks })))
}

fn check_transversal(c: &Ctx) -> Outcome {
    let (want, rank) = if c.nodal() { (TransversalType::A1, 3) } else { (TransversalType::A2, 2) };
    let mut bad = Vec::new();
    let mut cubic = Vec::new();
    let frames = c.frames()?;
    for (i, fr) in frames.iter().enumerate() {
        let v = localmodel::classify_transversal_type(fr).map_err(err)?;
        let mut ok = v.kind == want && v.witness_rank == rank;
        if want == TransversalType::A2 {
            let k = v.cubic_coefficient.clone().filter(|x| !x.is_zero());
            ok &= v.p12_linear_term_zero && k.is_some();
            cubic.push(k.map(|x| x.to_string()).unwrap_or_else(|| "0".into()));
        }
        if !ok {
            bad.push(json!({ "point": i, "type": v.kind, "witness_rank": v.witness_rank }));
        }
    }
    let witness = json!({
        "points": frames.len(),
        "type": want,
        "witness_rank": rank,
        "p15_cubed_coefficients": cubic,
        "failures": bad,
    });
    Ok((Status::of(bad.is_empty()), witness))
}

fn check_fibre(c: &Ctx) -> Outcome {
    let frames = c.frames()?;
    let e5 = field::int_vec(&[0, 0, 0, 1]);
    let mut bad = Vec::new();
    let mut kinds = Vec::new();
    for (i, fr) in frames.iter().enumerate() {
        let fc = match fanomaps::fibre_conic(fr) {
            Ok(fc) => fc,
            Err(e) => {
                bad.push(json!({ "point": i, "error": e.to_string() }));
                continue;
            }
        };
        let ok = match (&fc.classification, c.nodal()) {
            (FibreType::NonsingularConic, true) => true,
            (FibreType::TwoLines { vertex, line_points, discriminant }, false) => {
                *vertex == e5 && line_points[0] != line_points[1] && !discriminant.is_zero()
            }
            _ => false,
        };
        kinds.push(match &fc.classification {
            FibreType::NonsingularConic => "nonsingular_conic".to_string(),
            FibreType::TwoLines { discriminant, .. } => format!("two_lines(disc {discriminant})"),
        });
        if !ok {
            bad.push(json!({ "point": i, "fibre": fc.classification }));
        }
    }
    Ok((Status::of(bad.is_empty()), json!({ "points": frames.len(), "fibres": kinds, "failures": bad })))
}

fn check_residual_conic(c: &Ctx) -> Outcome {
    if c.nodal() {
        return skipped("cuspidal fixtures only");
    }
    let e5 = field::int_vec(&[0, 0, 0, 1]);
    let t2sq = Poly::var(3, 2).pow(2);
    let mut tested = 0;
    let mut bad = Vec::new();
    for (i, fr) in c.frames()?.iter().enumerate().filter(|(_, f)| f.x5_compatible()) {
        tested += 1;
        let r = fanomaps::residual_conic(fr, &e5).map_err(err)?;
        if r != t2sq {
            bad.push(json!({ "point": i, "conic": r }));
        }
    }
    Ok((Status::of(tested > 0 && bad.is_empty()), json!({ "points_with_x5_zero": tested, "failures": bad })))
}

fn check_blowup_fibre(c: &Ctx) -> Outcome {
    let frames = c.frames()?;
    let mut bad = Vec::new();
    let tested = frames.len().min(4);
    for (i, fr) in frames.iter().take(tested).enumerate() {
        let routes = localmodel::blowup_chart_equations(fr).map_err(err)?
            == localmodel::blowup_chart_equations_formula(fr).map_err(err)?;
        let (quad, lin) = localmodel::exceptional_fibre(fr).map_err(err)?;
        let h1 = localmodel::lines_block(&fr.decomposition.h1);
        let q1 = localmodel::lines_block(&fr.decomposition.q1);
        let same = localmodel::same_conic_pair((&quad, &lin), (&q1, &h1)).map_err(err)?;
        if !(routes && same) {
            bad.push(json!({ "point": i, "routes_agree": routes, "fibre_matches": same }));
        }
    }
    Ok((Status::of(bad.is_empty()), json!({ "points": tested, "failures": bad })))
}

fn check_blowup_pullback(c: &Ctx) -> Outcome {
    let frames = c.frames()?;
    let count = 50.max(c.opts.samples / 2);
    let per = count.div_ceil(2);
    let mut done = 0;
    for (i, fr) in frames.iter().take(2).enumerate() {
        done += localmodel::blowup_pullback_check(fr, c.opts.seed.wrapping_add(i as u64), per).map_err(err)?;
    }
    Ok((Status::of(done >= 50), json!({ "chart_points": done })))
}

fn check_togliatti(c: &Ctx) -> Outcome {
    if !c.nodal() {
        return skipped("nodal fixtures only");
    }
    let frames = c.frames()?;
    let mut degrees = Vec::new();
    let mut points = 0;
    let mut bad = Vec::new();
    for (i, fr) in frames.iter().take(2).enumerate() {
        let t = fanomaps::togliatti_quintic(fr).map_err(err)?;
        degrees.push(t.degree());
        for a in fanomaps::fibre_points(fr, 10).map_err(err)? {
            points += 1;
            let grad = t.gradient(&a).map_err(err)?;
            if !grad.iter().all(FieldElement::is_zero) || !t.eval(&a).map_err(err)?.is_zero() {
                bad.push(json!({ "point": i, "a": show(&a) }));
            }
        }
    }
    let ok = degrees.iter().all(|&d| d == 5) && points >= 10 && bad.is_empty();
    Ok((Status::of(ok), json!({ "degrees": degrees, "fibre_points": points, "failures": bad })))
}

// ---- divisors

fn expected_table() -> IntersectionTable {
    IntersectionTable::from_array([6, 6, 0, 2, 0, lattice::LAMBDA_DELTA])
}

fn check_intersections(c: &Ctx) -> Outcome {
    let rep = c.divisor_report()?;
    let curves: Vec<Value> = rep
        .curves
        .iter()
        .map(|ci| {
            let counts: Vec<Value> = ci
                .counts
                .iter()
                .map(|n| {
                    json!({
                        "curve": n.curve,
                        "divisor": n.divisor,
                        "value": n.value,
                        "method": n.method,
                        "resultant_total": n.resultant.as_ref().map(|r| r.total),
                        "finite_field_totals": n.finite_field.iter().map(|p| json!({ "p": p.p, "total": p.total })).collect::<Vec<_>>(),
                        "frame_conditions": n.frame_conditions,
                        "agree": n.agree,
                    })
                })
                .collect();
            json!({ "point_index": ci.choice.point_index, "table": ci.table, "counts": counts })
        })
        .collect();
    let tables_ok = rep.curves.iter().all(|ci| ci.table == expected_table());
    let ok = rep.curves.len() >= 2 && rep.primes.len() >= 3 && tables_ok && rep.all_counts_agree;
    Ok((Status::of(ok), json!({ "primes": rep.primes, "expected": expected_table(), "curves": curves })))
}

fn check_class(c: &Ctx) -> Outcome {
    let rep = c.divisor_report()?;
    let s = &rep.solution;
    let ok = s.class == Some(NSClass::new(1, -2)) && s.consistent && s.integral;
    Ok((Status::of(ok), json!(s)))
}

fn check_rays(c: &Ctx) -> Outcome {
    let rep = c.divisor_report()?;
    let ok = rep.nef_rays == vec![NSClass::H, NSClass::new(2, -3)];
    let shown: Vec<String> = rep.nef_rays.iter().map(ToString::to_string).collect();
    Ok((Status::of(ok), json!({ "rays": shown })))
}

fn check_isometry(_: &Ctx) -> Outcome {
    let l1 = IntegralLattice::hyperbolic(3).direct_sum(&IntegralLattice::diagonal(&[-2]));
    let l2 = IntegralLattice::diagonal(&[6]).direct_sum(&IntegralLattice::a2(-1));
    let rep = lattice::lattice_isometric(&l1, &l2, 5).map_err(err)?;
    let ok = match &rep.outcome {
        IsometryOutcome::Certificate { matrix } => lattice::transform_gram(&l1.gram, matrix) == l2.gram,
        IsometryOutcome::Obstruction { .. } => true,
        IsometryOutcome::NotFoundWithinBound { .. } => false,
    };
    Ok((Status::of(ok), json!({ "left": l1.gram, "right": l2.gram, "report": rep })))
}

fn check_bbf(_: &Ctx) -> Outcome {
    let (hh, dd, hd) = (NSClass::H.square(), NSClass::DELTA.square(), NSClass::H.pairing(&NSClass::DELTA));
    let psi = NSClass::new(1, -2);
    let ok = (hh, dd, hd) == (6, -2, 0) && (lattice::H_SQUARE, lattice::DELTA_SQUARE) == (6, -2);
    Ok((Status::of(ok), json!({ "h.h": hh, "delta.delta": dd, "h.delta": hd, "psi.psi": psi.square() })))
}

// ---- symmetry

fn symmetry_outcome(rep: SymmetryReport, min_samples: usize) -> Outcome {
    let ok = rep.passed() && rep.samples >= min_samples;
    Ok((Status::of(ok), json!(rep)))
}

fn check_sym_phi(c: &Ctx) -> Outcome {
    if c.nodal() {
        return skipped("cuspidal fixtures only");
    }
    let n = 50.max(c.opts.samples / 2);
    symmetry_outcome(symmetry::check_equivariance_phi(c.y(), &c.fx.points, n, c.opts.seed).map_err(err)?, 50)
}

fn compatible_frame<'a>(c: &'a Ctx) -> Result<&'a AdaptedFrame, String> {
    c.frames()?.iter().find(|f| f.x5_compatible()).ok_or_else(|| "no surface point with x5 = 0".to_string())
}

fn check_sym_blowup(c: &Ctx) -> Outcome {
    if c.nodal() {
        return skipped("cuspidal fixtures only");
    }
    symmetry_outcome(symmetry::blowup_equivariance_check(c.y(), compatible_frame(c)?).map_err(err)?, 0)
}

fn check_sym_orders(c: &Ctx) -> Outcome {
    if c.nodal() {
        return skipped("cuspidal fixtures only");
    }
    let fr = compatible_frame(c)?;
    symmetry_outcome(symmetry::check_orders(c.y(), &c.fx.points, fr, c.opts.seed).map_err(err)?, 1)
}

fn check_sym_fixed(c: &Ctx) -> Outcome {
    if c.nodal() {
        return skipped("cuspidal fixtures only");
    }
    symmetry_outcome(symmetry::fixed_locus_check(c.y(), &c.fx.points).map_err(err)?, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_anchored() {
        let mut names: Vec<&str> = GROUPS.iter().flat_map(|(_, cs)| cs.iter().map(|c| c.0)).collect();
        assert_eq!(names.len(), CHECKS.len());
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
        for n in names {
            assert_ne!(anchor_of(n), "-", "{n}");
            assert!(n.starts_with(n.split('.').next().unwrap()));
        }
    }

    #[test]
    fn parse_suite_and_field() {
        assert_eq!("divisors".parse::<Suite>().unwrap(), Suite::Divisors);
        assert_eq!("q_zeta3".parse::<SampleField>().unwrap(), SampleField::Zeta3);
        assert!("everything".parse::<Suite>().is_err());
    }
}
