//! Acceptance checks, one test per criterion. Each test writes a single
//! `criterion NN ... PASS|FAIL` line to stderr (uncaptured) and then asserts.
//! Every comparison is exact; the tolerance column states this explicitly.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::OnceLock;

use fano_lines::fanomaps::{self, FibreType, PhiOutcome};
use fano_lines::field::{self, FieldElement};
use fano_lines::fourfold::Fixture;
use fano_lines::lattice::{self, IntegralLattice, IntersectionTable, IsometryOutcome, NSClass};
use fano_lines::lines::{LengthTwoScheme, CHART_VARS};
use fano_lines::localmodel::{self, TransversalType};
use fano_lines::poly::Poly;
use fano_lines::suite::{self, Report, Status, Suite, SuiteOptions};
use fano_lines::symmetry::{self, CyclicAction};

const FIXTURES: [&str; 4] = ["FX-N1", "FX-N2", "FX-C1", "FX-C2"];
const EXACT: &str = "exact (zero tolerance)";

fn fixture(id: &str) -> &'static Fixture {
    static ALL: OnceLock<BTreeMap<&'static str, Fixture>> = OnceLock::new();
    &ALL.get_or_init(|| {
        FIXTURES
            .iter()
            .map(|&id| {
                let path = format!("{}/../../fixtures/{id}.json", env!("CARGO_MANIFEST_DIR"));
                (id, Fixture::from_json(&std::fs::read_to_string(path).unwrap()).unwrap())
            })
            .collect()
    })[id]
}

/// Full reports at seed 0 with 100 samples, computed once.
fn report(id: &str) -> &'static Report {
    static ALL: OnceLock<BTreeMap<&'static str, Report>> = OnceLock::new();
    &ALL.get_or_init(|| {
        FIXTURES.iter().map(|&id| (id, suite::run_suite(fixture(id), Suite::All, &SuiteOptions::default()))).collect()
    })[id]
}

fn record(id: &str, name: &str) -> (Status, serde_json::Value) {
    let c = report(id).check(name).unwrap_or_else(|| panic!("{id}: no check {name}"));
    (c.status, c.witness.clone())
}

fn announce(n: u32, title: &str, ok: bool, detail: &str) {
    let line =
        format!("criterion {n:02} {title:<22} {}  [{detail}] tolerance: {EXACT}\n", if ok { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
}

fn finish(n: u32, title: &str, failures: Vec<String>, detail: String) {
    let ok = failures.is_empty();
    announce(n, title, ok, &detail);
    assert!(ok, "criterion {n} ({title}): {}", failures.join("; "));
}

fn u(v: &serde_json::Value, key: &str) -> u64 {
    v[key].as_u64().unwrap_or(0)
}

#[test]
fn criterion_01_roundtrip() {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for id in ["FX-N1", "FX-C1"] {
        let (st, w) = record(id, "phi.roundtrip");
        let (n, nonred) = (u(&w, "samples"), u(&w, "nonreduced"));
        if st != Status::Pass || n < 100 || nonred < 25 || !w["mismatches"].as_array().unwrap().is_empty() {
            failures.push(format!("{id}: {w}"));
        }
        detail.push(format!("{id} {n} samples/{nonred} nonreduced"));
    }
    for id in ["FX-N2", "FX-C2"] {
        let fx = fixture(id);
        let [a, b] = fx.line.clone().unwrap();
        let out = fanomaps::phi(&fx.fourfold, &LengthTwoScheme::Reduced(a, b)).unwrap();
        if !matches!(out, PhiOutcome::PlaneInY { .. }) {
            failures.push(format!("{id}: designed plane not detected"));
        }
        if record(id, "phi.plane-in-y").0 != Status::Expected {
            failures.push(format!("{id}: plane outcome not reported as expected behaviour"));
        }
        detail.push(format!("{id} PlaneInY"));
    }
    finish(1, "round-trip", failures, detail.join(", "));
}

#[test]
fn criterion_02_membership() {
    let mut failures = Vec::new();
    let mut lines = 0;
    for id in FIXTURES {
        let (st, w) = record(id, "phi.membership");
        lines += u(&w, "lines");
        if st != Status::Pass {
            failures.push(format!("{id}: {w}"));
        }
    }
    // independent spot check: the four coefficients of F on each line
    let fx = fixture("FX-C1");
    let f = fx.fourfold.equation();
    for xi in fanomaps::sample_schemes(&fx.fourfold, &fx.points, 11, 8, 4).unwrap() {
        if let PhiOutcome::Line { line } = fanomaps::phi(&fx.fourfold, &xi).unwrap() {
            let r = line.restrict(&f).unwrap();
            if (0..4u16).any(|i| !r.coeff(&[i, 3 - i]).is_zero()) {
                failures.push(format!("FX-C1: F does not vanish on {line}"));
            }
        }
    }
    finish(2, "membership", failures, format!("{lines} lines over 4 fixtures"));
}

#[test]
fn criterion_03_local_equations() {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for id in FIXTURES {
        let (st, w) = record(id, "local.chart-biconditional");
        if st != Status::Pass || u(&w, "points") < 200 {
            failures.push(format!("{id}: {w}"));
        }
        detail.push(format!("{id} {}/{} in Y", u(&w, "in_y"), u(&w, "points")));
    }
    finish(3, "local equations", failures, detail.join(", "));
}

#[test]
fn criterion_04_jacobian() {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for id in FIXTURES {
        let fx = fixture(id);
        let mut ranks = Vec::new();
        for s in fx.points.iter().take(6) {
            let fr = localmodel::adapt_frame(&fx.fourfold, s).unwrap();
            let j = localmodel::jacobian_at_center(&fr).unwrap();
            if !j.pattern_matches {
                failures.push(format!("{id}: block pattern differs"));
            }
            ranks.push(j.rank);
        }
        if ranks.iter().any(|&r| r != 2) {
            failures.push(format!("{id}: rank at surface points is {ranks:?}, required 2"));
        }
        let (st, w) = record(id, "local.jacobian-off-sigma");
        if st != Status::Pass || u(&w, "points") < 20 {
            failures.push(format!("{id}: off-surface {w}"));
        }
        detail.push(format!("{id} sigma ranks {:?} off-sigma {}x rank 4", ranks, u(&w, "points")));
    }
    finish(4, "jacobian", failures, detail.join(", "));
}

#[test]
fn criterion_05_singularity_type() {
    let mut failures = Vec::new();
    let mut tested = 0;
    for id in FIXTURES {
        let fx = fixture(id);
        let nodal = id.starts_with("FX-N");
        for s in &fx.points {
            tested += 1;
            let v = localmodel::classify_transversal_type(&localmodel::adapt_frame(&fx.fourfold, s).unwrap()).unwrap();
            let ok = if nodal {
                v.kind == TransversalType::A1 && v.witness_rank == 3
            } else {
                v.kind == TransversalType::A2
                    && v.witness_rank == 2
                    && v.p12_linear_term_zero
                    && v.cubic_coefficient.as_ref().is_some_and(|c| !c.is_zero())
            };
            if !ok {
                failures.push(format!("{id}: {:?} rank {}", v.kind, v.witness_rank));
            }
        }
    }
    finish(5, "singularity type", failures, format!("{tested} surface points: A1/rank 3 nodal, A2/rank 2 cuspidal"));
}

#[test]
fn criterion_06_fibre_geometry() {
    let mut failures = Vec::new();
    let e5 = field::int_vec(&[0, 0, 0, 1]);
    let t2sq = Poly::var(3, 2).pow(2);
    let (mut conics, mut pairs, mut residual) = (0, 0, 0);
    for id in FIXTURES {
        let fx = fixture(id);
        for s in &fx.points {
            let fr = localmodel::adapt_frame(&fx.fourfold, s).unwrap();
            match fanomaps::fibre_conic(&fr) {
                Ok(fc) => match fc.classification {
                    FibreType::NonsingularConic if id.starts_with("FX-N") => conics += 1,
                    FibreType::TwoLines { vertex, line_points, .. }
                        if id.starts_with("FX-C") && vertex == e5 && line_points[0] != line_points[1] =>
                    {
                        pairs += 1
                    }
                    other => failures.push(format!("{id}: {other:?}")),
                },
                Err(e) => failures.push(format!("{id}: {e}")),
            }
            if id.starts_with("FX-C") && fr.x5_compatible() {
                residual += 1;
                if fanomaps::residual_conic(&fr, &e5).unwrap() != t2sq {
                    failures.push(format!("{id}: residual conic at (0:0:0:1) is not t2^2"));
                }
            }
        }
    }
    if residual == 0 {
        failures.push("no cuspidal point with x5 = 0 tested".into());
    }
    finish(
        6,
        "fibre geometry",
        failures,
        format!("{conics} smooth conics, {pairs} line pairs, {residual} t2^2 checks"),
    );
}

#[test]
fn criterion_07_intersection_numbers() {
    let mut failures = Vec::new();
    let want = IntersectionTable::from_array([6, 6, 0, 2, 0, -1]);
    let mut detail = Vec::new();
    for id in FIXTURES {
        let fx = fixture(id);
        let primes = fx.fourfold.good_primes(1000, 3);
        let rep = lattice::divisor_suite(&fx.fourfold, &fx.points, 0, 2, &primes).unwrap();
        if rep.curves.len() < 2 || rep.primes.len() < 3 {
            failures.push(format!("{id}: too few curves or primes"));
        }
        for ci in &rep.curves {
            if ci.table != want {
                failures.push(format!("{id}: table {:?}", ci.table));
            }
            for n in &ci.counts {
                let ff_ok = n.finite_field.iter().all(|p| p.total as i64 == n.value);
                let res_ok = n.resultant.as_ref().is_none_or(|r| r.total as i64 == n.value);
                if !(n.agree && ff_ok && res_ok) {
                    failures.push(format!("{id}: {}.{} counts disagree", n.curve, n.divisor));
                }
            }
        }
        if rep.solution.class != Some(NSClass::new(1, -2)) || !rep.solution.consistent {
            failures.push(format!("{id}: class {:?}", rep.solution.class));
        }
        if rep.nef_rays != vec![NSClass::H, NSClass::new(2, -3)] {
            failures.push(format!("{id}: rays {:?}", rep.nef_rays));
        }
        detail.push(format!("{id} primes {:?}", rep.primes));
    }
    finish(7, "intersection numbers", failures, format!("[Psi] = h - 2 delta; {}", detail.join(", ")));
}

#[test]
fn criterion_08_blowup() {
    let mut failures = Vec::new();
    let mut pulled = 0;
    for id in FIXTURES {
        for name in ["local.blowup-fibre", "local.blowup-pullback"] {
            let (st, w) = record(id, name);
            if st != Status::Pass {
                failures.push(format!("{id} {name}: {w}"));
            }
            if name == "local.blowup-pullback" {
                pulled += u(&w, "chart_points");
                if u(&w, "chart_points") < 50 {
                    failures.push(format!("{id}: fewer than 50 pullback points"));
                }
            }
        }
    }
    finish(8, "blowup", failures, format!("{pulled} pullback points"));
}

#[test]
fn criterion_09_equivariance() {
    let mut failures = Vec::new();
    let act = CyclicAction::rational();
    let zeta = act.zeta().clone();
    let expected: Vec<Poly> = (0..CHART_VARS)
        .map(|i| if i == 3 || i == 7 { Poly::var(CHART_VARS, i).scale(&zeta) } else { Poly::var(CHART_VARS, i) })
        .collect();
    if act.chart_substitution() != expected {
        failures.push("chart action is not p_{j,5} -> zeta p_{j,5}".into());
    }
    let a = act.a_substitution();
    if a[3] != Poly::var(4, 3).scale(&zeta) || (0..3).any(|i| a[i] != Poly::var(4, i)) {
        failures.push("a5 -> zeta a5 fails".into());
    }
    let mut samples = 0;
    for id in ["FX-C1", "FX-C2"] {
        let fx = fixture(id);
        let rep = symmetry::check_equivariance_phi(&fx.fourfold, &fx.points, 50, 0).unwrap();
        samples += rep.samples;
        if !rep.passed() || rep.samples < 50 {
            failures.push(format!("{id}: {:?}", rep.failures));
        }
        for name in ["symmetry.blowup-action", "symmetry.orders"] {
            if record(id, name).0 != Status::Pass {
                failures.push(format!("{id}: {name}"));
            }
        }
        // the chart action agrees with the action on lines
        let fr = fx
            .points
            .iter()
            .map(|s| localmodel::adapt_frame(&fx.fourfold, s).unwrap())
            .find(|f| f.x5_compatible())
            .unwrap();
        for xi in fanomaps::sample_schemes(&fx.fourfold, &fx.points, 5, 6, 2).unwrap() {
            if let PhiOutcome::Line { line } = fanomaps::phi(&fx.fourfold, &xi).unwrap() {
                if let Some(c) = fr.chart_point(&line).unwrap() {
                    let moved = fr.chart_point(&act.act_line(&line).unwrap()).unwrap();
                    if moved != Some(act.act_chart(&c).unwrap()) {
                        failures.push(format!("{id}: chart action differs from the line action"));
                    }
                }
            }
        }
    }
    finish(9, "equivariance", failures, format!("{samples} Q(zeta3) samples, order 3 at every level"));
}

#[test]
fn criterion_10_fixed_loci() {
    let mut failures = Vec::new();
    let mut fixed = 0;
    for id in ["FX-C1", "FX-C2"] {
        let fx = fixture(id);
        let rep = symmetry::fixed_locus_check(&fx.fourfold, &fx.points).unwrap();
        if !rep.passed() {
            failures.push(format!("{id}: {:?}", rep.failures));
        }
        let act = CyclicAction::rational();
        for p in &fx.points {
            let is_fixed = act.act_surface(&fx.fourfold, p).unwrap() == field::normalize_projective(p).unwrap();
            fixed += is_fixed as usize;
            if is_fixed != p[5].is_zero() {
                failures.push(format!("{id}: fixed-point test disagrees with x5 = 0"));
            }
        }
        let v = fx.fourfold.vertex().unwrap();
        if act.act_point(&v).unwrap() != v || fx.fourfold.sigma_membership(&v) {
            failures.push(format!("{id}: vertex not fixed or on the surface"));
        }
    }
    finish(10, "fixed loci", failures, format!("{fixed} fixed points, all with x5 = 0; vertex fixed, off the surface"));
}

#[test]
fn criterion_11_lattice() {
    let mut failures = Vec::new();
    let l1 = IntegralLattice::hyperbolic(3).direct_sum(&IntegralLattice::diagonal(&[-2]));
    let l2 = IntegralLattice::diagonal(&[6]).direct_sum(&IntegralLattice::a2(-1));
    let rep = lattice::lattice_isometric(&l1, &l2, 5).unwrap();
    if rep.signatures[0] != rep.signatures[1] || rep.determinants[0] != rep.determinants[1] {
        failures.push("pre-checks differ".into());
    }
    let detail = match &rep.outcome {
        IsometryOutcome::Certificate { matrix } => {
            if lattice::transform_gram(&l1.gram, matrix) != l2.gram {
                failures.push("certificate does not transform the Gram matrix".into());
            }
            format!("certificate {matrix:?}, det {}", rep.determinants[0])
        }
        other => {
            failures.push(format!("{other:?}"));
            String::new()
        }
    };
    if (NSClass::H.square(), NSClass::DELTA.square(), NSClass::H.pairing(&NSClass::DELTA)) != (6, -2, 0) {
        failures.push("BBF constants".into());
    }
    for id in FIXTURES {
        if record(id, "divisors.bbf-constants").0 != Status::Pass {
            failures.push(format!("{id}: bbf check"));
        }
    }
    finish(11, "lattice", failures, detail);
}

#[test]
fn criterion_12_togliatti() {
    let mut failures = Vec::new();
    let mut total = 0;
    for id in ["FX-N1", "FX-N2"] {
        let fx = fixture(id);
        let fr = localmodel::adapt_frame(&fx.fourfold, &fx.points[0]).unwrap();
        let t = fanomaps::togliatti_quintic(&fr).unwrap();
        if t.degree() != 5 {
            failures.push(format!("{id}: degree {}", t.degree()));
        }
        let pts = fanomaps::fibre_points(&fr, 10).unwrap();
        total += pts.len();
        if pts.len() < 10 {
            failures.push(format!("{id}: only {} fibre points", pts.len()));
        }
        for a in &pts {
            if !t.gradient(a).unwrap().iter().all(FieldElement::is_zero) {
                failures.push(format!("{id}: gradient nonzero at {a:?}"));
            }
        }
    }
    finish(12, "togliatti", failures, format!("degree 5, gradient zero at {total} points"));
}
