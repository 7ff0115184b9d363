//! Walks through every explicit computation on FX-N1 and FX-C1.
//!
//! `cargo run --release --example worked [fixtures-dir]`

use fano_lines::fanomaps::{self, PhiOutcome};
use fano_lines::field;
use fano_lines::fourfold::{Fixture, FourfoldKind};
use fano_lines::lattice::{self, IntegralLattice};
use fano_lines::lines::{LengthTwoScheme, CHART_EQUATION_NAMES};
use fano_lines::localmodel;
use fano_lines::symmetry::CyclicAction;

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap()
}

fn section(title: &str) {
    println!("\n-- {title}");
}

fn walk(fx: &Fixture) -> Result<(), Box<dyn std::error::Error>> {
    let y = &fx.fourfold;
    println!("==== {} ({:?})", fx.id, fx.kind());
    println!("F = {}", y.equation());

    section("phi and phi_inverse on the first two surface points");
    let xi = LengthTwoScheme::Reduced(fx.points[0].clone(), fx.points[1].clone());
    let out = fanomaps::phi(y, &xi)?;
    println!("phi(xi) = {}", json(&out));
    if let PhiOutcome::Line { line } = &out {
        println!("F restricted to the line: {}", line.restrict(&y.equation())?);
        println!("phi_inverse = {}", json(&fanomaps::phi_inverse(y, line)?));
    }

    let fr = localmodel::adapt_frame(y, &fx.points[0])?;
    section(&format!("chart equations at point 0 ({:?} frame)", fr.mode));
    for (n, f) in CHART_EQUATION_NAMES.iter().zip(fr.chart_equations()?) {
        println!("{n} = {f}");
    }

    section("Jacobian at the chart centre");
    let j = localmodel::jacobian_at_center(&fr)?;
    for row in &j.matrix {
        println!("  [{}]", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
    }
    println!(
        "rank {} (blocks {}, {}), pattern matches: {}",
        j.rank, j.p0_block_rank, j.p1_block_rank, j.pattern_matches
    );

    section("transversal type");
    let v = localmodel::classify_transversal_type(&fr)?;
    println!("{:?}: quadratic part {}, witness rank {}", v.kind, v.quadratic_part, v.witness_rank);
    println!("p12 series {} (linear term zero: {})", v.p12_series, v.p12_linear_term_zero);
    if let Some(c) = &v.cubic_coefficient {
        println!("cubic coefficient {c}");
    }

    section("fibre conic");
    let fc = fanomaps::fibre_conic(&fr)?;
    println!("h1 = {}\nq1 = {}\n{}", fc.h1, fc.q1, json(&fc.classification));

    section("blowup chart");
    for (n, f) in CHART_EQUATION_NAMES.iter().zip(localmodel::blowup_chart_equations(&fr)?) {
        println!("{n}~ = {f}");
    }
    let (e1, e2) = localmodel::exceptional_fibre(&fr)?;
    println!("exceptional fibre: {e1} = {e2} = 0");

    match fx.kind() {
        FourfoldKind::Nodal => {
            section("determinant quintic");
            let t = fanomaps::togliatti_quintic(&fr)?;
            println!("degree {}", t.degree());
        }
        FourfoldKind::CuspidalCyclic => {
            section("residual conic at (0:0:0:1)");
            let e5 = field::int_vec(&[0, 0, 0, 1]);
            for s in &fx.points {
                let f = localmodel::adapt_frame(y, s)?;
                if f.x5_compatible() {
                    println!("{}", fanomaps::residual_conic(&f, &e5)?);
                    break;
                }
            }
            section("order three action on the chart");
            let act = CyclicAction::rational();
            for (i, p) in act.chart_substitution().iter().enumerate() {
                println!("p{i} -> {p}");
            }
        }
    }

    section("intersection numbers and divisor class");
    let primes = y.good_primes(1000, 3);
    let rep = lattice::divisor_suite(y, &fx.points, 0, 2, &primes)?;
    for c in &rep.curves {
        println!("{}", json(&c.table));
    }
    println!("class {} rays {}", json(&rep.solution.class), json(&rep.nef_rays));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR")));
    for id in ["FX-N1", "FX-C1"] {
        let fx = Fixture::from_json(&std::fs::read_to_string(format!("{dir}/{id}.json"))?)?;
        walk(&fx)?;
        println!();
    }
    section("lattice isometry");
    let l1 = IntegralLattice::hyperbolic(3).direct_sum(&IntegralLattice::diagonal(&[-2]));
    let l2 = IntegralLattice::diagonal(&[6]).direct_sum(&IntegralLattice::a2(-1));
    println!("{}", json(&lattice::lattice_isometric(&l1, &l2, 5)?));
    Ok(())
}
