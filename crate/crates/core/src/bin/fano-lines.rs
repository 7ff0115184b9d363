use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fano_lines::fanomaps::{self, PhiOutcome};
use fano_lines::fourfold::{self, Fixture};
use fano_lines::lines::{LengthTwoScheme, ProjectiveLine};
use fano_lines::localmodel;
use fano_lines::suite::{self, Report, SampleField, Suite, SuiteOptions};
use fano_lines::symmetry;

#[derive(Parser)]
#[command(name = "fano-lines", version, about = "Exact checks for lines on singular cubic fourfolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Fixture JSON file.
    fixture: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Write the JSON output here (`-` for standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Finite-field oracle prime; repeat or separate with commas.
    #[arg(long = "prime", value_delimiter = ',')]
    primes: Vec<u64>,
    /// Sample field: q, q_sqrt_d or q_zeta3.
    #[arg(long, default_value = "q")]
    field: SampleField,
    /// Include per-check runtimes (reports are then not reproducible).
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn options(&self) -> SuiteOptions {
        SuiteOptions {
            seed: self.seed,
            samples: self.samples,
            primes: (!self.primes.is_empty()).then(|| self.primes.clone()),
            field: self.field,
            timings: self.timings,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fixture validation suite.
    Validate(Common),
    /// Apply phi to a scheme, or to seeded samples.
    Phi {
        #[command(flatten)]
        common: Common,
        /// Scheme as JSON, e.g. {"variant":"reduced","points":[[..],[..]]}.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Apply phi_inverse to a line, or to the images of seeded samples.
    PhiInv {
        #[command(flatten)]
        common: Common,
        /// Line as JSON: two spanning points.
        #[arg(long)]
        line: Option<String>,
    },
    /// Round trip, membership and trident checks.
    Roundtrip(Common),
    /// Chart and blowup chart equations at a surface point.
    LocalEqs {
        #[command(flatten)]
        common: Common,
        /// Index into the fixture's points.
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
    /// Transversal singularity type at every fixture point.
    SingType(Common),
    /// Intersection numbers, divisor class and lattice checks.
    Divisors(Common),
    /// Order-three symmetry checks (cuspidal fixtures).
    Equivariance(Common),
    /// Full report for a suite.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Regenerate the fixture corpus.
    RegenFixtures {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory to write into.
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
        /// Compare against this directory instead of writing.
        #[arg(long)]
        check: Option<PathBuf>,
    },
}

/// Usage or input error: exit code 2.
struct InputError(String);

type CmdResult = Result<ExitCode, InputError>;

fn input<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> InputError + '_ {
    move |e| InputError(format!("{what}: {e}"))
}

fn load(c: &Common) -> Result<Fixture, InputError> {
    suite::load_fixture(&c.fixture).map_err(|e| InputError(e.to_string()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), InputError> {
    match out {
        None => Ok(()),
        Some(p) if p.as_os_str() == "-" => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text).map_err(input(&p.display().to_string())),
    }
}

fn run_report(c: &Common, which: Suite) -> CmdResult {
    let fx = load(c)?;
    let report: Report = suite::run_suite(&fx, which, &c.options());
    print!("{}", report.human_summary());
    emit(&c.out, &report.to_json())?;
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn samples_for(fx: &Fixture, c: &Common) -> Result<Vec<LengthTwoScheme>, InputError> {
    let (y, pts) = (&fx.fourfold, &fx.points);
    let n = c.samples;
    match c.field {
        SampleField::Rational => fanomaps::sample_schemes(y, pts, c.seed, n - n / 4, n / 4).map_err(input("samples")),
        SampleField::QuadraticReal => fanomaps::quadratic_samples(y, pts, n).map_err(input("samples")),
        SampleField::Zeta3 => symmetry::zeta_samples(y, pts, n, c.seed).map_err(input("samples")),
    }
}

fn data_output(c: &Common, summary: String, value: Value) -> CmdResult {
    println!("{summary}");
    emit(&c.out, &(serde_json::to_string_pretty(&value).expect("serializable") + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_phi(c: &Common, scheme: &Option<String>) -> CmdResult {
    let fx = load(c)?;
    let schemes = match scheme {
        Some(text) => {
            let xi: LengthTwoScheme = serde_json::from_str(text).map_err(input("--scheme"))?;
            xi.validate(&fx.fourfold).map_err(input("--scheme"))?;
            vec![xi]
        }
        None => samples_for(&fx, c)?,
    };
    let mut rows = Vec::new();
    let (mut lines, mut planes) = (0, 0);
    for xi in &schemes {
        let out = fanomaps::phi(&fx.fourfold, xi).map_err(input("phi"))?;
        match out {
            PhiOutcome::Line { .. } => lines += 1,
            PhiOutcome::PlaneInY { .. } => planes += 1,
        }
        rows.push(json!({ "scheme": xi, "phi": out }));
    }
    data_output(c, format!("{}: {} schemes, {lines} lines, {planes} planes in Y", fx.id, schemes.len()), json!(rows))
}

fn cmd_phi_inv(c: &Common, line: &Option<String>) -> CmdResult {
    let fx = load(c)?;
    let lines = match line {
        Some(text) => {
            let pts: [Vec<fano_lines::field::FieldElement>; 2] = serde_json::from_str(text).map_err(input("--line"))?;
            vec![ProjectiveLine::from_span(&pts[0], &pts[1]).map_err(input("--line"))?]
        }
        None => {
            let mut out = Vec::new();
            for xi in samples_for(&fx, c)? {
                if let PhiOutcome::Line { line } = fanomaps::phi(&fx.fourfold, &xi).map_err(input("phi"))? {
                    out.push(line);
                }
            }
            out
        }
    };
    let mut rows = Vec::new();
    for l in &lines {
        let back = fanomaps::phi_inverse(&fx.fourfold, l).map_err(input("phi-inv"))?;
        rows.push(json!({ "line": l, "phi_inverse": back }));
    }
    data_output(c, format!("{}: {} lines", fx.id, lines.len()), json!(rows))
}

fn cmd_local_eqs(c: &Common, point: usize) -> CmdResult {
    let fx = load(c)?;
    let s =
        fx.points.get(point).ok_or_else(|| InputError(format!("--point: fixture has {} points", fx.points.len())))?;
    let fr = localmodel::adapt_frame(&fx.fourfold, s).map_err(input("frame"))?;
    let chart = fr.chart_equations().map_err(input("chart equations"))?;
    let blowup = localmodel::blowup_chart_equations(&fr).map_err(input("blowup equations"))?;
    let d = &fr.decomposition;
    let names = fano_lines::lines::CHART_EQUATION_NAMES;
    let mut summary = format!("{} point {point} ({:?} frame)\n", fx.id, fr.mode);
    for (n, f) in names.iter().zip(&chart) {
        summary += &format!("  {n} = {f}\n");
    }
    let value = json!({
        "point": s,
        "mode": fr.mode,
        "transform": fr.transform,
        "pieces": { "h1": d.h1, "q1": d.q1, "h2": d.h2, "q2": d.q2, "k1": d.full_k1() },
        "chart": names.iter().zip(&chart).map(|(n, f)| json!({ "name": n, "equation": f })).collect::<Vec<_>>(),
        "blowup_chart": names.iter().zip(&blowup).map(|(n, f)| json!({ "name": n, "equation": f })).collect::<Vec<_>>(),
    });
    data_output(c, summary.trim_end().to_string(), value)
}

fn cmd_sing_type(c: &Common) -> CmdResult {
    let fx = load(c)?;
    let mut rows = Vec::new();
    let mut summary = format!("{}:", fx.id);
    for (i, s) in fx.points.iter().enumerate() {
        let fr = localmodel::adapt_frame(&fx.fourfold, s).map_err(input("frame"))?;
        let v = localmodel::classify_transversal_type(&fr).map_err(input("classification"))?;
        summary += &format!(" {i}:{:?}", v.kind);
        rows.push(json!({ "point": s, "verdict": v }));
    }
    data_output(c, summary, json!(rows))
}

fn cmd_regen(seed: u64, out: &PathBuf, check: &Option<PathBuf>) -> CmdResult {
    let corpus = fourfold::regenerate_fixtures(seed).map_err(input("regeneration"))?;
    let mut same = true;
    for fx in &corpus {
        let name = format!("{}.json", fx.id);
        let text = fx.to_json();
        match check {
            Some(dir) => {
                let committed = std::fs::read_to_string(dir.join(&name)).map_err(input(&name))?;
                let ok = committed == text;
                println!("{name}: {}", if ok { "identical" } else { "DIFFERS" });
                same &= ok;
            }
            None => {
                std::fs::create_dir_all(out).map_err(input(&out.display().to_string()))?;
                std::fs::write(out.join(&name), text).map_err(input(&name))?;
                println!("wrote {}", out.join(&name).display());
            }
        }
    }
    Ok(if same { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(c) => run_report(c, Suite::Validate),
        Command::Phi { common, scheme } => cmd_phi(common, scheme),
        Command::PhiInv { common, line } => cmd_phi_inv(common, line),
        Command::Roundtrip(c) => run_report(c, Suite::Phi),
        Command::LocalEqs { common, point } => cmd_local_eqs(common, *point),
        Command::SingType(c) => cmd_sing_type(c),
        Command::Divisors(c) => run_report(c, Suite::Divisors),
        Command::Equivariance(c) => run_report(c, Suite::Symmetry),
        Command::Report { common, suite } => run_report(common, *suite),
        Command::RegenFixtures { seed, out, check } => cmd_regen(*seed, out, check),
    };
    match result {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
