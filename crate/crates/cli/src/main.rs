mod report;
mod render;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use kobon_core::arrangement::{build_omatrix, check_simple, parse_lines_csv, write_lines_csv, ArrangementError};
use kobon_core::certify::{emit_certificate, recheck_certificate, CertifyError, InterceptAssignment, ParameterBox, Verdict};
use kobon_core::exactnum::{parse_rational, to_ratio_string, Rational};
use kobon_core::omatrix::{
    affine_upper_bound, enumerate_bounded_faces, parse_omatrix, projective_triangle_count, projective_upper_bound,
    wedge_count,
};
use kobon_core::stretch::{
    gradient_stretch, random_init, solve_feasibility, stretch_fixed, Feasibility, FixedStretch, GradientConfig,
    LinearSystem, Origin, StretchError, StretchStatus,
};
use kobon_core::{AffineLine, OMatrix};
use serde_json::{json, Value};

use report::{sha256_hex, Format, RunReport};
use render::SvgScene;

const EXIT_PARSE: u8 = 2;
const EXIT_NOT_SIMPLE: u8 = 3;
const EXIT_FAILED: u8 = 4;
const EXIT_INFEASIBLE: u8 = 5;

#[derive(Parser)]
#[command(name = "kobon", version, about = "Triangle censuses, certified realizations and stretching for line arrangements")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Include wall-clock time in the report (makes output non-deterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    LpFixed,
    Gradient,
}

#[derive(Subcommand)]
enum Command {
    /// Count bounded faces of a line CSV or an O-matrix file.
    Census { input: PathBuf },
    /// Verify a parameter box against a target O-matrix and write a certificate.
    Certify {
        #[arg(long = "box")]
        config: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        eps_lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eps_hi: Option<String>,
    },
    /// Recompute a certificate from its embedded inputs and compare.
    Recheck { certificate: PathBuf },
    /// Search for straight lines realizing a target O-matrix.
    Stretch {
        #[arg(long, value_enum, default_value = "lp-fixed")]
        mode: Mode,
        #[arg(long, required_unless_present = "system")]
        target: Option<PathBuf>,
        /// Fixed root assignment (TOML), required by lp-fixed with a target.
        #[arg(long)]
        intercepts: Option<PathBuf>,
        /// Solve a linear system file directly instead of building one.
        #[arg(long, conflicts_with_all = ["target", "intercepts"])]
        system: Option<PathBuf>,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        restarts: u64,
        #[arg(long)]
        max_iterations: Option<u64>,
        /// Where to write the realizing lines as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the generated linear system.
        #[arg(long)]
        dump_system: Option<PathBuf>,
    },
    /// Draw a line CSV as SVG.
    Render {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fill bounded triangles.
        #[arg(long)]
        shade: bool,
        #[arg(long, default_value_t = 1000)]
        size: u32,
    },
}

/// A failure that prevents a report from being produced at all.
struct Failure {
    code: u8,
    message: String,
}

fn parse_err(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_PARSE, message: e.to_string() }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 1, message: format!("{}: {e}", path.display()) }
}

fn arrangement_err(e: ArrangementError) -> Failure {
    match e {
        ArrangementError::NotSimple(_) | ArrangementError::ParallelLines(..) => {
            Failure { code: EXIT_NOT_SIMPLE, message: e.to_string() }
        }
        other => parse_err(other),
    }
}

struct Outcome {
    report: RunReport,
    code: u8,
}

fn read_input(report: &mut RunReport, path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    report.input(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

/// Writes to a temporary file in the destination directory, then renames it.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

fn is_csv(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        || text.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.trim_start().starts_with("m,"))
}

fn simple_lines(text: &str) -> Result<Vec<AffineLine>, Failure> {
    let lines = parse_lines_csv(text).map_err(parse_err)?;
    let report = check_simple(&lines);
    if !report.is_simple() {
        return Err(arrangement_err(ArrangementError::NotSimple(report)));
    }
    Ok(lines)
}

fn read_target(report: &mut RunReport, path: &Path) -> Result<OMatrix, Failure> {
    parse_omatrix(&read_input(report, path)?).map_err(parse_err)
}

fn flag(count: u64, bound: Option<u64>) -> Value {
    match bound {
        Some(b) if count == b => json!("ATTAINS"),
        Some(b) if count < b => json!("BELOW"),
        Some(_) => json!("ABOVE"),
        None => Value::Null,
    }
}

fn census(input: &Path) -> Result<Outcome, Failure> {
    let mut report = RunReport::new("census");
    let text = read_input(&mut report, input)?;
    let m = if is_csv(input, &text) {
        build_omatrix(&simple_lines(&text)?).map_err(arrangement_err)?.0
    } else {
        parse_omatrix(&text).map_err(parse_err)?
    };
    let n = m.n();
    let c = enumerate_bounded_faces(&m);
    let affine = affine_upper_bound(n as u64).ok();
    let projective = projective_triangle_count(&m);
    let projective_bound = projective_upper_bound(n as u64 + 1).ok();

    report.status("OK");
    report.set("lines", n);
    report.set("bounded_faces", c.faces.len());
    report.set("triangles", c.triangles);
    report.set("bound", affine);
    report.set("bound_flag", flag(c.triangles as u64, affine));
    report.set("wedges", wedge_count(&m));
    report.set("projective_triangles", projective);
    report.set("projective_bound", projective_bound);
    report.set("projective_flag", flag(projective as u64, projective_bound));
    report.set("touching", c.touching.values().copied().collect::<Vec<_>>());
    report.set(
        "face_sizes",
        c.size_histogram().iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    );
    report.set(
        "unused_segments",
        c.unused_segments
            .iter()
            .map(|s| format!("{}:{}({}/{})", s.line, s.position, s.labels.0, s.labels.1))
            .collect::<Vec<_>>(),
    );
    report.set(
        "defects",
        c.defects
            .iter()
            .map(|f| f.boundary().iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
            .collect::<Vec<_>>(),
    );
    Ok(Outcome { report, code: 0 })
}

fn override_rational(slot: &mut Rational, text: Option<&String>) -> Result<(), Failure> {
    if let Some(t) = text {
        *slot = parse_rational(t).map_err(parse_err)?;
    }
    Ok(())
}

fn certify(
    config: &Path,
    target: &Path,
    out: &Path,
    depth: Option<u32>,
    eps_lo: Option<&String>,
    eps_hi: Option<&String>,
) -> Result<Outcome, Failure> {
    let mut report = RunReport::new("certify");
    let text = read_input(&mut report, config)?;
    let mut b: ParameterBox = ParameterBox::from_toml(&text).map_err(parse_err)?;
    let target = read_target(&mut report, target)?;
    if let Some(d) = depth {
        b.settings.max_depth = d;
    }
    override_rational(&mut b.eps_lo, eps_lo)?;
    override_rational(&mut b.eps_hi, eps_hi)?;
    let cert = emit_certificate(&b, &target).map_err(parse_err)?;
    let json = cert.to_json();
    write_atomic(out, &json)?;

    let verified = cert.verdict == Verdict::Verified;
    report.status(if verified { "VERIFIED" } else { "FAILED" });
    report.set("row_margins", cert.row_orders.len());
    report.set("slope_margins", cert.slope_order.len());
    if let Some(min) = cert.row_orders.iter().map(|m| &m.value_lo).min() {
        report.set("min_row_margin", to_ratio_string(min));
    }
    if let Some(z) = &cert.eps_zero {
        report.set(
            "eps_zero_set",
            z.zero_set
                .iter()
                .map(|l| format!("row {} {}/{}", l.row, l.labels.0, l.labels.1))
                .collect::<Vec<_>>(),
        );
    }
    report.set(
        "hypotheses",
        cert.hypotheses
            .checks
            .iter()
            .map(|h| (h.name.clone(), json!(if h.passed { "PASS" } else { "FAIL" })))
            .collect::<serde_json::Map<_, _>>(),
    );
    report.set("triangles", cert.census.triangles);
    if let Some(first) = cert.failures.first() {
        report.set("first_failure", first.clone());
    }
    report.set("certificate", out.display().to_string());
    report.set("certificate_sha256", sha256_hex(json.as_bytes()));
    Ok(Outcome { report, code: if verified { 0 } else { EXIT_FAILED } })
}

fn recheck(path: &Path) -> Result<Outcome, Failure> {
    let mut report = RunReport::new("recheck");
    let text = read_input(&mut report, path)?;
    let code = match recheck_certificate(&text) {
        Ok(Verdict::Verified) => {
            report.status("VERIFIED");
            0
        }
        Ok(Verdict::Failed) => {
            report.status("FAILED");
            report.set("detail", "certificate is consistent but records a failed verdict");
            EXIT_FAILED
        }
        Err(CertifyError::TamperDetected { field }) => {
            report.status("TAMPERED");
            report.set("field", field);
            EXIT_FAILED
        }
        Err(e) => return Err(parse_err(e)),
    };
    Ok(Outcome { report, code })
}

fn origin_text(o: &Origin) -> String {
    match o {
        Origin::Order { row, position, labels } => format!("order row {row} pos {position} ({}/{})", labels.0, labels.1),
        Origin::Chain { lower, upper } => format!("chain {lower}<{upper}"),
        Origin::Raw => "raw".into(),
    }
}

fn infeasible(report: &mut RunReport, sys: &LinearSystem, multipliers: &[Rational]) {
    report.status("INFEASIBLE");
    report.set("multipliers", multipliers.iter().map(to_ratio_string).collect::<Vec<_>>());
    report.set(
        "support",
        multipliers
            .iter()
            .zip(&sys.constraints)
            .filter(|(y, _)| **y != Rational::from_integer(0.into()))
            .map(|(y, c)| format!("{} x {}", to_ratio_string(y), origin_text(&c.origin)))
            .collect::<Vec<_>>(),
    );
}

fn emit_lines(report: &mut RunReport, lines: &[AffineLine], out: Option<&PathBuf>) -> Result<(), Failure> {
    let csv = write_lines_csv(lines);
    match out {
        Some(path) => {
            write_atomic(path, &csv)?;
            report.set("lines_csv", path.display().to_string());
            report.set("lines_sha256", sha256_hex(csv.as_bytes()));
        }
        None => report.set("lines", csv.lines().skip(1).map(str::to_string).collect::<Vec<_>>()),
    }
    Ok(())
}

fn stretch_err(e: StretchError) -> Failure {
    match e {
        StretchError::Arrangement(a) => arrangement_err(a),
        StretchError::InterceptClash { .. } => Failure { code: EXIT_INFEASIBLE, message: e.to_string() },
        other => parse_err(other),
    }
}

#[allow(clippy::too_many_arguments)]
fn stretch(
    mode: Mode,
    target: Option<&PathBuf>,
    intercepts: Option<&PathBuf>,
    system: Option<&PathBuf>,
    eta: Option<&String>,
    seed: u64,
    restarts: u64,
    max_iterations: Option<u64>,
    out: Option<&PathBuf>,
    dump_system: Option<&PathBuf>,
) -> Result<Outcome, Failure> {
    let mut report = RunReport::new("stretch");
    let eta = eta.map(|t| parse_rational(t).map_err(parse_err)).transpose()?;

    if let Some(path) = system {
        let mut sys = LinearSystem::parse(&read_input(&mut report, path)?).map_err(parse_err)?;
        if let Some(e) = eta {
            sys.eta = e;
        }
        report.set("mode", "system");
        report.set("constraints", sys.constraints.len());
        return Ok(match solve_feasibility(&sys) {
            Feasibility::Feasible(p) => {
                report.status("FEASIBLE");
                report.set("s", p.s.iter().map(to_ratio_string).collect::<Vec<_>>());
                report.set("min_slack", to_ratio_string(&p.min_slack));
                Outcome { report, code: 0 }
            }
            Feasibility::Infeasible(c) => {
                infeasible(&mut report, &sys, &c.multipliers);
                Outcome { report, code: EXIT_INFEASIBLE }
            }
        });
    }

    let target_path = target.ok_or_else(|| parse_err("--target is required"))?;
    let target = read_target(&mut report, target_path)?;
    match mode {
        Mode::LpFixed => {
            let path = intercepts.ok_or_else(|| parse_err("lp-fixed mode needs --intercepts"))?;
            let roots = InterceptAssignment::from_toml(&read_input(&mut report, path)?)
                .and_then(|a| a.resolve())
                .map_err(parse_err)?;
            let (sys, result) = stretch_fixed(&target, &roots, eta.as_ref()).map_err(stretch_err)?;
            if let Some(p) = dump_system {
                write_atomic(p, &sys.dump())?;
            }
            report.set("mode", "lp-fixed");
            report.set("order_rows", sys.order_count());
            report.set("chain_rows", sys.chain_count());
            report.set("eta", to_ratio_string(&sys.eta));
            match result {
                FixedStretch::Feasible { point, lines } => {
                    report.status("FEASIBLE");
                    report.set("min_slack", to_ratio_string(&point.min_slack));
                    emit_lines(&mut report, &lines, out)?;
                    Ok(Outcome { report, code: 0 })
                }
                FixedStretch::Infeasible { certificate } => {
                    infeasible(&mut report, &sys, &certificate.multipliers);
                    Ok(Outcome { report, code: EXIT_INFEASIBLE })
                }
            }
        }
        Mode::Gradient => {
            let mut config = GradientConfig::default();
            if let Some(k) = max_iterations {
                config.max_iterations = k;
            }
            report.set("mode", "gradient");
            let mut best = None;
            for attempt in 0..restarts.max(1) {
                let init = random_init(&target, seed + attempt);
                let r = gradient_stretch(&target, &init, &config).map_err(stretch_err)?;
                let done = r.status == StretchStatus::Realized;
                let better = best.as_ref().is_none_or(|(_, b): &(u64, kobon_core::stretch::StretchResult)| {
                    r.residual < b.residual
                });
                if done || better {
                    best = Some((seed + attempt, r));
                }
                if done {
                    break;
                }
            }
            let (used, r) = best.expect("at least one attempt runs");
            report.set("seed", used);
            report.set("iterations", r.iterations);
            report.set("residual", r.residual);
            match (r.status, &r.lines) {
                (StretchStatus::Realized, Some(lines)) => {
                    report.status("REALIZED");
                    emit_lines(&mut report, lines, out)?;
                    Ok(Outcome { report, code: 0 })
                }
                _ => {
                    report.status("STALLED");
                    Ok(Outcome { report, code: EXIT_INFEASIBLE })
                }
            }
        }
    }
}

fn render(input: &Path, out: &Path, shade: bool, size: u32) -> Result<Outcome, Failure> {
    let mut report = RunReport::new("render");
    let lines = simple_lines(&read_input(&mut report, input)?)?;
    let scene = SvgScene::build(&lines, shade, size).map_err(arrangement_err)?;
    let svg = scene.to_svg();
    write_atomic(out, &svg)?;
    report.status("OK");
    report.set("lines", scene.segments.len());
    report.set("crossings", scene.crossings.len());
    report.set("triangles", scene.triangles.len());
    let (x0, x1, y0, y1) = scene.viewport;
    report.set("viewport", vec![x0, x1, y0, y1]);
    report.set("svg", out.display().to_string());
    report.set("svg_sha256", sha256_hex(svg.as_bytes()));
    Ok(Outcome { report, code: 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.command {
        Command::Census { input } => census(input),
        Command::Certify { config, target, out, depth, eps_lo, eps_hi } => {
            certify(config, target, out, *depth, eps_lo.as_ref(), eps_hi.as_ref())
        }
        Command::Recheck { certificate } => recheck(certificate),
        Command::Stretch {
            mode,
            target,
            intercepts,
            system,
            eta,
            seed,
            restarts,
            max_iterations,
            out,
            dump_system,
        } => stretch(
            *mode,
            target.as_ref(),
            intercepts.as_ref(),
            system.as_ref(),
            eta.as_ref(),
            *seed,
            *restarts,
            *max_iterations,
            out.as_ref(),
            dump_system.as_ref(),
        ),
        Command::Render { input, out, shade, size } => render(input, out, *shade, *size),
    };
    match result {
        Ok(mut outcome) => {
            if cli.timing {
                outcome.report.timing(start.elapsed().as_secs_f64() * 1000.0);
            }
            print!("{}", outcome.report.render(cli.format));
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
