//! `wallcross`: factorizations, scattering diagrams and affine invariants
//! from JSON documents.
//!
//! Exit status is 0 on success, 1 when a check fails (the report is still
//! printed) and 2 on invalid input.

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use wallcross::affine::{
    focus_focus_loop, gauss_bonnet_check, i_homomorphism, k_fixed_vectors, matrix_to_lift, monodromy, unipotent_conjugacy_class,
    valuations_match_fixed_points, AffineTransform, KAffineTransform, LiftedWord, LoopWord,
};
use wallcross::checks::{check_all, run_suite, CheckConfig, CheckReport, SUITES};
use wallcross::factorize::{factorize, slope_auto, Slope};
use wallcross::poisson::{Basis, Filtration};
use wallcross::scalars::{parse_rational, JsonScalar, Rational, ValuedScalar};
use wallcross::scatter::{build, check_vertices, export, Diagram, SingularPoint, Window};
use wallcross::tropical::{pl_add, val_function, LaurentPoly};
use wallcross::{RationalAuto, RationalWall, ValuedLaurent};

#[derive(Parser)]
#[command(name = "wallcross", version, about = "Exact wall-crossing computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Input {
    /// JSON document to read; `-` reads standard input
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// JSON document given inline
    #[arg(long, conflicts_with = "input")]
    json: Option<String>,
}

#[derive(Args, Clone, Default)]
struct Output {
    /// Write the result here instead of standard output
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a product of walls into walls of increasing slope
    Factorize {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Series order k
        #[arg(short = 'k', long)]
        order: Option<usize>,
        /// Coefficients c1,c2,... of the slope-0 wall (with --finf)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        f0: Option<Vec<String>>,
        /// Coefficients c1,c2,... of the slope-infinity wall
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        finf: Option<Vec<String>>,
    },
    /// Build an order-truncated scattering diagram and check its vertices
    Scatter {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Series order k
        #[arg(short = 'k', long)]
        order: Option<usize>,
        /// Order cutoff C, an integer or p/q
        #[arg(short = 'C', long)]
        cutoff: Option<String>,
        #[arg(short, long, value_enum, default_value_t)]
        format: Format,
    },
    /// Sum local indices of lifted monodromy words against 2 - 2g
    GaussBonnet {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Use this many focus-focus singularities instead of a document
        #[arg(long)]
        focus_focus: Option<usize>,
        /// Genus of the surface, 0 by default
        #[arg(long)]
        genus: Option<i64>,
    },
    /// Tropicalize Laurent polynomials with t-adic coefficients
    Tropical {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Truncate coefficients at t^T
        #[arg(short = 'T', long)]
        truncation: Option<i64>,
        #[arg(short, long, value_enum, default_value_t)]
        format: Format,
        /// Left end of the SVG plot range
        #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
        lo: i64,
        /// Right end of the SVG plot range
        #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
        hi: i64,
    },
    /// Monodromy of a loop of chart transitions, its lift and fixed vectors
    Monodromy {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Use a loop around this many focus-focus points instead of a document
        #[arg(long)]
        focus_focus: Option<u32>,
        /// Truncate the translation scalars at t^T
        #[arg(short = 'T', long)]
        truncation: Option<i64>,
    },
    /// Run the seeded property suites
    CheckAll {
        #[command(flatten)]
        output: Output,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Series order used by every suite
        #[arg(short = 'k', long)]
        order: Option<usize>,
        /// Run only these suites
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: Vec<String>,
    },
}

enum Failure {
    /// Malformed or inconsistent input: exit 2.
    Input(String),
    /// A check ran and failed; the report has been emitted: exit 1.
    Check,
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn json_error(e: serde_json::Error) -> Failure {
    Failure::Input(format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column()))
}

fn read_input(input: &Input) -> Result<Option<String>, Failure> {
    if let Some(s) = &input.json {
        return Ok(Some(s.clone()));
    }
    match &input.input {
        None => Ok(None),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(Some(s))
        }
        Some(p) => fs::read_to_string(p).map(Some).map_err(|e| invalid(format!("{}: {e}", p.display()))),
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(json_error)
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &output.output {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(output: &Output, v: &impl Serialize) -> Result<(), Failure> {
    emit(output, &serde_json::to_string_pretty(v).expect("reports serialize"))
}

fn check_order(k: usize) -> Result<usize, Failure> {
    if k == 0 {
        return Err(invalid("series order k must be at least 1"));
    }
    Ok(k)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WallSpec {
    slope: Slope,
    coeffs: RationalWall,
}

/// Walls composed left to right, first listed leftmost.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorizeDoc {
    order: Option<usize>,
    walls: Vec<WallSpec>,
}

fn parse_wall(cs: &[String]) -> Result<RationalWall, Failure> {
    let coeffs = cs.iter().map(|c| parse_rational(c.trim()).map_err(invalid)).collect::<Result<Vec<_>, _>>()?;
    Ok(RationalWall::new(coeffs))
}

fn run_factorize(
    input: &Input,
    output: &Output,
    order: Option<usize>,
    f0: &Option<Vec<String>>,
    finf: &Option<Vec<String>>,
) -> Result<(), Failure> {
    let doc = match (read_input(input)?, f0, finf) {
        (Some(text), None, None) => parse::<FactorizeDoc>(&text)?,
        (None, Some(a), Some(b)) => FactorizeDoc {
            order: None,
            walls: vec![
                WallSpec { slope: Slope::INFINITY, coeffs: parse_wall(b)? },
                WallSpec { slope: Slope::ZERO, coeffs: parse_wall(a)? },
            ],
        },
        _ => return Err(invalid("give either a document or both --f0 and --finf")),
    };
    let k = check_order(order.or(doc.order).unwrap_or(8))?;
    let filt = Filtration::degree(k);
    let mut g = RationalAuto::identity(Basis::standard(), &filt);
    for w in &doc.walls {
        g = g.compose(&slope_auto(w.slope, &w.coeffs, Basis::standard(), &filt)).map_err(invalid)?;
    }
    let sf = factorize(&g).map_err(invalid)?;
    let integral = sf.factors().all(|(_, f)| f.is_integral());
    emit_json(output, &json!({ "factorization": sf, "integral": integral }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScatterDoc {
    points: Vec<SingularPoint>,
    cutoff: Option<Value>,
    order: Option<usize>,
    window: Option<Window>,
}

fn rational_value(v: &Value) -> Result<Rational, Failure> {
    match v {
        Value::String(s) => parse_rational(s).map_err(invalid),
        Value::Number(n) => n.as_i64().map(|i| Rational::from_integer(i.into())).ok_or_else(|| invalid(format!("cutoff {n} is not an integer"))),
        other => Err(invalid(format!("cutoff must be a number or \"p/q\", got {other}"))),
    }
}

fn run_scatter(
    input: &Input,
    output: &Output,
    order: Option<usize>,
    cutoff: &Option<String>,
    format: Format,
) -> Result<(), Failure> {
    let text = read_input(input)?.ok_or_else(|| invalid("scatter needs a document"))?;
    let doc: ScatterDoc = parse(&text)?;
    let k = check_order(order.or(doc.order).unwrap_or(6))?;
    let c = match (cutoff, &doc.cutoff) {
        (Some(s), _) => parse_rational(s).map_err(invalid)?,
        (None, Some(v)) => rational_value(v)?,
        (None, None) => Rational::from_integer((k as i64).into()),
    };
    if c <= Rational::from_integer(0.into()) {
        return Err(invalid("order cutoff C must be positive"));
    }
    let d = Diagram::<Rational>::new(doc.points, c, k, doc.window).map_err(invalid)?;
    let d = build(&d).map_err(invalid)?;
    let checks = check_vertices(&d).map_err(invalid)?;
    let consistent = checks.iter().all(|b| *b);
    match format {
        Format::Svg => emit(output, &export(&d, "svg").map_err(invalid)?)?,
        Format::Json => emit_json(output, &json!({ "diagram": d, "vertex_checks": checks, "consistent": consistent }))?,
    }
    if consistent {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussBonnetDoc {
    #[serde(default)]
    genus: i64,
    singularities: Vec<LiftedWord>,
}

fn run_gauss_bonnet(input: &Input, output: &Output, focus_focus: Option<usize>, genus: Option<i64>) -> Result<(), Failure> {
    let doc = match (read_input(input)?, focus_focus) {
        (Some(text), None) => parse::<GaussBonnetDoc>(&text)?,
        (None, Some(n)) => GaussBonnetDoc { genus: 0, singularities: vec![LiftedWord::focus_focus(); n] },
        _ => return Err(invalid("give either a document or --focus-focus")),
    };
    let genus = genus.unwrap_or(doc.genus);
    if genus < 0 {
        return Err(invalid("genus must be non-negative"));
    }
    let r = gauss_bonnet_check(&doc.singularities, genus);
    emit_json(output, &r)?;
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TropicalDoc {
    polys: Vec<ValuedLaurent>,
}

fn truncate(c: &ValuedScalar, t: Option<i64>) -> ValuedScalar {
    match t {
        Some(t) => c.clone().with_order(t),
        None => c.clone(),
    }
}

fn check_truncation(t: Option<i64>) -> Result<Option<i64>, Failure> {
    match t {
        Some(t) if t < 1 => Err(invalid("truncation T must be at least 1")),
        t => Ok(t),
    }
}

fn run_tropical(input: &Input, output: &Output, truncation: Option<i64>, format: Format, lo: i64, hi: i64) -> Result<(), Failure> {
    let t = check_truncation(truncation)?;
    let text = read_input(input)?.ok_or_else(|| invalid("tropical needs a document"))?;
    let doc: TropicalDoc = parse(&text)?;
    if doc.polys.is_empty() {
        return Err(invalid("no polynomials given"));
    }
    let polys = doc
        .polys
        .iter()
        .map(|p| LaurentPoly::from_terms(p.dim(), p.terms().map(|(e, c)| (e.to_vec(), truncate(c, t)))))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    let vals = polys.iter().map(val_function).collect::<Result<Vec<_>, _>>().map_err(invalid)?;
    if let Format::Svg = format {
        if lo >= hi {
            return Err(invalid("plot range needs lo < hi"));
        }
        return emit(output, &vals[0].to_svg(lo, hi));
    }
    let mut product = polys[0].clone();
    let mut sum = vals[0].clone();
    for (p, v) in polys.iter().zip(&vals).skip(1) {
        product = product.mul(p).map_err(invalid)?;
        sum = pl_add(&sum, v).map_err(invalid)?;
    }
    let product_val = val_function(&product).map_err(invalid)?;
    let additive = product_val == sum;
    emit_json(output, &json!({ "vals": vals, "product_val": product_val, "additive": additive }))?;
    if additive {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MonodromyDoc {
    transitions: Vec<AffineTransform>,
    #[serde(default)]
    winding: i64,
    /// Translation scalars of a K-affine lift of the monodromy: series
    /// objects or bare rationals.
    lambda: Option<[Value; 2]>,
}

fn run_monodromy(input: &Input, output: &Output, focus_focus: Option<u32>, truncation: Option<i64>) -> Result<(), Failure> {
    let t = check_truncation(truncation)?;
    let doc = match (read_input(input)?, focus_focus) {
        (Some(text), None) => parse::<MonodromyDoc>(&text)?,
        (None, Some(n)) => {
            let w = (0..n).fold(LoopWord::default(), |acc, _| acc.then(&focus_focus_loop()));
            MonodromyDoc { transitions: w.transitions, winding: 0, lambda: None }
        }
        _ => return Err(invalid("give either a document or --focus-focus")),
    };
    let transitions = doc
        .transitions
        .into_iter()
        .map(|tr| AffineTransform::new(tr.linear, tr.translation))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    let m = monodromy(&LoopWord::new(transitions));
    let mut report = json!({ "monodromy": m });
    if wallcross::affine::det(&m.linear) == 1 {
        let lift = matrix_to_lift(&m.linear, doc.winding);
        report["lift"] = json!(lift);
        report["i"] = json!(wallcross::scalars::format_rational(&i_homomorphism(&lift)));
    }
    report["unipotent_class"] = json!(unipotent_conjugacy_class(&m.linear));
    if let Some(lambda) = doc.lambda {
        let scalar = |v: &Value| ValuedScalar::from_json(v).map(|c| truncate(&c, t)).map_err(invalid);
        let lambda = [scalar(&lambda[0])?, scalar(&lambda[1])?];
        let k = KAffineTransform::new(m.linear, lambda).map_err(invalid)?;
        report["fixed_vectors"] = match k_fixed_vectors(&k) {
            None => Value::Null,
            Some(f) => json!({ "particular": f.particular, "free_directions": f.free_directions }),
        };
        report["valuations_match"] = json!(valuations_match_fixed_points(&k));
    }
    emit_json(output, &report)
}

fn run_check_all(output: &Output, seed: u64, order: Option<usize>, suites: &[String]) -> Result<(), Failure> {
    let mut cfg = CheckConfig::new(seed);
    if let Some(k) = order {
        if k < 2 {
            return Err(invalid("check-all needs series order k of at least 2"));
        }
        cfg = cfg.with_order(k);
    }
    let report = if suites.is_empty() {
        check_all(&cfg)
    } else {
        let names: Vec<&str> = SUITES.iter().copied().filter(|s| suites.iter().any(|x| x == s)).collect();
        CheckReport { seed, suites: names.iter().filter_map(|s| run_suite(s, &cfg)).collect() }
    };
    emit_json(output, &report)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Factorize { input, output, order, f0, finf } => run_factorize(&input, &output, order, &f0, &finf),
        Command::Scatter { input, output, order, cutoff, format } => run_scatter(&input, &output, order, &cutoff, format),
        Command::GaussBonnet { input, output, focus_focus, genus } => run_gauss_bonnet(&input, &output, focus_focus, genus),
        Command::Tropical { input, output, truncation, format, lo, hi } => {
            run_tropical(&input, &output, truncation, format, lo, hi)
        }
        Command::Monodromy { input, output, focus_focus, truncation } => {
            run_monodromy(&input, &output, focus_focus, truncation)
        }
        Command::CheckAll { output, seed, order, suite } => run_check_all(&output, seed, order, &suite),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use wallcross::lattice::Covector;

    #[test]
    fn cli_definition_is_valid() {
        Cli::command().debug_assert();
    }

    #[test]
    fn covector_default_for_points() {
        let doc: ScatterDoc = serde_json::from_str(r#"{"points": [{"point": ["0", "1/2"]}]}"#).unwrap();
        assert_eq!(doc.points[0].alpha, Covector::DY);
    }
}
