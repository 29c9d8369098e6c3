//! Subcommands `ball`, `verify` and `bound`.
//!
//! Every command returns an [`Outcome`] holding its exit status, the text for
//! stdout/stderr and the files to write, so the binary is a thin shell around
//! [`run`]. Exit statuses: 0 success, 1 usage, 2 resource limits,
//! 3 verification counterexample, 4 bound regression.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use psl2z::bounds::{
    dirichlet_upper_bound, optimize_valuation, round_sig10, tree_upper_bound,
    verify_gabber_galil_hypotheses, BoundCertificate, GabberGalilReport, Valuation,
};
use psl2z::cayley::{build_ball, forbidden_suffixes_at, Ball, ProfileShape, DEFAULT_NODE_LIMIT};
use psl2z::typing::{
    automaton_geodesic_counts, automaton_sphere_counts, estimated_ball_size,
    extract_transition_table, verify_compatibility, TransitionTable, TypeId,
};
use psl2z::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RESOURCES: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;
pub const EXIT_BOUND_REGRESSION: i32 = 4;

/// Environment variable naming the output directory when `--output` is absent.
pub const OUTPUT_DIR_ENV: &str = "PSL2Z_OUTPUT_DIR";

/// Largest radius accepted by `ball --dot`.
pub const MAX_DOT_RADIUS: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "psl2z", version, about = "Cayley balls, cone types and spectral bounds for PSL(2,Z)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a ball and export its nodes and sphere sizes.
    Ball(BallArgs),
    /// Check the cone-type table, forbidden suffixes, edge-weight hypotheses
    /// and growth series on a ball.
    Verify(VerifyArgs),
    /// Optimize the edge weights and report the certified lower bound.
    Bound(BoundArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Directory for output files.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub output: Option<PathBuf>,
    /// Worker threads for verification sweeps; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also emit a DOT graph (radius at most 6).
    #[arg(long)]
    pub dot: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Check against a corrupted table (type 5 -> {3}); must fail.
    #[arg(long)]
    pub mutated_table: bool,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also compute the Dirichlet upper bound at --radius (default 10).
    #[arg(long)]
    pub upper: bool,
    /// Re-verify a stored certificate instead of optimizing.
    #[arg(long, value_name = "FILE")]
    pub check: Option<PathBuf>,
}

/// Validated settings shared by all subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub radius: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn from_args(args: &CommonArgs, default_radius: usize, default_format: Format) -> Result<Self, String> {
        if !(args.tolerance > 0.0 && args.tolerance.is_finite()) {
            return Err(format!("tolerance must be positive, got {}", args.tolerance));
        }
        if args.threads == Some(0) {
            return Err("--threads must be at least 1".into());
        }
        Ok(RunConfig {
            radius: args.radius.unwrap_or(default_radius),
            tolerance: args.tolerance,
            seed: args.seed,
            format: args.format.unwrap_or(default_format),
            output: args.output.clone(),
            threads: args.threads,
        })
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
    /// Files to write, relative to the output directory.
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            status: EXIT_USAGE,
            stderr: format!("error: {msg}\n"),
            ..Default::default()
        }
    }

    fn from_error(err: &Error) -> Self {
        let status = match err {
            Error::ResourceLimit { .. } => EXIT_RESOURCES,
            Error::BoundRegression { .. } => EXIT_BOUND_REGRESSION,
            Error::InsufficientRadius { .. } | Error::InvalidArgument(_) | Error::Certificate(_) => {
                EXIT_USAGE
            }
            _ => EXIT_COUNTEREXAMPLE,
        };
        Outcome {
            status,
            stderr: format!("error: {err}\n"),
            ..Default::default()
        }
    }

    /// Writes the pending files into `dir`.
    pub fn write_files(&self, dir: &std::path::Path) -> std::io::Result<()> {
        if self.files.is_empty() {
            return Ok(());
        }
        std::fs::create_dir_all(dir)?;
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content)?;
        }
        Ok(())
    }
}

/// Rounds every non-integer number in a JSON tree to 10 significant digits.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            json!(round_sig10(n.as_f64().expect("f64 number")))
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_json(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(value)).expect("plain JSON");
    s.push('\n');
    s
}

fn fmt10(x: f64) -> String {
    format!("{}", round_sig10(x))
}

fn build_checked(radius: usize) -> Result<Ball, Error> {
    if estimated_ball_size(radius) > DEFAULT_NODE_LIMIT as u64 {
        return Err(Error::ResourceLimit {
            limit: DEFAULT_NODE_LIMIT,
        });
    }
    build_ball(radius)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Parses arguments (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let status = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            return if status == EXIT_OK {
                Outcome {
                    status,
                    stdout: rendered,
                    ..Default::default()
                }
            } else {
                Outcome {
                    status,
                    stderr: rendered,
                    ..Default::default()
                }
            };
        }
    };
    match cli.command {
        Command::Ball(args) => match RunConfig::from_args(&args.common, 6, Format::Text) {
            Ok(cfg) => cmd_ball(&cfg, args.dot),
            Err(e) => Outcome::usage(e),
        },
        Command::Verify(args) => match RunConfig::from_args(&args.common, 12, Format::Json) {
            Ok(cfg) => cmd_verify(&cfg, args.mutated_table),
            Err(e) => Outcome::usage(e),
        },
        Command::Bound(args) => match RunConfig::from_args(&args.common, 10, Format::Json) {
            Ok(cfg) => match &args.check {
                Some(path) => cmd_check(&cfg, path),
                None => cmd_bound(&cfg, args.upper),
            },
            Err(e) => Outcome::usage(e),
        },
    }
}

pub fn cmd_ball(cfg: &RunConfig, dot: bool) -> Outcome {
    if dot && cfg.radius > MAX_DOT_RADIUS {
        return Outcome::usage(format!("--dot needs radius <= {MAX_DOT_RADIUS}"));
    }
    let ball = match build_checked(cfg.radius) {
        Ok(b) => b,
        Err(e) => return Outcome::from_error(&e),
    };
    let records = ball.export_records();
    let csv = ball.sphere_csv();
    let stdout = match cfg.format {
        Format::Text => records.clone(),
        Format::Csv => csv.clone(),
        Format::Json => to_json(json!({
            "radius": ball.radius(),
            "nodes": ball.len(),
            "spheres": ball.spheres(),
            "geodesic_words": ball.geodesic_word_counts(),
        })),
    };
    let mut files = vec![
        (PathBuf::from("ball.txt"), records),
        (PathBuf::from("spheres.csv"), csv),
    ];
    let stdout = if dot {
        let graph = ball.to_dot();
        files.push((PathBuf::from("ball.dot"), graph.clone()));
        if cfg.output.is_some() {
            stdout
        } else {
            graph
        }
    } else {
        stdout
    };
    Outcome {
        status: EXIT_OK,
        stdout,
        stderr: String::new(),
        files,
    }
}

fn gg_json(name: &str, c: &Valuation, report: &GabberGalilReport) -> Value {
    json!({
        "valuation": name,
        "c": c.values(),
        "passed": report.passed,
        "nodes_checked": report.nodes_checked,
        "max_norm": report.radius - report.max_norm_margin,
        "max_reciprocity_error": report.max_reciprocity_error,
        "max_sum_error": report.max_sum_error,
        "row_sums": report.row_sums,
        "violation_count": report.violation_count,
        "violations": report.violations,
    })
}

pub fn cmd_verify(cfg: &RunConfig, mutated_table: bool) -> Outcome {
    if cfg.radius < 4 {
        return Outcome::usage(format!(
            "verify needs radius >= 4 for the full transition table, got {}",
            cfg.radius
        ));
    }
    let result = with_threads(cfg.threads, || verify_all(cfg, mutated_table));
    let (report, passed) = match result {
        Ok(v) => v,
        Err(e) => return Outcome::from_error(&e),
    };
    let status = if passed { EXIT_OK } else { EXIT_COUNTEREXAMPLE };
    let stderr = if passed {
        String::new()
    } else {
        let dump: Value = json!({
            "compatibility": report["compatibility"]["counterexamples"],
            "shape": report["compatibility"]["shape_counterexamples"],
            "unclassified": report["compatibility"]["unclassified"],
            "forbidden_suffixes": report["forbidden_suffixes"]["violations"],
            "gabber_galil": report["gabber_galil"].as_array().map(|a| a.iter().map(|r| r["violations"].clone()).collect::<Vec<_>>()),
        });
        format!("verification failed; counterexamples:\n{}", to_json(dump))
    };
    let stdout = match cfg.format {
        Format::Json => to_json(report.clone()),
        Format::Text | Format::Csv => verify_summary(&report, cfg.format),
    };
    Outcome {
        status,
        stdout,
        stderr,
        files: vec![(PathBuf::from("verify_report.json"), to_json(report))],
    }
}

fn verify_summary(report: &Value, format: Format) -> String {
    let checks = [
        ("compatibility", &report["compatibility"]["passed"]),
        ("transition_table", &report["transition_table"]["matches_expected"]),
        ("forbidden_suffixes", &report["forbidden_suffixes"]["passed"]),
        ("gabber_galil_ones", &report["gabber_galil"][0]["passed"]),
        ("gabber_galil_optimized", &report["gabber_galil"][1]["passed"]),
        ("growth", &report["growth"]["passed"]),
    ];
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("check,passed\n");
            for (name, v) in checks {
                let _ = writeln!(out, "{name},{}", v.as_bool().unwrap_or(false));
            }
        }
        _ => {
            let _ = writeln!(out, "radius {}", report["radius"]);
            let _ = writeln!(out, "extracted table: {}", report["transition_table"]["text"].as_str().unwrap_or(""));
            for (name, v) in checks {
                let verdict = if v.as_bool().unwrap_or(false) { "pass" } else { "FAIL" };
                let _ = writeln!(out, "{name}: {verdict}");
            }
            let _ = writeln!(out, "overall: {}", if report["passed"].as_bool().unwrap_or(false) { "pass" } else { "FAIL" });
        }
    }
    out
}

fn verify_all(cfg: &RunConfig, mutated_table: bool) -> Result<(Value, bool), Error> {
    let ball = build_checked(cfg.radius)?;
    let expected = if mutated_table {
        TransitionTable::theorem().with_row(TypeId::new(5).expect("type 5"), vec![3])?
    } else {
        TransitionTable::theorem()
    };

    let compat = verify_compatibility(&ball, &expected)?;
    let (table_json, table_ok) = match extract_transition_table(&ball) {
        Ok(t) => {
            let ok = t == expected;
            (json!({ "rows": t, "text": t.to_string(), "matches_expected": ok }), ok)
        }
        Err(e) => (json!({ "error": e.to_string(), "matches_expected": false }), false),
    };

    let mut forbidden = Vec::new();
    let mut uncatalogued = Vec::new();
    for i in ball.indices() {
        forbidden.extend(forbidden_suffixes_at(&ball, i));
        let profile = ball.suffix_profile_at(i);
        if ProfileShape::classify(&profile).is_none() {
            uncatalogued.push(format!("{} {profile}", ball.node(i).element));
        }
    }
    let forbidden_ok = forbidden.is_empty() && uncatalogued.is_empty();

    let ones = Valuation::ones();
    let optimized = optimize_valuation(cfg.tolerance, cfg.seed)?;
    let gg_ones = verify_gabber_galil_hypotheses(&ones, &ball)?;
    let gg_opt = verify_gabber_galil_hypotheses(&optimized.valuation, &ball)?;

    let spheres: Vec<u64> = ball.spheres().iter().map(|&x| x as u64).collect();
    let predicted = automaton_sphere_counts(&expected, cfg.radius).ok();
    let geodesics = ball.geodesic_word_counts();
    let predicted_geodesics = automaton_geodesic_counts(&expected, cfg.radius);
    let growth_ok = predicted.as_ref() == Some(&spheres) && predicted_geodesics == geodesics;

    let passed = compat.passed
        && table_ok
        && forbidden_ok
        && gg_ones.passed
        && gg_opt.passed
        && growth_ok;
    let report = json!({
        "radius": cfg.radius,
        "seed": cfg.seed,
        "tolerance": cfg.tolerance,
        "nodes": ball.len(),
        "compatibility": compat,
        "transition_table": table_json,
        "forbidden_suffixes": {
            "nodes_checked": ball.len(),
            "violations": forbidden,
            "uncatalogued": uncatalogued,
            "passed": forbidden_ok,
        },
        "gabber_galil": [
            gg_json("ones", &ones, &gg_ones),
            gg_json("optimized", &optimized.valuation, &gg_opt),
        ],
        "growth": {
            "bfs_spheres": spheres,
            "automaton_spheres": predicted,
            "bfs_geodesic_words": geodesics,
            "automaton_geodesic_words": predicted_geodesics,
            "passed": growth_ok,
        },
        "passed": passed,
    });
    Ok((report, passed))
}

pub fn cmd_bound(cfg: &RunConfig, upper: bool) -> Outcome {
    let cert = match optimize_valuation(cfg.tolerance, cfg.seed) {
        Ok(c) => c,
        Err(e) => return Outcome::from_error(&e),
    };
    let tree = tree_upper_bound(3).expect("degree 3");
    let dirichlet = if upper {
        let res = build_checked(cfg.radius).and_then(|ball| dirichlet_upper_bound(&ball, 1e-10));
        match res {
            Ok(r) => Some(r),
            Err(e) => return Outcome::from_error(&e),
        }
    } else {
        None
    };
    let stdout = match cfg.format {
        Format::Json => to_json(json!({
            "certificate": cert.to_json_value(),
            "tree_upper_bound": tree,
            "dirichlet_upper_bound": dirichlet.as_ref().map(|d| json!({
                "radius": d.radius,
                "value": d.value,
            })),
        })),
        Format::Csv => {
            let mut s = String::from("quantity,value\n");
            let c = cert.valuation.values();
            for (k, v) in c.iter().enumerate() {
                let _ = writeln!(s, "c{},{}", k + 1, fmt10(*v));
            }
            for (k, v) in cert.f_values.iter().enumerate() {
                let _ = writeln!(s, "f{k},{}", fmt10(*v));
            }
            let _ = writeln!(s, "max_f,{}", fmt10(cert.max_f));
            let _ = writeln!(s, "lower_bound,{}", fmt10(cert.lower_bound));
            let _ = writeln!(s, "tree_upper_bound,{}", fmt10(tree));
            if let Some(d) = &dirichlet {
                let _ = writeln!(s, "dirichlet_upper_bound_r{},{}", d.radius, fmt10(d.value));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            let c: Vec<String> = cert.valuation.values().iter().map(|&x| fmt10(x)).collect();
            let _ = writeln!(s, "c = ({})", c.join(", "));
            let _ = writeln!(s, "max_k f_k(c) = {}", fmt10(cert.max_f));
            let _ = writeln!(s, "lower bound: mu0 >= {}", fmt10(cert.lower_bound));
            let _ = writeln!(s, "tree upper bound: mu0 <= {}", fmt10(tree));
            if let Some(d) = &dirichlet {
                let _ = writeln!(s, "dirichlet upper bound (radius {}): {}", d.radius, fmt10(d.value));
            }
            s
        }
    };
    Outcome {
        status: EXIT_OK,
        stdout,
        stderr: String::new(),
        files: vec![(PathBuf::from("certificate.json"), cert.to_json() + "\n")],
    }
}

pub fn cmd_check(cfg: &RunConfig, path: &std::path::Path) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("cannot read {}: {e}", path.display())),
    };
    let cert = match BoundCertificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => return Outcome::from_error(&e),
    };
    let check = cert.recheck();
    let status = if !check.consistent {
        EXIT_COUNTEREXAMPLE
    } else if !check.meets_threshold {
        EXIT_BOUND_REGRESSION
    } else {
        EXIT_OK
    };
    let stdout = match cfg.format {
        Format::Json => to_json(json!({
            "consistent": check.consistent,
            "meets_threshold": check.meets_threshold,
            "max_f": check.max_f,
            "lower_bound": check.lower_bound,
        })),
        _ => format!(
            "consistent: {}\nmax_f: {}\nlower bound: {}\nthreshold 2.93: {}\n",
            check.consistent,
            fmt10(check.max_f),
            fmt10(check.lower_bound),
            if check.meets_threshold { "met" } else { "missed" }
        ),
    };
    Outcome {
        status,
        stdout,
        stderr: String::new(),
        files: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(radius: usize, format: Format) -> RunConfig {
        RunConfig {
            radius,
            tolerance: 1e-8,
            seed: 7,
            format,
            output: None,
            threads: None,
        }
    }

    #[test]
    fn ball_spheres() {
        let out = cmd_ball(&cfg(2, Format::Csv), false);
        assert_eq!(out.status, EXIT_OK);
        assert_eq!(out.stdout, "n,count\n0,1\n1,3\n2,6\n");
        let out = cmd_ball(&cfg(0, Format::Text), false);
        assert_eq!(out.stdout.lines().count(), 1);
    }

    #[test]
    fn dot_radius_limit() {
        assert_eq!(cmd_ball(&cfg(7, Format::Text), true).status, EXIT_USAGE);
        assert!(cmd_ball(&cfg(2, Format::Text), true).stdout.starts_with("graph cayley"));
    }

    #[test]
    fn oversized_ball() {
        assert_eq!(cmd_ball(&cfg(60, Format::Csv), false).status, EXIT_RESOURCES);
    }

    #[test]
    fn verify_radius_precondition() {
        assert_eq!(cmd_verify(&cfg(3, Format::Json), false).status, EXIT_USAGE);
    }

    #[test]
    fn verify_mutation() {
        let out = cmd_verify(&cfg(6, Format::Text), true);
        assert_eq!(out.status, EXIT_COUNTEREXAMPLE);
        assert!(out.stderr.contains("counterexamples"));
        assert!(out.stdout.contains("compatibility: FAIL"));
    }

    #[test]
    fn round_json_numbers() {
        let v = round_json(json!({"a": 0.12345678901234, "b": [1, 2.5], "c": 3}));
        assert_eq!(v, json!({"a": 0.123456789, "b": [1, 2.5], "c": 3}));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["psl2z", "ball", "--radius", "-1"]).status, EXIT_USAGE);
        assert_eq!(run(["psl2z", "bogus"]).status, EXIT_USAGE);
        assert_eq!(run(["psl2z", "bound", "--tolerance", "0"]).status, EXIT_USAGE);
        assert_eq!(run(["psl2z", "--help"]).status, EXIT_OK);
    }
}
