//! Command-line front end: subcommands, flags, output formats and exit codes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::casimir_matrix::{verify_c_decomposition, verify_j_casimir, verify_projection};
use crate::decomposition::{joint_eigenspaces, label_casimir, verify_normalizations, DEFAULT_MATRIX_CAP};
use crate::error::{Error, Result};
use crate::flat_model::{
    verify_comfor, verify_complex, verify_killing_examples, verify_killing_projections, verify_reindexing, FlatConfig,
    FlatModel, DEFAULT_DEGREE_CAP,
};
use crate::quaternionic::{
    verify_alg_commutators, verify_basic_commutators, verify_frame, verify_spot_values, verify_structural,
    OperatorFamily, QuaternionicFrame, SweepConfig,
};
use crate::rep_theory::RepLabel;
use crate::report::{CheckRecord, Report, Status, Verdict};
use crate::theorem_checker::{theorem_report, verify_injectivity_range};

/// Exit code for a passing or ambiguous run.
pub const EXIT_PASS: i32 = 0;
/// Exit code for a verification failure.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for a usage error.
pub const EXIT_USAGE: i32 = 2;

/// Largest ambient dimension for which the theorem checker sweeps
/// injectivity of `Λ` over every degree.
const INJECTIVITY_SWEEP_CAP: usize = 12;

/// An inclusive integer range written `a` or `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn iter(self) -> RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a non-negative integer: {t:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Span { lo, hi })
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

fn parse_label(s: &str) -> std::result::Result<RepLabel, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("label entries must be non-negative integers: {s:?}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [k, a, b] => Ok(RepLabel::new(k, a, b)),
        _ => Err(format!("label must be k,a,b: {s:?}")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Parser)]
#[command(
    name = "qkforms",
    version,
    about = "Exact verification of natural operators on forms of quaternion-Kähler type"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Quaternionic dimension m (ambient dimension 4m); `a` or `a..b`.
    #[arg(long, global = true)]
    pub m: Option<Span>,
    /// Range of m; same as --m.
    #[arg(long = "m-range", global = true)]
    pub m_range: Option<Span>,
    /// A single form degree.
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Range of form degrees, `a..b` inclusive.
    #[arg(long = "p-range", global = true)]
    pub p_range: Option<Span>,
    /// Seed for random samples.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Polynomial degree cap for flat-model samples.
    #[arg(long = "degree-cap", global = true, default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: usize,
    /// Largest ambient dimension 4m for which matrices are materialized.
    #[arg(long = "matrix-cap", global = true, default_value_t = DEFAULT_MATRIX_CAP)]
    pub matrix_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame, commutator and adjointness relations of the algebraic operators.
    VerifyAlgebra,
    /// Decompose Λ^p into joint eigenspaces of J and C.
    Decompose,
    /// Casimir identities, or the Casimir of one label with --label k,a,b.
    Casimir {
        #[arg(long, value_parser = parse_label)]
        label: Option<RepLabel>,
    },
    /// Differential identities, projections and Killing examples on flat space.
    Flat,
    /// Enumerate the eigenvalue system and certify the case analysis.
    CheckTheorem,
    /// Every suite.
    All,
}

/// Validated run configuration, echoed into every report.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub m: Span,
    pub p: Option<Span>,
    pub seed: u64,
    pub degree_cap: usize,
    pub matrix_cap: usize,
    pub label: Option<RepLabel>,
}

impl RunConfig {
    fn to_json(&self) -> serde_json::Value {
        json!({
            "command": self.command,
            "m": self.m.to_string(),
            "p": self.p.map(|s| s.to_string()),
            "seed": self.seed,
            "degree_cap": self.degree_cap,
            "matrix_cap": self.matrix_cap,
            "label": self.label.map(|l| l.to_string()),
        })
    }

    fn degrees(&self, m: usize) -> Vec<usize> {
        let n = 4 * m;
        match self.p {
            Some(s) => s.iter().filter(|&p| p <= n).collect(),
            None => (0..=n).collect(),
        }
    }

    fn frame(&self, m: usize) -> Result<QuaternionicFrame> {
        QuaternionicFrame::new(m)
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let command = match cli.command {
        Command::VerifyAlgebra => "verify-algebra",
        Command::Decompose => "decompose",
        Command::Casimir { .. } => "casimir",
        Command::Flat => "flat",
        Command::CheckTheorem => "check-theorem",
        Command::All => "all",
    };
    let default_m = if command == "check-theorem" { Span { lo: 2, hi: 10 } } else { Span { lo: 2, hi: 2 } };
    let m = match (cli.m, cli.m_range) {
        (Some(_), Some(_)) => return Err(usage("give either --m or --m-range, not both")),
        (Some(s), None) | (None, Some(s)) => s,
        (None, None) => default_m,
    };
    if m.lo < 2 {
        return Err(usage(format!("m ≥ 2 required, got {}", m.lo)));
    }
    let p = match (cli.p, cli.p_range) {
        (Some(_), Some(_)) => return Err(usage("give either --p or --p-range, not both")),
        (Some(v), None) => Some(Span { lo: v, hi: v }),
        (None, r) => r,
    };
    if command != "check-theorem" {
        if 4 * m.hi > cli.matrix_cap {
            return Err(Error::MatrixCap { n: 4 * m.hi, cap: cli.matrix_cap });
        }
        if let Some(p) = p {
            if p.lo > 4 * m.hi {
                return Err(usage(format!("p = {} exceeds 4m = {}", p.lo, 4 * m.hi)));
            }
        }
    }
    let label = match &cli.command {
        Command::Casimir { label } => *label,
        _ => None,
    };
    Ok(RunConfig { command, m, p, seed: cli.seed, degree_cap: cli.degree_cap, matrix_cap: cli.matrix_cap, label })
}

pub fn run_verify_algebra(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for m in cfg.m.iter() {
        let frame = cfg.frame(m)?;
        let degrees = cfg.degrees(m);
        let sweep = SweepConfig { seed: cfg.seed, random_vectors: 3, degrees: Some(degrees.clone()) };
        out.extend(verify_frame(&frame));
        out.extend(verify_basic_commutators(&frame, &sweep));
        out.extend(verify_alg_commutators(&frame, &sweep));
        out.extend(verify_structural(&frame, Some(&degrees)));
        out.extend(verify_spot_values(&frame));
    }
    Ok(out)
}

pub fn run_decompose(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for m in cfg.m.iter() {
        let fam = OperatorFamily::new(&cfg.frame(m)?);
        let per_p: Vec<Vec<CheckRecord>> = cfg
            .degrees(m)
            .par_iter()
            .map(|&p| {
                let mut recs = vec![joint_eigenspaces(&fam, p, cfg.matrix_cap)?.record()];
                recs.extend(verify_normalizations(&fam, p, cfg.matrix_cap)?);
                Ok(recs)
            })
            .collect::<Result<_>>()?;
        out.extend(per_p.into_iter().flatten());
    }
    Ok(out)
}

pub fn run_casimir(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for m in cfg.m.iter() {
        let frame = cfg.frame(m)?;
        if let Some(label) = cfg.label {
            out.extend(label_casimir(&OperatorFamily::new(&frame), label, cfg.matrix_cap)?);
            continue;
        }
        let per_p: Vec<Vec<CheckRecord>> = cfg
            .degrees(m)
            .par_iter()
            .map(|&p| {
                let mut recs = verify_c_decomposition(&frame, p)?;
                recs.push(verify_j_casimir(&frame, p)?);
                Ok(recs)
            })
            .collect::<Result<_>>()?;
        out.extend(per_p.into_iter().flatten());
        out.extend(verify_projection(&frame)?);
    }
    Ok(out)
}

pub fn run_flat(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let flat = FlatConfig { degree_cap: cfg.degree_cap, seed: cfg.seed, random_samples: 4 };
    for m in cfg.m.iter() {
        let model = FlatModel::new(&cfg.frame(m)?);
        for p in cfg.degrees(m) {
            out.extend(verify_comfor(&model, p, &flat));
            out.extend(verify_complex(&model, p, &flat));
            out.extend(verify_killing_projections(&model, p));
            out.extend(verify_reindexing(model.family(), p));
        }
        out.extend(verify_killing_examples(&model)?);
    }
    Ok(out)
}

pub fn run_check_theorem(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let p_range = cfg.p.map(|s| (s.lo, s.hi));
    let report = theorem_report(cfg.m.iter(), p_range, cfg.matrix_cap)?;
    let mut out = report.records;
    for m in cfg.m.iter().filter(|&m| 4 * m <= cfg.matrix_cap.min(INJECTIVITY_SWEEP_CAP)) {
        out.extend(verify_injectivity_range(m, cfg.matrix_cap)?);
    }
    Ok(out)
}

fn run_command(cmd: &Command, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    match cmd {
        Command::VerifyAlgebra => run_verify_algebra(cfg),
        Command::Decompose => run_decompose(cfg),
        Command::Casimir { .. } => run_casimir(cfg),
        Command::Flat => run_flat(cfg),
        Command::CheckTheorem => run_check_theorem(cfg),
        Command::All => {
            let mut out = run_verify_algebra(cfg)?;
            out.extend(run_decompose(cfg)?);
            out.extend(run_casimir(cfg)?);
            out.extend(run_flat(cfg)?);
            out.extend(run_check_theorem(cfg)?);
            Ok(out)
        }
    }
}

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is serializable");
    s.push('\n');
    s
}

pub fn render_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(["id", "paper_anchor", "status", "residual_nonzero", "residual_max_abs", "params", "detail"])
        .map_err(io)?;
    for r in &report.records {
        let status = serde_json::to_value(r.status).expect("serializable");
        w.write_record([
            r.id.clone(),
            r.paper_anchor.clone(),
            status.as_str().unwrap_or_default().to_string(),
            r.residual.as_ref().map(|x| x.nonzero.to_string()).unwrap_or_default(),
            r.residual.as_ref().map(|x| x.max_abs.to_string()).unwrap_or_default(),
            serde_json::to_string(&r.params).expect("serializable"),
            r.detail.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn render_human(report: &Report, elapsed: Option<std::time::Duration>) -> String {
    let mut s = String::new();
    for r in &report.records {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Ambiguous => "AMBIG",
            Status::Info => "INFO",
        };
        let params: Vec<String> =
            r.params.iter().filter(|(k, _)| k.as_str() != "entries").map(|(k, v)| format!("{k}={v}")).collect();
        let _ = write!(s, "{tag:5} {:40} {}", r.id, params.join(" "));
        if let Some(res) = r.residual.as_ref().filter(|x| !x.is_zero()) {
            let _ = write!(s, "  residual: {} nonzero, max {}", res.nonzero, res.max_abs);
        }
        s.push('\n');
        if r.status == Status::Fail {
            let _ = writeln!(s, "      {}", r.paper_anchor);
        }
        if let Some(d) = &r.detail {
            let _ = writeln!(s, "      {d}");
        }
    }
    let count = |st: Status| report.records.iter().filter(|r| r.status == st).count();
    let _ = write!(
        s,
        "\n{} records: {} pass, {} fail, {} ambiguous, {} info",
        report.records.len(),
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Ambiguous),
        count(Status::Info)
    );
    if let Some(t) = elapsed {
        let _ = write!(s, " ({:.2?})", t);
    }
    let _ = writeln!(s, "\nverdict: {:?}", report.verdict);
    s
}

/// Exit code for a verdict.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass | Verdict::Ambiguous => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
    }
}

/// Build the report for a parsed command line.
pub fn execute(cli: &Cli) -> Result<Report> {
    let cfg = build_config(cli)?;
    let records = run_command(&cli.command, &cfg)?;
    Ok(Report::new(cfg.to_json(), records))
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::InvalidParameter(_) | Error::MatrixCap { .. })
}

/// Run with explicit arguments (the first is the program name) and return the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let start = Instant::now();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if is_usage(&e) { EXIT_USAGE } else { EXIT_FAIL };
        }
    };
    let text = match cli.format {
        Format::Json => render_json(&report),
        Format::Csv => match render_csv(&report) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_FAIL;
            }
        },
        Format::Human => render_human(&report, Some(start.elapsed())),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_FAIL;
    }
    exit_code(report.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans() {
        assert_eq!("2..10".parse::<Span>().unwrap(), Span { lo: 2, hi: 10 });
        assert_eq!("3".parse::<Span>().unwrap(), Span { lo: 3, hi: 3 });
        assert_eq!("2..=4".parse::<Span>().unwrap(), Span { lo: 2, hi: 4 });
        assert!("5..2".parse::<Span>().is_err());
        assert!("x".parse::<Span>().is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(parse_label("0,1,1").unwrap(), RepLabel::new(0, 1, 1));
        assert!(parse_label("0,1").is_err());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["qkforms", "verify-algebra", "--m", "0"]), EXIT_USAGE);
        assert_eq!(run(["qkforms", "verify-algebra", "--m", "1"]), EXIT_USAGE);
        assert_eq!(run(["qkforms", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["qkforms", "decompose", "--m", "2", "--p", "9"]), EXIT_USAGE);
        assert_eq!(run(["qkforms", "decompose", "--m", "5"]), EXIT_USAGE);
    }

    #[test]
    fn decompose_p2_json() {
        let cli = Cli::try_parse_from(["qkforms", "decompose", "--m", "2", "--p", "2", "--format", "json"]).unwrap();
        let report = execute(&cli).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        let text = render_json(&report);
        assert!(text.ends_with("}\n"));
        assert_eq!(text, render_json(&execute(&cli).unwrap()));
        let csv = render_csv(&report).unwrap();
        assert_eq!(csv.lines().count(), report.records.len() + 1);
    }
}
