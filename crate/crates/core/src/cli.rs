//! Command-line front end.
//!
//! Exit codes: 0 for success or a trivial verdict, 1 for a nontrivial verdict
//! or a failed fixture, 2 for malformed input or any library error (error JSON
//! on stderr).

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::appendix::{all_checks, all_passed};
use crate::congruence::{triviality_in_dbar, Verdict};
use crate::eisenstein::{eisenstein_gamma3_odd, eisenstein_level1, g_star};
use crate::error::{Error, Result};
use crate::finv::{e_circle, f_double_transfer, f_product, lookup, working_order, TransferProblem, TransferTerms};
use crate::genus::{ell_series, todd_series};
use crate::modforms::{fit, sturm_bound, FIT_MARGIN};
use crate::qseries::{bigint_from_json, qzeta_to_json, rat_to_json_pair, QSeries};

pub const SCHEMA: u32 = 1;

/// Smallest `--order` accepted outside `eis`.
pub const MIN_ORDER: usize = 12;

pub const SIGN_NOTE: &str =
    "e-invariant signs follow the built-in table (eta 1/2, nu -1/12, sigma 1/240); verdicts are sign independent";

#[derive(Debug, Parser)]
#[command(name = "divcong", version, about = "Exact q-expansions, elliptic genus and divided-congruence triviality on Gamma1(3)")]
pub struct Cli {
    /// Truncation order T of q-expansions.
    #[arg(long, global = true, default_value_t = 50)]
    pub order: usize,

    /// Degree D of the genus series in x.
    #[arg(long, global = true, default_value_t = 8)]
    pub degree: usize,

    /// Largest power of 3 allowed when scaling a triviality witness.
    #[arg(long, global = true, default_value_t = 8)]
    pub amax: usize,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EisKind {
    /// Level-one `E_k`, even `k`.
    Level1,
    /// Odd `E_k` on `Gamma1(3)`.
    Gamma3,
    /// `G*_k`, even `k`.
    Gstar,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print an Eisenstein series.
    Eis {
        #[arg(long, value_enum)]
        kind: EisKind,
        #[arg(long)]
        k: usize,
    },
    /// Print the elliptic genus coefficients up to x^D.
    Genus,
    /// Write a q-series (JSON on stdin or --input) as a polynomial in E1, E3.
    Fit {
        #[arg(long)]
        weight: usize,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Decide triviality of a q-series in Dbar_k (x) Q/Z.
    Trivial {
        #[arg(long)]
        weight: usize,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// f-invariant of a product of two framed elements.
    FProduct {
        #[arg(long)]
        y1: String,
        #[arg(long)]
        y2: String,
    },
    /// f-invariant of a double transfer over a closed framed 2n-manifold.
    FTransfer {
        #[arg(long)]
        n: usize,
        /// Intersection numbers <x^a y^(n-a)>: a JSON array indexed by a, or an object keyed by a.
        #[arg(long)]
        inter: String,
        /// Keep the k = 0 and k = n terms.
        #[arg(long)]
        boundary_terms: bool,
    },
    /// e-invariant of the circle bundle of a line over a 2k-dimensional base.
    ECircle {
        #[arg(long)]
        k: usize,
        /// <c1^k, [B]>.
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
    },
    /// Run the fixture suite and print PASS/FAIL per check.
    VerifyAppendix,
}

/// Result of one command before rendering.
struct Report {
    json: Value,
    text: String,
    code: i32,
}

fn ok(json: Value, text: String) -> Result<Report> {
    Ok(Report { json, text, code: 0 })
}

fn with_schema(command: &str, mut v: Value) -> Value {
    let obj = v.as_object_mut().expect("report is an object");
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("command".into(), json!(command));
    v
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eis { .. } => "eis",
        Command::Genus => "genus",
        Command::Fit { .. } => "fit",
        Command::Trivial { .. } => "trivial",
        Command::FProduct { .. } => "f-product",
        Command::FTransfer { .. } => "f-transfer",
        Command::ECircle { .. } => "e-circle",
        Command::VerifyAppendix => "verify-appendix",
    }
}

fn read_series(input: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<QSeries> {
    let mut buf = String::new();
    match input {
        Some(p) => {
            buf = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        }
        None => {
            stdin.read_to_string(&mut buf).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        }
    }
    let v: Value = serde_json::from_str(&buf).map_err(|e| Error::Parse(e.to_string()))?;
    QSeries::from_json(&v)
}

fn parse_inter(n: usize, s: &str) -> Result<BTreeMap<usize, BigInt>> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("--inter: {e}")))?;
    let mut out = BTreeMap::new();
    match v {
        Value::Array(items) => {
            if items.len() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, got: items.len() });
            }
            for (a, x) in items.iter().enumerate() {
                out.insert(a, bigint_from_json(x)?);
            }
        }
        Value::Object(map) => {
            for (k, x) in &map {
                let a = k.parse::<usize>().map_err(|_| Error::Parse(format!("--inter key `{k}` is not an x-power")))?;
                out.insert(a, bigint_from_json(x)?);
            }
        }
        _ => return Err(Error::Parse("--inter must be a JSON array or object".into())),
    }
    Ok(out)
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Nontrivial { weight, order, certificate } => format!(
            "verdict: nontrivial in weight {weight} (order {order}); certificate value {} at q^{:?}",
            certificate.value,
            certificate.q_indices()
        ),
        Verdict::TrivialToOrder { weight, order, witness } => format!(
            "verdict: trivial to order {order} in weight {weight}; witness {} + {} (scaling 3^{})",
            witness.form, witness.c0, witness.scaling
        ),
    }
}

fn verdict_code(v: &Verdict) -> i32 {
    if v.is_trivial() {
        0
    } else {
        1
    }
}

fn check_order(order: usize) -> Result<()> {
    if order < MIN_ORDER {
        return Err(Error::InvalidArgument(format!("--order must be at least {MIN_ORDER}, got {order}")));
    }
    Ok(())
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Report> {
    let t = cli.order;
    if !matches!(cli.command, Command::Eis { .. }) {
        check_order(t)?;
    }
    match &cli.command {
        Command::Eis { kind, k } => {
            let f = match kind {
                EisKind::Level1 => eisenstein_level1(*k, t)?,
                EisKind::Gamma3 => eisenstein_gamma3_odd(*k, t)?,
                EisKind::Gstar => g_star(*k, t)?,
            };
            let kind = kind.to_possible_value().expect("named").get_name().to_string();
            ok(json!({"kind": kind, "k": k, "series": f.to_json()}), f.to_string())
        }
        Command::Genus => {
            if cli.degree < 2 {
                return Err(Error::InvalidArgument(format!("--degree must be at least 2, got {}", cli.degree)));
            }
            let ell = ell_series(cli.degree, t)?;
            let todd = todd_series(cli.degree);
            let mut lines = Vec::new();
            let mut coeffs = Vec::new();
            for (m, g) in ell.coeffs().iter().enumerate() {
                lines.push(format!("x^{m}: {g}"));
                coeffs.push(json!({
                    "degree": m,
                    "form": g.to_json(),
                    "q0": qzeta_to_json(&g.constant_term()),
                    "todd": rat_to_json_pair(&todd[m]),
                }));
            }
            ok(json!({"degree": cli.degree, "coeffs": coeffs}), lines.join("\n"))
        }
        Command::Fit { weight, input } => {
            let f = read_series(input, stdin)?;
            let needed = sturm_bound(*weight) + FIT_MARGIN;
            if f.order() < needed {
                return Err(Error::InsufficientOrder { needed, got: f.order() });
            }
            let m = fit(&f, *weight)?;
            ok(json!({"weight": weight, "form": m.to_json()}), m.to_string())
        }
        Command::Trivial { weight, input } => {
            let f = read_series(input, stdin)?;
            let order = f.order().min(t);
            let v = triviality_in_dbar(&f, *weight, order, cli.amax)?;
            let code = verdict_code(&v);
            Ok(Report { json: json!({"verdict": v.to_json()}), text: verdict_text(&v), code })
        }
        Command::FProduct { y1, y2 } => {
            let (a, b) = (lookup(y1)?, lookup(y2)?);
            let weight = (a.dim + b.dim + 2) / 2;
            let work = working_order(weight, t);
            let rep = f_product(&a, &b, work)?;
            let v = triviality_in_dbar(&rep.series, weight, work, cli.amax)?;
            let shown = rep.series.truncate(t);
            let json = json!({
                "y1": a.to_json(), "y2": b.to_json(), "weight": weight,
                "series": shown.to_json(), "verdict": v.to_json(), "note": SIGN_NOTE,
            });
            let text = format!("f({} x {}) = {shown}\n{}\nnote: {SIGN_NOTE}", a.name, b.name, verdict_text(&v));
            Ok(Report { json, text, code: verdict_code(&v) })
        }
        Command::FTransfer { n, inter, boundary_terms } => {
            let p = TransferProblem::new(*n, parse_inter(*n, inter)?)?;
            let terms = if *boundary_terms { TransferTerms::WithBoundary } else { TransferTerms::Interior };
            let weight = n + 2;
            let work = working_order(weight, t);
            let rep = f_double_transfer(&p, work, terms)?;
            let v = triviality_in_dbar(&rep.series, weight, work, cli.amax)?;
            let shown = rep.series.truncate(t);
            let json = json!({
                "problem": p.to_json(), "weight": weight, "boundary_terms": boundary_terms,
                "series": shown.to_json(), "verdict": v.to_json(), "note": SIGN_NOTE,
            });
            let text = format!("f = {shown}\n{}\nnote: {SIGN_NOTE}", verdict_text(&v));
            Ok(Report { json, text, code: verdict_code(&v) })
        }
        Command::ECircle { k, c1 } => {
            if *k == 0 {
                return Err(Error::InvalidArgument("--k must be positive".into()));
            }
            let c1: BigInt = c1.parse().map_err(|_| Error::Parse(format!("--c1 `{c1}` is not an integer")))?;
            let e = e_circle(*k, &c1);
            ok(json!({"k": k, "c1": c1.to_string(), "e": rat_to_json_pair(&e)}), format!("e = {e}"))
        }
        Command::VerifyAppendix => {
            let checks = all_checks(t, cli.amax)?;
            let lines: Vec<String> = checks
                .iter()
                .map(|c| format!("{} [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.group, c.name, c.detail))
                .collect();
            let passed = all_passed(&checks);
            let json = json!({
                "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                "passed": passed,
            });
            Ok(Report { json, text: lines.join("\n"), code: if passed { 0 } else { 1 } })
        }
    }
}

fn error_json(e: &Error) -> Value {
    json!({"schema": SCHEMA, "error": {"kind": e.kind(), "message": e.to_string()}})
}

fn emit(w: &mut dyn Write, s: &str) {
    // a closed pipe is not worth a panic
    let _ = writeln!(w, "{s}");
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(stdout, e.to_string().trim_end());
                return 0;
            }
            let err = Error::Parse(e.to_string().lines().next().unwrap_or("bad arguments").to_string());
            emit(stderr, &error_json(&err).to_string());
            return 2;
        }
    };
    match execute(&cli, stdin) {
        Ok(report) => {
            match cli.output {
                Output::Json => {
                    let v = with_schema(command_name(&cli.command), report.json);
                    emit(stdout, &serde_json::to_string_pretty(&v).expect("serializable"));
                }
                Output::Text => emit(stdout, &report.text),
            }
            report.code
        }
        Err(e) => {
            emit(stderr, &error_json(&e).to_string());
            2
        }
    }
}
