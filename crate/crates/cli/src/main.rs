//! Command-line front end for the tau-function engine.
//!
//! Four subcommands: `tau` solves a model's series, `verify` runs exact
//! verification suites on it, `ops` prints the model's characteristic
//! operators, and `grassmannian` dumps the canonical spectral-curve basis.
//! JSON is the canonical output format (schemas are versioned via a
//! `schema` field and documented in the README); CSV is a flattened
//! derivative. Output is deterministic: identical bytes for identical
//! flags, independent of `--threads`.
//!
//! Exit codes: 0 success, 1 at least one verification check failed,
//! 2 unusable flags or flag combinations, 3 internal inconsistency.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use taukit::diffop::{bgw_ops, gkm_ops, ModelOps};
use taukit::scalar::parse_rat;
use taukit::tau::tau_model;
use taukit::verify::{
    check_factorization_identities, check_hirota_kp, check_reduction, check_virasoro,
    grassmannian_basis, miwa_crosscheck, BasisVector, ConstraintReport,
};
use taukit::{EngineKind, Model, TauSeries};

#[derive(Parser)]
#[command(
    name = "taukit",
    version,
    about = "Exact tau-series of monomial matrix models: solvers, verifiers, operator dumps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model's tau-series up to a grade and emit it.
    Tau(TauArgs),
    /// Re-verify a solved series against exact constraint suites.
    Verify(VerifyArgs),
    /// Print a model's characteristic operators in normal form.
    Ops(OpsArgs),
    /// Build and emit the canonical basis of the model's spectral flag.
    Grassmannian(GrassmannianArgs),
}

#[derive(Args)]
struct TauArgs {
    /// Model: kw, bgw, or gkm:<n>.
    #[arg(long)]
    model: String,
    /// Engine: nodes, cutjoin, or fermionic.
    #[arg(long, default_value = "nodes")]
    engine: String,
    /// Largest grade to solve for.
    #[arg(long)]
    degree: u32,
    /// Bind a model parameter, e.g. `N=1/2` (exact rational).
    #[arg(long)]
    subst: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Model: kw, bgw, or gkm:<n>.
    #[arg(long)]
    model: String,
    /// Engine used to solve the series under test (defaults to nodes, or
    /// fermionic for gkm models).
    #[arg(long)]
    engine: Option<String>,
    /// Comma-separated suites: virasoro, hirota, reduction, factorization,
    /// miwa.
    #[arg(long)]
    suite: String,
    /// Grade (and Miwa order) the checks run to.
    #[arg(long)]
    degree: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OpsArgs {
    /// Model: kw, bgw, or gkm:<n>.
    #[arg(long)]
    model: String,
    /// Operator to print: K, P, X, or R.
    #[arg(long)]
    which: String,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out_path: Option<PathBuf>,
}

#[derive(Args)]
struct GrassmannianArgs {
    /// Model: kw, bgw, or gkm:<n>.
    #[arg(long)]
    model: String,
    /// Number of basis vectors.
    #[arg(long, default_value_t = 3)]
    count: u32,
    /// Tail truncation order (vectors are exact through z^-order).
    #[arg(long)]
    order: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    out: OutFormat,
    /// Write to this file instead of stdout. A relative path is resolved
    /// under $TAUKIT_OUT_DIR when that variable is set.
    #[arg(long)]
    out_path: Option<PathBuf>,
    /// Worker threads for the internal parallel map; the output bytes do
    /// not depend on this.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Copy, Clone, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

/// Failure lanes, in order of exit code.
enum Failure {
    /// At least one verification check failed (exit 1).
    Check,
    /// The flags don't describe a runnable job (exit 2).
    Usage(String),
    /// The library reported an inconsistency no flag change explains
    /// (exit 3).
    Internal(String),
}

/// Library errors that indicate a bad request map to the usage lane;
/// everything else is an internal fault.
fn classify(e: taukit::Error) -> Failure {
    match e {
        taukit::Error::InvalidArgument(_) | taukit::Error::UnsupportedEngine { .. } => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Internal(other.to_string()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Tau(args) => run_tau(args),
        Command::Verify(args) => run_verify(args),
        Command::Ops(args) => run_ops(args),
        Command::Grassmannian(args) => run_grassmannian(args),
    }
}

fn parse_model(s: &str) -> Result<Model, Failure> {
    Model::from_str(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_engine(s: &str) -> Result<EngineKind, Failure> {
    EngineKind::from_str(s).map_err(|e| Failure::Usage(e.to_string()))
}

/// Writes `text` to stdout, or to the configured path in one atomic step so
/// a failed run never leaves a partial file behind.
fn emit(text: String, out_path: Option<PathBuf>) -> Result<(), Failure> {
    match out_path {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(p) => {
            let path = match std::env::var_os("TAUKIT_OUT_DIR") {
                Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
                _ => p,
            };
            std::fs::write(&path, text + "\n")
                .map_err(|e| Failure::Internal(format!("writing {}: {e}", path.display())))
        }
    }
}

fn run_tau(args: TauArgs) -> Result<(), Failure> {
    taukit::par::set_threads(args.output.threads);
    let model = parse_model(&args.model)?;
    let engine = parse_engine(&args.engine)?;
    let mut series = tau_model(model, engine, args.degree).map_err(classify)?;
    if let Some(binding) = &args.subst {
        let (name, value) = binding
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("binding `{binding}` is not NAME=VALUE")))?;
        if name.trim() != "N" {
            return Err(Failure::Usage(format!("unknown parameter `{}`", name.trim())));
        }
        let value = parse_rat(value.trim())
            .map_err(|e| Failure::Usage(format!("binding `{binding}`: {e}")))?;
        series = series.substitute_n(&value).map_err(classify)?;
    }
    let text = match args.output.out {
        OutFormat::Json => {
            let mut v = series.to_json_value();
            v["schema"] = json!("taukit.tau.v1");
            serde_json::to_string_pretty(&v).expect("serializable")
        }
        OutFormat::Csv => tau_csv(&series),
    };
    emit(text, args.output.out_path)
}

/// Flattens a series to two CSV lines: monomial keys, then coefficients.
fn tau_csv(series: &TauSeries) -> String {
    let full = series.full();
    let keys: Vec<String> = full.terms().map(|(m, _)| m.to_string()).collect();
    let vals: Vec<String> = full.terms().map(|(_, c)| c.to_string()).collect();
    format!("{}\n{}", keys.join(","), vals.join(","))
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    taukit::par::set_threads(args.output.threads);
    let model = parse_model(&args.model)?;
    let degree = args.degree;
    let engine = match &args.engine {
        Some(s) => parse_engine(s)?,
        None => match model {
            Model::Gkm(_) => EngineKind::Fermionic,
            _ => EngineKind::Nodes,
        },
    };
    let suites: Vec<&str> = args.suite.split(',').map(str::trim).collect();
    for s in &suites {
        if !["virasoro", "hirota", "reduction", "factorization", "miwa"].contains(s) {
            return Err(Failure::Usage(format!("unknown suite `{s}`")));
        }
    }

    let tau = tau_model(model, engine, degree).map_err(classify)?;
    let mut checks: Vec<ConstraintReport> = Vec::new();
    for suite in &suites {
        match *suite {
            "virasoro" => {
                let modes = match model {
                    Model::Kw => {
                        if degree < 1 {
                            return Err(Failure::Usage(
                                "virasoro suite needs --degree >= 1".into(),
                            ));
                        }
                        -1..=(degree as i64 - 3).div_euclid(2).clamp(-1, 3)
                    }
                    Model::Bgw => {
                        if degree < 1 {
                            return Err(Failure::Usage(
                                "virasoro suite needs --degree >= 1".into(),
                            ));
                        }
                        0..=3
                    }
                    Model::Gkm(_) => {
                        return Err(Failure::Usage(
                            "virasoro suite supports kw and bgw only".into(),
                        ))
                    }
                };
                checks.extend(check_virasoro(&tau, model, modes).map_err(classify)?);
            }
            "hirota" => checks.push(check_hirota_kp(&tau, degree).map_err(classify)?),
            "reduction" => {
                let step = match model {
                    Model::Kw | Model::Bgw => 2,
                    Model::Gkm(n) => n + 1,
                };
                let (mut report, constants) = check_reduction(&tau, step).map_err(classify)?;
                match model {
                    // The committed models must be outright independent of
                    // the reduced variables, not merely proportional.
                    Model::Kw | Model::Bgw => {
                        if constants.values().any(|c| !c.is_zero()) {
                            report.pass = false;
                            report.id.push_str(" [nonzero proportionality constant]");
                        }
                    }
                    Model::Gkm(_) => {
                        for (k, c) in &constants {
                            report.id.push_str(&format!(" [c_{k} = {c}]"));
                        }
                    }
                }
                checks.push(report);
            }
            "factorization" => {
                checks.extend(check_factorization_identities(degree).map_err(classify)?)
            }
            "miwa" => {
                let b = model.constraint_generator().map_err(classify)?;
                let basis = grassmannian_basis(&b, 1, degree).map_err(classify)?;
                checks.push(miwa_crosscheck(&tau, &basis, degree).map_err(classify)?);
            }
            _ => unreachable!("suites validated above"),
        }
    }

    let all_pass = checks.iter().all(|c| c.pass);
    let text = match args.output.out {
        OutFormat::Json => {
            let v = json!({
                "schema": "taukit.report.v1",
                "model": model.to_string(),
                "degree": degree,
                "suite": suites.join(","),
                "checks": checks.iter().map(ConstraintReport::to_json_value).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).expect("serializable")
        }
        OutFormat::Csv => {
            let mut lines = vec!["id,pass,max_grade".to_string()];
            for c in &checks {
                lines.push(format!("{},{},{}", c.id.replace(',', ";"), c.pass, c.max_grade));
            }
            lines.join("\n")
        }
    };
    emit(text, args.output.out_path)?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn model_ops(model: Model) -> Result<ModelOps, Failure> {
    match model {
        Model::Kw => gkm_ops(1).map_err(classify),
        Model::Bgw => Ok(bgw_ops()),
        Model::Gkm(n) => gkm_ops(n).map_err(classify),
    }
}

fn run_ops(args: OpsArgs) -> Result<(), Failure> {
    let ops = model_ops(parse_model(&args.model)?)?;
    let op = match args.which.to_ascii_uppercase().as_str() {
        "K" => &ops.k,
        "P" => &ops.p,
        "X" => &ops.x,
        "R" => &ops.r,
        other => {
            return Err(Failure::Usage(format!(
                "unknown operator `{other}`; expected K, P, X, or R"
            )))
        }
    };
    emit(op.to_string(), args.out_path)
}

fn run_grassmannian(args: GrassmannianArgs) -> Result<(), Failure> {
    taukit::par::set_threads(args.output.threads);
    let model = parse_model(&args.model)?;
    let b = model.constraint_generator().map_err(classify)?;
    let basis = grassmannian_basis(&b, args.count, args.order).map_err(classify)?;
    let text = match args.output.out {
        OutFormat::Json => {
            let vectors: Vec<Value> = basis
                .iter()
                .map(|v: &BasisVector| {
                    let tail: serde_json::Map<String, Value> = v
                        .tail
                        .iter()
                        .map(|(i, c)| (i.to_string(), json!(c.to_string())))
                        .collect();
                    json!({"leading": v.leading, "tail": tail})
                })
                .collect();
            let v = json!({
                "schema": "taukit.basis.v1",
                "model": model.to_string(),
                "order": args.order,
                "vectors": vectors,
            });
            serde_json::to_string_pretty(&v).expect("serializable")
        }
        OutFormat::Csv => {
            let mut lines = vec!["vector,power,coefficient".to_string()];
            for (j, v) in basis.iter().enumerate() {
                lines.push(format!("{},{},1", j + 1, v.leading));
                for (i, c) in &v.tail {
                    lines.push(format!("{},-{i},{c}", j + 1));
                }
            }
            lines.join("\n")
        }
    };
    emit(text, args.output.out_path)
}
