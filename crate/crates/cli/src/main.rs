mod config;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{Format, RawArgs, RunConfig, SEED_ENV};
use suites::{chern_report, run_suite, table_report, Check, SUITES};

#[derive(Parser)]
#[command(name = "charp-bundles", version, about = "Chern classes, cohomology tables and verification suites for Frobenius-modified bundles on P^n x P^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, total Chern class and Chern-class cross-checks.
    Chern(Common),
    /// Cohomology table over a twist box.
    Table(Common),
    /// Run a named verification suite (or `all`).
    Verify {
        #[arg(long)]
        suite: String,
        /// Twist bound for the nondegeneracy search.
        #[arg(long, default_value_t = 10)]
        search_bound: i64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Frobenius exponent: q = p^a.
    #[arg(long, default_value_t = 1)]
    a: u32,
    #[arg(long)]
    k: Option<u64>,
    /// Twists range over [-box, box]^2.
    #[arg(long = "box", default_value_t = 3)]
    box_half: i64,
    /// Extension degree e of F_{p^e}; defaults to the smallest with p^e >= 64.
    #[arg(long)]
    extension: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON matrix of field elements for the bilinear form.
    #[arg(long)]
    form_file: Option<PathBuf>,
    #[arg(long)]
    random_form: bool,
}

impl Common {
    fn raw(self) -> RawArgs {
        RawArgs {
            n: self.n,
            p: self.p,
            a: self.a,
            k: self.k,
            box_half: self.box_half,
            extension: self.extension,
            seed: self.seed,
            format: self.format,
            out: self.out,
            form_file: self.form_file,
            random_form: self.random_form,
        }
    }
}

enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn emit(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn json_report(cfg: &RunConfig, data: Value, checks: &[Check]) -> String {
    let passed = checks.iter().all(|c| c.passed);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let report = json!({
        "config": cfg,
        "passed": passed,
        "summary": {"checks": checks.len(), "failed": failed},
        "checks": checks,
        "data": data,
    });
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

fn run(cli: Cli) -> std::result::Result<bool, Failure> {
    let (name, suite, common, search_bound) = match cli.command {
        Command::Chern(c) => ("chern", None, c, 0),
        Command::Table(c) => ("table", None, c, 0),
        Command::Verify { suite, search_bound, common } => ("verify", Some(suite), common, search_bound),
    };
    let cfg = RunConfig::resolve(name, suite.clone(), common.raw()).map_err(Failure::Usage)?;
    let field = cfg.field().map_err(Failure::Usage)?;
    // Surface form-file problems as usage errors before any computation.
    cfg.form(&field).map_err(Failure::Usage)?;
    let (body, passed) = match name {
        "chern" => {
            let (data, checks) = chern_report(&cfg, &field).map_err(Failure::Run)?;
            (json_report(&cfg, data, &checks), checks.iter().all(|c| c.passed))
        }
        "table" => {
            let (table, data, checks) = table_report(&cfg, &field).map_err(Failure::Run)?;
            let passed = checks.iter().all(|c| c.passed);
            let body = match cfg.format {
                Format::Csv => table.to_csv(),
                Format::Json => {
                    let data = json!({"table": table.to_json(), "chi": data["chi"]});
                    json_report(&cfg, data, &checks)
                }
            };
            (body, passed)
        }
        _ => {
            let suite = suite.expect("verify has a suite");
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else if SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(Failure::Usage(anyhow::anyhow!(
                    "unknown suite {suite}; expected one of {SUITES:?} or all"
                )));
            };
            let mut checks = Vec::new();
            for s in names {
                checks.extend(run_suite(s, &cfg, &field, search_bound).map_err(Failure::Run)?);
            }
            let passed = checks.iter().all(|c| c.passed);
            (json_report(&cfg, Value::Null, &checks), passed)
        }
    };
    emit(&cfg, &body).map_err(Failure::Run)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            eprintln!("(default seed may be set with {SEED_ENV})");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
