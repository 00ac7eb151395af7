//! `gaussent` command line: measures on QCM files, loss-family sweeps, law suites,
//! Williamson decompositions and purifications.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 input validation
//! error, 4 numeric failure. Errors go to stderr as `{"error":{"kind":..,"message":..}}`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gaussent::entanglement::GieBudget;
use gaussent::model::io::{qcm_to_json, read_qcm};
use gaussent::model::{purify, Qcm, Split};
use gaussent::registry::{measure_report, select_measures, MeasureContext};
use gaussent::sweep::loss_sweep;
use gaussent::symplectic::williamson;
use gaussent::verify::{run_suite, suite_names};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] gaussent::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Lib(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Csv(_) => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        use gaussent::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(E::SingularBlock { .. } | E::ConvergenceFailure(_) | E::NumericInconsistency(_)) => 4,
            CliError::Lib(_) | CliError::Io(_) | CliError::Csv(_) => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "gaussent", version, about = "Gaussian entanglement measures and secret-key bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Compute measures on a QCM file. The first subsystem is A, the rest form B.
    Measure {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated subset of reof,gie,bounds,dist,im.
        #[arg(long, default_value = "reof,gie,bounds,dist")]
        measures: String,
        #[command(flatten)]
        common: Common,
    },
    /// Loss-family curves as CSV.
    Sweep {
        /// Two-mode squeezing values in dB.
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,15")]
        squeezing: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        lambda_steps: usize,
        /// Add intrinsic-entanglement estimate columns (slow).
        #[arg(long)]
        with_gie: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a randomized law suite.
    Verify {
        /// One of schur, symplectic, infomeasures, conjecture, all.
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Williamson decomposition of a QCM file.
    Williamson {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Purification of a QCM file.
    Purify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn default_split(v: &Qcm) -> CliResult<Split> {
    let names = v.partition.names();
    if names.len() < 2 {
        return Err(gaussent::Error::InvalidPartition("need at least two subsystems to split into A and B".into()).into());
    }
    Ok(Split::new(&names[..1], &names[1..]))
}

fn cmd_measure(input: &Path, measures: &str, common: &Common) -> CliResult<u8> {
    let selected = select_measures(measures).map_err(|e| CliError::Usage(e.to_string()))?;
    let v = read_qcm(input)?;
    let split = default_split(&v)?;
    let ctx = MeasureContext::with_seed(common.seed);
    let report = measure_report(&v, &split, &selected, &ctx)?;
    let doc = json!({
        "input": input.display().to_string(),
        "seed": common.seed,
        "split": { "a": split.a_names(), "b": split.b_names() },
        "measures": report,
    });
    emit(common.out.as_deref(), &pretty(&doc))?;
    Ok(0)
}

fn cmd_sweep(squeezing: &[f64], steps: usize, with_gie: bool, common: &Common) -> CliResult<u8> {
    if squeezing.is_empty() {
        return Err(CliError::Usage("--squeezing needs at least one value".into()));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!("--lambda-steps must be at least 2, got {steps}")));
    }
    let budget = GieBudget::default().with_seed(common.seed);
    let rows = loss_sweep(squeezing, steps, with_gie.then_some(&budget))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["lambda", "s_db", "reof", "d_one_way"];
    if with_gie {
        header.extend(["gie_lower", "gie_upper"]);
    }
    w.write_record(&header)?;
    for r in &rows {
        let mut rec = vec![r.lambda.to_string(), r.s_db.to_string(), r.reof.to_string(), r.d_one_way.to_string()];
        if let (Some(lo), Some(up)) = (r.gie_lower, r.gie_upper) {
            rec.extend([lo.to_string(), up.to_string()]);
        }
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    emit(common.out.as_deref(), &String::from_utf8(bytes).expect("csv of numbers is utf-8"))?;
    Ok(0)
}

fn cmd_verify(suite: &str, trials: usize, common: &Common) -> CliResult<u8> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if !suite_names().contains(&suite) {
        return Err(CliError::Usage(format!("unknown suite {suite:?}; known: {}", suite_names().join(","))));
    }
    let report = run_suite(suite, trials, common.seed)?;
    let mut summary = String::new();
    for l in &report.laws {
        let status = if l.failed == 0 { "PASS" } else { "FAIL" };
        summary += &format!("{status} {}/{}: {} passed, {} failed\n", l.suite, l.law, l.passed, l.failed);
    }
    summary += &format!("{} laws, {} trials each, seed {}: {} failures\n", report.laws.len(), trials, report.seed, report.total_failed);
    print!("{summary}");
    let doc = serde_json::to_value(&report).expect("report serializes");
    if let Some(p) = &common.out {
        std::fs::write(p, pretty(&doc))?;
    }
    if report.all_passed {
        return Ok(0);
    }
    let failures: Vec<Value> = report
        .laws
        .iter()
        .filter(|l| l.failed > 0)
        .map(|l| json!({ "suite": l.suite, "law": l.law, "failures": l.failures }))
        .collect();
    eprint!("{}", pretty(&json!({ "failures": failures })));
    Ok(1)
}

fn cmd_williamson(input: &Path, out: Option<&Path>) -> CliResult<u8> {
    let v = read_qcm(input)?;
    let w = williamson(v.matrix())?;
    let s: Vec<Vec<f64>> = (0..w.s.nrows()).map(|i| w.s.row(i).iter().copied().collect()).collect();
    let doc = json!({ "ordering": "xp", "nu": w.nu, "s": s });
    emit(out, &pretty(&doc))?;
    Ok(0)
}

fn cmd_purify(input: &Path, out: Option<&Path>) -> CliResult<u8> {
    let v = read_qcm(input)?;
    emit(out, &(qcm_to_json(&purify(&v)?) + "\n"))?;
    Ok(0)
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Measure { input, measures, common } => cmd_measure(&input, &measures, &common),
        Command::Sweep { squeezing, lambda_steps, with_gie, common } => {
            cmd_sweep(&squeezing, lambda_steps, with_gie, &common)
        }
        Command::Verify { suite, trials, common } => cmd_verify(&suite, trials, &common),
        Command::Williamson { input, out } => cmd_williamson(&input, out.as_deref()),
        Command::Purify { input, out } => cmd_purify(&input, out.as_deref()),
    }
}

fn report_error(kind: &str, message: &str) {
    let doc = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{doc}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // Help and version requests.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::from(e.exit_code())
        }
    }
}
