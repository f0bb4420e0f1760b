//! `trish`: run, tune and verify TRish/SG experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/parse/I/O error,
//! 3 theorem-hypothesis error, 4 verification failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trish_core::harness::{
    emit_metadata, emit_run_csv, emit_verify_csv, read_config_file, run_csv_string,
    run_experiment_on, run_metadata, summarize, tune_grid, verify_csv_string, verify_theorem,
    ExperimentConfig, LoadedProblem, TuneGrid, VerifySpec,
};
use trish_core::ingest::{dataset_stats, parse_libsvm_file};
use trish_core::theory::{StepsizeRule, TheoremId};
use trish_core::{Error, Method, TrishParams};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_HYPOTHESIS: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(name = "trish", version, about = "TRish and SG experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over several seeds and write per-checkpoint CSV.
    Run(Common),
    /// Grid-search batch size, stepsize and (for TRish) gamma1.
    Tune(Common),
    /// Monte-Carlo check of a convergence bound.
    Verify(VerifyArgs),
    /// Summarize a LIBSVM file.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// LIBSVM training file (implies `problem = logistic` when unset).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// LIBSVM held-out file used for test loss and accuracy.
    #[arg(long)]
    test_dataset: Option<PathBuf>,
    #[arg(long)]
    seeds: Option<usize>,
    /// Output CSV; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["trish", "sg"])]
    method: Option<String>,
    /// For `tune`, a comma-separated grid.
    #[arg(long)]
    gamma1: Option<String>,
    #[arg(long)]
    gamma2: Option<f64>,
    /// Fixed stepsize; for `tune`, a comma-separated grid.
    #[arg(long)]
    alpha: Option<String>,
    /// Mini-batch size; for `tune`, a comma-separated grid.
    #[arg(long)]
    batch: Option<String>,
    #[arg(long)]
    epochs: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    theorem: u8,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    /// Fixed stepsize (theorems 1, 3, 4).
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of iterates `K`.
    #[arg(long)]
    iterations: Option<u64>,
    /// Use exact gradients; constants still come from the noise model.
    #[arg(long)]
    exact: bool,
}

enum Failure {
    Core(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Domain(_) => EXIT_USAGE,
        Error::Data(_) | Error::Parse { .. } | Error::Io { .. } => EXIT_DATA,
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Tune(args) => tune(args),
        Command::Verify(args) => verify(args),
        Command::Stats { dataset } => stats(&dataset),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFICATION)
        }
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).collect()
}

/// Config-file pairs with command-line overrides applied.
fn merged_pairs(args: &Common, single_valued: bool) -> Result<BTreeMap<String, String>, Error> {
    let mut pairs = match &args.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut set = |k: &str, v: String| {
        pairs.insert(k.to_string(), v);
    };
    if let Some(d) = &args.dataset {
        set("dataset", d.display().to_string());
    }
    if let Some(d) = &args.test_dataset {
        set("test_dataset", d.display().to_string());
    }
    if let Some(n) = args.seeds {
        set("seeds", n.to_string());
    }
    if let Some(s) = args.seed {
        set("seed", s.to_string());
    }
    if let Some(m) = &args.method {
        set("method", m.clone());
    }
    if let Some(g) = args.gamma2 {
        set("gamma2", g.to_string());
    }
    if let Some(e) = args.epochs {
        set("epochs", e.to_string());
        pairs.remove("iterations");
    }
    // grid-valued flags carry their first value into the base configuration
    let first = |s: &Option<String>| s.as_deref().map(|v| split_list(v)[0].to_string());
    for (key, flag) in [
        ("gamma1", &args.gamma1),
        ("alpha", &args.alpha),
        ("batch", &args.batch),
    ] {
        if let Some(v) = flag {
            if single_valued && split_list(v).len() > 1 {
                return Err(Error::Usage(format!(
                    "--{key} takes a single value for `run`"
                )));
            }
            pairs.insert(key.to_string(), first(flag).expect("present"));
        }
    }
    if args.alpha.is_some() {
        pairs.remove("stepsize");
    }
    if pairs.contains_key("dataset") && !pairs.contains_key("problem") {
        pairs.insert("problem".into(), "logistic".into());
    }
    // SG ignores the TRish constants a shared config file may carry
    if pairs.get("method").map(String::as_str) == Some("sg") {
        pairs.remove("gamma1");
        pairs.remove("gamma2");
    }
    Ok(pairs)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn run(args: Common) -> Result<(), Failure> {
    let config = ExperimentConfig::from_pairs(&merged_pairs(&args, true)?)?;
    let problem = LoadedProblem::load(&config.problem)?;
    let records = run_experiment_on(&config, &problem)?;
    match &args.out {
        Some(path) => {
            emit_run_csv(&records, path)?;
            emit_metadata(&run_metadata(&config, &problem)?, path)?;
        }
        None => write_or_print(None, &run_csv_string(&records))?,
    }
    let s = summarize(&records);
    eprintln!(
        "{} runs ({} divergent): train loss {:.6}, train acc {}, test loss {}, test acc {}",
        s.n_runs,
        s.n_divergent,
        s.train_loss,
        fmt_opt(s.train_acc),
        fmt_opt(s.test_loss),
        fmt_opt(s.test_acc)
    );
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.6}"))
}

fn parse_grid<T: std::str::FromStr + Clone>(
    flag: &str,
    v: Option<&str>,
    default: &[T],
) -> Result<Vec<T>, Error> {
    match v {
        None => Ok(default.to_vec()),
        Some(s) => split_list(s)
            .into_iter()
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::Usage(format!("bad --{flag} value `{x}`")))
            })
            .collect(),
    }
}

fn tune(args: Common) -> Result<(), Failure> {
    let mut pairs = merged_pairs(&args, false)?;
    // the grid supplies these; placeholders keep the base config valid
    pairs.entry("alpha".into()).or_insert_with(|| "1".into());
    pairs.remove("stepsize");
    if pairs.get("method").map(String::as_str) == Some("trish") {
        let g1 = pairs
            .entry("gamma1".into())
            .or_insert_with(|| "15".into())
            .clone();
        let g1: f64 = g1
            .parse()
            .map_err(|_| Error::Usage(format!("bad gamma1 value `{g1}`")))?;
        pairs.insert("gamma2".into(), (0.4 * g1).to_string());
    }
    let base = ExperimentConfig::from_pairs(&pairs)?;
    let trish = matches!(base.method, Method::Trish(_));
    let grid = TuneGrid {
        batch_sizes: parse_grid("batch", args.batch.as_deref(), &[5, 10, 20])?,
        alphas: parse_grid(
            "alpha",
            args.alpha.as_deref(),
            if trish {
                &[1.0, 5.0, 10.0, 100.0]
            } else {
                &[1.0, 10.0, 100.0]
            },
        )?,
        gamma1s: parse_grid("gamma1", args.gamma1.as_deref(), &[7.0, 11.0, 15.0])?,
        gamma2_ratio: 0.4,
    };
    let problem = LoadedProblem::load(&base.problem)?;
    let result = tune_grid(&base, &problem, &grid)?;

    let mut csv = String::from(
        "batch,alpha,gamma1,gamma2,train_loss,train_acc,test_loss,test_acc,n_divergent,selected\n",
    );
    for (i, row) in result.table.iter().enumerate() {
        let s = &row.summary;
        let cell = |v: Option<f64>| v.map(trish_core::harness::fmt_sig9).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.batch_size,
            trish_core::harness::fmt_sig9(row.alpha),
            cell(row.gamma1),
            cell(row.gamma2),
            trish_core::harness::fmt_sig9(s.train_loss),
            cell(s.train_acc),
            cell(s.test_loss),
            cell(s.test_acc),
            s.n_divergent,
            result.best == Some(i)
        ));
    }
    write_or_print(args.out.as_deref(), &csv)?;
    match result.best_row() {
        Some(row) => eprintln!(
            "selected: batch {} alpha {} gamma1 {} gamma2 {}",
            row.batch_size,
            row.alpha,
            fmt_opt(row.gamma1),
            fmt_opt(row.gamma2)
        ),
        None => eprintln!("every configuration diverged"),
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let id = TheoremId::from_number(args.theorem)?;
    let mut spec = VerifySpec::standard(id);
    if let Some(n) = args.seeds {
        spec.n_seeds = n;
    }
    if let Some(s) = args.seed {
        spec.base_seed = s;
    }
    if let Some(k) = args.iterations {
        spec.horizon = k;
    }
    if args.gamma1.is_some() || args.gamma2.is_some() {
        spec.params = TrishParams::new(
            args.gamma1.unwrap_or(spec.params.gamma1()),
            args.gamma2.unwrap_or(spec.params.gamma2()),
        )?;
    }
    if let Some(alpha) = args.alpha {
        match spec.stepsize {
            StepsizeRule::Fixed(_) => spec.stepsize = StepsizeRule::Fixed(alpha),
            StepsizeRule::Harmonic { .. } => {
                return Err(Error::Usage(format!(
                    "{id} uses harmonic stepsizes; --alpha does not apply"
                ))
                .into())
            }
        }
    }
    spec.exact_gradients = args.exact;
    let problem = VerifySpec::standard_problem(id);
    let report = verify_theorem(problem.as_ref(), &spec)?;
    match &args.out {
        Some(path) => {
            emit_verify_csv(&report, path)?;
            emit_metadata(&spec.metadata(), path)?;
        }
        None => write_or_print(None, &verify_csv_string(&report))?,
    }
    let violations = report.violations();
    eprintln!(
        "{id}: {} iterates, {} seeds, {} violations; constants {:?}",
        report.rows.len(),
        report.n_seeds,
        violations.len(),
        report.constants
    );
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{} of {} iterates exceed bound + 3 SE (first at k = {})",
            violations.len(),
            report.rows.len(),
            violations[0]
        )))
    }
}

fn stats(path: &Path) -> Result<(), Failure> {
    let ds = parse_libsvm_file(path)?;
    let s = dataset_stats(&ds.rows);
    println!("count {}", s.count);
    println!("max_index {}", s.max_index);
    println!("nnz {}", s.nnz);
    println!("label_balance {:.6}", s.label_balance);
    Ok(())
}
