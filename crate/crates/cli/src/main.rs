//! `syllo`: run, score and inspect the syllogism pipeline.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::FileConfig;
use syllo_core::aristotle::augment_existential_import;
use syllo_core::evalkit::{
    cs_single_flip, emit_report, evaluate, load_dataset, load_predictions, save_dataset, save_predictions,
    sensitivity_curve, simulate_scatter, summarize_simulation, synthesize_subtask2, write_csv,
    DEFAULT_BOOTSTRAP,
};
use syllo_core::fol::{parse_latex_formula, parse_prover9_formula, render_latex, render_prover9};
use syllo_core::llm::{ChatGateway, HttpGateway, StubFixture, StubGateway, DEFAULT_CONCURRENCY};
use syllo_core::pipeline::{EngineChoice, Pipeline, PipelineConfig, Strategy, Subtask};
use syllo_core::prover::{
    decide_by_domain_enumeration, decide_entailment, prove_external, ProverProblem, Status, DEFAULT_PROVER9_TIMEOUT,
};

const EXIT_FATAL: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_NOT_ENTAILED: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "syllo", version, about = "Check syllogisms with a language model and a theorem prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a JSON-lines dataset and write predictions.
    Run(RunArgs),
    /// Score predictions against gold labels.
    Evaluate(EvaluateArgs),
    /// Decide whether LaTeX premises entail a conclusion.
    Prove(ProveArgs),
    /// Parse one formula and print both renderings.
    Parse(ParseArgs),
    /// Simulate the content effect of an unbiased model.
    Simulate(SimulateArgs),
    /// Combined-score sensitivity to a single flipped prediction.
    Sensitivity(SensitivityArgs),
    /// Build a relevance dataset by adding unrelated premises.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    TypeSpace,
    DomainEnumeration,
    Prover9,
}

/// Settings shared by commands that may call the prover or a model.
#[derive(Debug, Args)]
struct Connection {
    /// JSON settings file; flags and environment take precedence.
    #[arg(long, env = "SYLLO_CONFIG")]
    config: Option<PathBuf>,
    /// Chat-completions base URL.
    #[arg(long, env = "LLM_BASE_URL")]
    base_url: Option<String>,
    #[arg(long, env = "LLM_API_KEY", hide_env_values = true)]
    api_key: Option<String>,
    /// Prover9 binary for `--engine prover9`.
    #[arg(long, env = "PROVER9_PATH")]
    prover9_path: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    subtask: u8,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// multistep, singlestep, directprover9, endtoend, llmprover or llmretrieval.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Translate non-English samples first (subtasks 3 and 4).
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    translate: bool,
    /// Add existential import for every term of the premises.
    #[arg(long = "import", action = clap::ArgAction::Set, default_value_t = true)]
    augment_import: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    model: Option<String>,
    /// Answer model calls from a stub fixture instead of an endpoint.
    #[arg(long)]
    stub: Option<PathBuf>,
    /// Model request timeout in seconds.
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[command(flatten)]
    connection: Connection,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Bootstrap resamples for confidence intervals; 0 skips them.
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProveArgs {
    /// LaTeX premises.
    #[arg(long, num_args = 1.., required = true)]
    premises: Vec<String>,
    #[arg(long)]
    conclusion: String,
    #[arg(long = "import", action = clap::ArgAction::Set, default_value_t = true)]
    augment_import: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::TypeSpace)]
    engine: EngineArg,
    #[command(flatten)]
    connection: Connection,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Syntax {
    Latex,
    Prover9,
}

#[derive(Debug, Args)]
struct ParseArgs {
    #[arg(long)]
    text: String,
    #[arg(long, value_enum, default_value_t = Syntax::Latex)]
    mode: Syntax,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 48)]
    n_per_group: u64,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Comma-separated accuracies in [0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.6,0.7,0.8,0.9,0.95,0.98,1.0")]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.95)]
    quantile: f64,
    /// Summary table: a, means, closed form and threshold.
    #[arg(long)]
    out: PathBuf,
    /// Optional scatter of (a, accuracy, ce) with a drawn from U(0.5, 1).
    #[arg(long)]
    scatter: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    scatter_trials: usize,
}

#[derive(Debug, Args)]
struct SensitivityArgs {
    /// Comma-separated dataset sizes, each a multiple of 4.
    #[arg(long, value_delimiter = ',', default_value = "4,40,100,400,1000,4000")]
    n_total: Vec<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Optional (accuracy, ce, cs) curves.
    #[arg(long)]
    curve_out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "70,80,90,100")]
    accuracy: Vec<f64>,
    #[arg(long, default_value_t = 20.0)]
    ce_max: f64,
    #[arg(long, default_value_t = 0.5)]
    ce_step: f64,
}

#[derive(Debug, Args)]
struct SynthesizeArgs {
    #[arg(long)]
    base: PathBuf,
    #[arg(long)]
    pool: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    k_min: usize,
    #[arg(long, default_value_t = 5)]
    k_max: usize,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Prove(a) => cmd_prove(a),
        Command::Parse(a) => cmd_parse(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sensitivity(a) => cmd_sensitivity(a),
        Command::Synthesize(a) => cmd_synthesize(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}

fn engine_choice(engine: EngineArg, prover9: Option<PathBuf>, timeout: Duration) -> anyhow::Result<EngineChoice> {
    Ok(match engine {
        EngineArg::TypeSpace => EngineChoice::TypeSpace,
        EngineArg::DomainEnumeration => EngineChoice::DomainEnumeration,
        EngineArg::Prover9 => EngineChoice::Prover9 {
            binary: prover9.ok_or_else(|| anyhow!("--engine prover9 needs --prover9-path or PROVER9_PATH"))?,
            timeout,
        },
    })
}

fn cmd_run(a: RunArgs) -> anyhow::Result<u8> {
    let file = FileConfig::load(a.connection.config.as_deref())?;
    let strategy = match (a.strategy, &file.strategy) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse().map_err(|e: String| anyhow!("config: {e}"))?,
        (None, None) => Strategy::MultiStep,
    };
    let engine = match (a.engine, &file.engine) {
        (Some(e), _) => e,
        (None, Some(e)) => EngineArg::from_str(e, true).map_err(|e| anyhow!("config: {e}"))?,
        (None, None) => EngineArg::TypeSpace,
    };
    let defaults = PipelineConfig::default();
    let workers = a.workers.or(file.workers).unwrap_or(defaults.worker_limit);
    let timeout = Duration::from_secs(a.timeout_secs.or(file.timeout_secs).unwrap_or(120));
    let cfg = PipelineConfig {
        strategy,
        translate_first: a.translate,
        augment_import: a.augment_import,
        engine: engine_choice(engine, a.connection.prover9_path.or(file.prover9_path), DEFAULT_PROVER9_TIMEOUT)?,
        worker_limit: workers,
        model: a.model.or(file.model).unwrap_or(defaults.model),
        ..defaults
    };

    let gateway: Box<dyn ChatGateway> = if let Some(stub) = &a.stub {
        Box::new(StubGateway::new(StubFixture::load(stub)?))
    } else if let Some(base) = a.connection.base_url.or(file.base_url) {
        let key = a.connection.api_key.or(file.api_key).filter(|k| !k.is_empty());
        Box::new(HttpGateway::new(&base, key, timeout, DEFAULT_CONCURRENCY.max(workers)))
    } else {
        bail!("no model endpoint: pass --stub, --base-url or set LLM_BASE_URL");
    };

    let data = load_dataset(&a.data)?;
    let subtask = Subtask::try_from(a.subtask)?;
    let preds = Pipeline::new(cfg, Some(gateway.as_ref())).run_subtask(&data, subtask)?;
    save_predictions(&a.out, &preds)?;
    let failed = preds.iter().filter(|p| p.diagnostics.failed).count();
    eprintln!("wrote {} predictions to {} ({failed} failed)", preds.len(), a.out.display());
    for p in preds.iter().filter(|p| p.diagnostics.failed) {
        eprintln!("  {}: {}", p.id, p.diagnostics.error.as_deref().unwrap_or("failed"));
    }
    Ok(if failed > 0 { EXIT_PARTIAL } else { 0 })
}

fn cmd_evaluate(a: EvaluateArgs) -> anyhow::Result<u8> {
    let preds = load_predictions(&a.pred)?;
    let gold = load_dataset(&a.gold)?;
    let report = evaluate(&preds, &gold, a.bootstrap, a.seed)?;
    if let Some(out) = &a.out {
        emit_report(out, &report)?;
    }
    println!("{}", report.summary_line());
    Ok(0)
}

fn cmd_prove(a: ProveArgs) -> anyhow::Result<u8> {
    let parse = |t: &str| parse_latex_formula(t).with_context(|| format!("in `{t}`"));
    let premises = a.premises.iter().map(|p| parse(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let conclusion = parse(&a.conclusion)?;
    let premises = if a.augment_import {
        augment_existential_import(&premises)?
    } else {
        premises
    };
    let file = FileConfig::load(a.connection.config.as_deref())?;
    let problem = ProverProblem::new(premises, conclusion);
    let verdict = match engine_choice(a.engine, a.connection.prover9_path.or(file.prover9_path), DEFAULT_PROVER9_TIMEOUT)? {
        EngineChoice::TypeSpace => decide_entailment(&problem)?,
        EngineChoice::DomainEnumeration => {
            let k = problem.predicates().len();
            if k >= 16 {
                bail!("{k} predicates are too many to enumerate");
            }
            decide_by_domain_enumeration(&problem, 1 << k)?
        }
        EngineChoice::Prover9 { binary, timeout } => prove_external(&problem, &binary, timeout)?,
    };
    match verdict.status() {
        Status::Entailed => {
            println!("ENTAILED ({})", verdict.engine());
            Ok(0)
        }
        Status::NotEntailed => {
            println!("NOT ENTAILED ({})", verdict.engine());
            if let Some(m) = verdict.countermodel() {
                println!("countermodel types: {m}");
            }
            Ok(EXIT_NOT_ENTAILED)
        }
        Status::Unsupported => bail!("the prover gave no decision"),
    }
}

fn cmd_parse(a: ParseArgs) -> anyhow::Result<u8> {
    let s = match a.mode {
        Syntax::Latex => parse_latex_formula(&a.text)?,
        Syntax::Prover9 => parse_prover9_formula(&a.text)?,
    };
    println!("latex: {}", render_latex(&s));
    println!("prover9: {}", render_prover9(&s));
    Ok(0)
}

fn cmd_simulate(a: SimulateArgs) -> anyhow::Result<u8> {
    let rows = summarize_simulation(a.n_per_group, &a.grid, a.trials, a.seed, a.quantile)?;
    write_csv(&a.out, &rows)?;
    if let Some(path) = &a.scatter {
        write_csv(path, &simulate_scatter(a.n_per_group, a.scatter_trials, a.seed)?)?;
    }
    Ok(0)
}

fn cmd_sensitivity(a: SensitivityArgs) -> anyhow::Result<u8> {
    let rows = a.n_total.iter().map(|&n| cs_single_flip(n)).collect::<Result<Vec<_>, _>>()?;
    write_csv(&a.out, &rows)?;
    if let Some(path) = &a.curve_out {
        write_csv(path, &sensitivity_curve(&a.accuracy, a.ce_max, a.ce_step)?)?;
    }
    Ok(0)
}

fn cmd_synthesize(a: SynthesizeArgs) -> anyhow::Result<u8> {
    let base = load_dataset(&a.base)?;
    let pool = load_dataset(&a.pool)?;
    let out = synthesize_subtask2(&base, &pool, (a.k_min, a.k_max), a.seed)?;
    save_dataset(&a.out, &out)?;
    eprintln!("wrote {} samples to {}", out.len(), a.out.display());
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn subtask_range_enforced() {
        let r = Cli::try_parse_from(["syllo", "run", "--subtask", "5", "--data", "d", "--out", "o"]);
        assert!(r.is_err());
    }

    #[test]
    fn strategy_flag_parses() {
        let cli = Cli::try_parse_from(["syllo", "run", "--subtask", "1", "--data", "d", "--out", "o", "--strategy", "llm-prover"])
            .unwrap();
        let Command::Run(a) = cli.command else { panic!() };
        assert_eq!(a.strategy, Some(Strategy::LlmProver));
    }
}
