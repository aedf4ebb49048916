use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use permea::analytics::{easy_void_prob, normalizer_table, void_prob_table};
use permea::harness::{
    estimate_void_rate, format_for, read_records, read_summaries, run_experiment,
    run_experiment_with_threads, scaling_report, summarize, write_records, write_rows,
    write_summaries, ExperimentConfig, Format, RECORD_COLUMNS,
};
use permea::sampling::DEFAULT_BETA;
use permea::{BenchmarkKind, Initial, OperatorName};

#[derive(Parser)]
#[command(name = "permea", version, about = "Permutation-based (1+1) EA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid and write one record per run.
    Run(RunArgs),
    /// Print normalizers and void probabilities.
    Theory(TheoryArgs),
    /// Estimate easy-void rates of all four operators by sampling.
    Voidrate(VoidrateArgs),
    /// Ratios of mean runtimes between consecutive problem sizes.
    Scaling(ScalingArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file (TOML, or JSON by extension); grid flags are then ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    /// pham, pleadingones or pjump.
    #[arg(long)]
    benchmark: Option<BenchmarkKind>,
    /// Problem sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Jump sizes for pjump, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Operators, comma separated; all four when omitted.
    #[arg(long, value_delimiter = ',')]
    operator: Vec<OperatorName>,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on evaluations per run, easy voids included.
    #[arg(long)]
    budget: Option<u64>,
    /// Record output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; inferred from --out when omitted.
    #[arg(long)]
    format: Option<Format>,
    /// Also write per-cell summaries here.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads; rayon's default when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    /// Sizes for the normalizer table.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    n: Vec<usize>,
    /// Size for the per-operator void probabilities.
    #[arg(long, default_value_t = 100)]
    operator_n: usize,
}

#[derive(Args)]
struct VoidrateArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
}

#[derive(Args)]
struct ScalingArgs {
    /// Record or summary CSV written by `run`.
    #[arg(long)]
    input: PathBuf,
    /// Hypothesized exponent p in C·n^p.
    #[arg(long, default_value_t = 3.0)]
    exponent: f64,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Theory(args) => cmd_theory(args),
        Command::Voidrate(args) => cmd_voidrate(args),
        Command::Scaling(args) => cmd_scaling(args),
    }
}

fn experiment_from_flags(args: &RunArgs) -> Result<ExperimentConfig> {
    let Some(benchmark) = args.benchmark else {
        bail!("either --config or --benchmark is required");
    };
    if args.n.is_empty() {
        bail!("--n is required");
    }
    let operators = if args.operator.is_empty() {
        OperatorName::ALL.to_vec()
    } else {
        args.operator.clone()
    };
    let config = ExperimentConfig {
        benchmark,
        n: args.n.clone(),
        m: args.m.clone(),
        operators,
        beta: args.beta,
        runs: args.runs,
        seed: args.seed,
        budget: args.budget,
        initial: Initial::UniformRandom,
        skip: Vec::new(),
        note: None,
    };
    config.validate()?;
    Ok(config)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => experiment_from_flags(&args)?,
    };
    let records = match args.threads {
        Some(t) => run_experiment_with_threads(&config, t)?,
        None => run_experiment(&config)?,
    };
    match &args.out {
        Some(path) => {
            let format = args.format.unwrap_or_else(|| format_for(path));
            write_records(&records, format, path)?;
        }
        None => write_rows(
            &records,
            &RECORD_COLUMNS,
            args.format.unwrap_or_default(),
            io::stdout().lock(),
            Path::new("<stdout>"),
        )?,
    }
    let summaries = summarize(&records);
    if let Some(path) = &args.summary {
        write_summaries(&summaries, format_for(path), path)?;
    }
    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.1}"));
    for s in &summaries {
        let m = s.m.map(|m| format!(" m={m}")).unwrap_or_default();
        eprintln!(
            "{} n={}{m} {}: mean_all={} mean_effective={} censored={}/{}",
            s.benchmark,
            s.n,
            s.operator,
            fmt(s.mean_evals_all),
            fmt(s.mean_evals_effective),
            s.censored,
            s.runs
        );
    }
    Ok(())
}

fn cmd_theory(args: TheoryArgs) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "n,C_beta_n,P0,P0_lower")?;
    for row in normalizer_table(args.beta, &args.n)? {
        writeln!(out, "{},{:.6},{:.6},{:.6}", row.n, row.c_beta_n, row.p0, row.p0_lower)?;
    }
    writeln!(out)?;
    writeln!(out, "operator,n,P0_lower,P0_upper,easy_void")?;
    for row in void_prob_table(args.operator_n, args.beta)? {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6}",
            row.operator, row.n, row.lower, row.upper, row.easy_void
        )?;
    }
    Ok(())
}

fn cmd_voidrate(args: VoidrateArgs) -> Result<()> {
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    let mut out = io::stdout().lock();
    writeln!(out, "operator,experiment,theory")?;
    for op in OperatorName::ALL {
        let est = estimate_void_rate(op, args.n, args.beta, args.samples, args.seed)?;
        let theory = easy_void_prob(&op.build(args.n, args.beta)?, args.n)?;
        writeln!(out, "{op},{:.6},{:.6}", est.easy_rate(), theory)?;
    }
    Ok(())
}

fn cmd_scaling(args: ScalingArgs) -> Result<()> {
    let format = format_for(&args.input);
    let header = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    // record files have a run_index column, summary files do not
    let is_records = match format {
        Format::Csv => header.lines().next().is_some_and(|h| h.split(',').any(|c| c == "run_index")),
        Format::Json => header.contains("\"run_index\""),
    };
    let summaries = if is_records {
        summarize(&read_records(&args.input, format)?)
    } else {
        read_summaries(&args.input, format)?
    };
    let rows = scaling_report(&summaries, args.exponent);
    if rows.is_empty() {
        bail!("no curve in {} has two or more problem sizes", args.input.display());
    }
    let columns = [
        "benchmark",
        "m",
        "operator",
        "beta",
        "n1",
        "n2",
        "ratio_all",
        "ratio_effective",
        "hypothesis",
    ];
    write_rows(&rows, &columns, Format::Csv, io::stdout().lock(), Path::new("<stdout>"))?;
    Ok(())
}
