//! `dea` — classify DMUs and compute furthest/closest efficient targets with
//! their reference sets, from a CSV dataset.
//!
//! Exit codes: 0 success, 1 input error, 2 solver error.

use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dea_cli::report::{self, build_dto, render_csv, render_table, status_str};
use dea_core::pipeline::{AnalysisMode, AnalyzeConfig, CandidatesPolicy};
use dea_core::{classify_all, load_dataset, BigM, DmuDataset, ToleranceConfig, DEFAULT_NODE_LIMIT};

#[derive(Parser)]
#[command(
    name = "dea",
    version,
    about = "DEA benchmarking: efficiency classification, closest and furthest targets, reference sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify each DMU as extreme-efficient, efficient, or inefficient
    Classify {
        /// Dataset CSV: header `dmu,in:<label>,...,out:<label>,...`
        dataset: PathBuf,
    },
    /// Project DMUs onto the efficient frontier and report reference sets
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Dataset CSV: header `dmu,in:<label>,...,out:<label>,...`
    dataset: PathBuf,

    /// Which projections to compute
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,

    /// Restrict the report to these DMU names (repeatable or comma-separated)
    #[arg(long, value_delimiter = ',')]
    dmu: Vec<String>,

    /// Big-M for the closest-target program: `auto` or a positive number
    #[arg(long, default_value = "auto", value_parser = parse_big_m)]
    big_m: BigM,

    /// Candidate set for the reference-set step
    #[arg(long, value_enum, default_value_t = CandidatesArg::Support)]
    candidates: CandidatesArg,

    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,

    /// Simplex pivot tolerance
    #[arg(long)]
    pivot_tol: Option<f64>,

    /// Feasibility tolerance
    #[arg(long)]
    feasibility_tol: Option<f64>,

    /// Binary integrality tolerance
    #[arg(long)]
    integrality_tol: Option<f64>,

    /// Reference-set membership threshold
    #[arg(long)]
    membership_tol: Option<f64>,

    /// Branch-and-bound node limit
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Closest,
    Furthest,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum CandidatesArg {
    Support,
    AllEfficient,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

fn parse_big_m(value: &str) -> Result<BigM, String> {
    if value == "auto" {
        return Ok(BigM::Auto);
    }
    let parsed: f64 = value
        .parse()
        .map_err(|_| format!("`{value}` is not `auto` or a number"))?;
    if !(parsed.is_finite() && parsed > 0.0) {
        return Err(format!("big-M must be positive, got {parsed}"));
    }
    Ok(BigM::Fixed(parsed))
}

const EXIT_INPUT: u8 = 1;
const EXIT_SOLVER: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::SUCCESS;
                }
                _ => {}
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Classify { dataset } => cmd_classify(&dataset),
        Command::Analyze(args) => cmd_analyze(args),
    }
}

fn read_dataset(path: &PathBuf) -> anyhow::Result<DmuDataset> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_dataset(file).with_context(|| format!("cannot parse {}", path.display()))
}

fn cmd_classify(path: &PathBuf) -> anyhow::Result<u8> {
    let ds = read_dataset(path)?;
    let statuses = match classify_all(&ds, &ToleranceConfig::default()) {
        Ok(statuses) => statuses,
        Err(e) => {
            eprintln!("error: classification failed: {e}");
            return Ok(EXIT_SOLVER);
        }
    };
    let width = ds.names().iter().map(String::len).max().unwrap_or(0);
    for (j, status) in statuses.iter().enumerate() {
        println!("{:<width$}  {}", ds.name(j), status_str(*status));
    }
    Ok(0)
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<u8> {
    let ds = read_dataset(&args.dataset)?;

    let keep: Vec<usize> = if args.dmu.is_empty() {
        (0..ds.num_dmus()).collect()
    } else {
        let mut keep = Vec::new();
        for name in &args.dmu {
            let j = ds
                .index_of(name)
                .ok_or_else(|| anyhow!("unknown DMU name `{name}` in --dmu"))?;
            if !keep.contains(&j) {
                keep.push(j);
            }
        }
        keep.sort_unstable();
        keep
    };

    let mut tol = ToleranceConfig::default();
    if let Some(v) = args.pivot_tol {
        tol.pivot = v;
    }
    if let Some(v) = args.feasibility_tol {
        tol.feasibility = v;
    }
    if let Some(v) = args.integrality_tol {
        tol.integrality = v;
    }
    if let Some(v) = args.membership_tol {
        tol.membership = v;
    }
    let config = AnalyzeConfig {
        mode: match args.mode {
            ModeArg::Closest => AnalysisMode::Closest,
            ModeArg::Furthest => AnalysisMode::Furthest,
            ModeArg::Both => AnalysisMode::Both,
        },
        big_m: args.big_m,
        candidates: match args.candidates {
            CandidatesArg::Support => CandidatesPolicy::Support,
            CandidatesArg::AllEfficient => CandidatesPolicy::AllEfficient,
        },
        tol,
        node_limit: args.node_limit,
    };

    let report = dea_core::analyze_all(&ds, &config);
    let dto = build_dto(&ds, &report, &keep);
    match args.format {
        FormatArg::Json => {
            println!("{}", serde_json::to_string_pretty(&dto)?);
        }
        FormatArg::Csv => print!("{}", render_csv(&dto)),
        FormatArg::Table => print!("{}", render_table(&dto)),
    }

    let failures: Vec<&report::DmuDto> = dto.dmus.iter().filter(|d| d.error.is_some()).collect();
    if failures.is_empty() {
        Ok(0)
    } else {
        for f in &failures {
            eprintln!("error: {}: {}", f.name, f.error.as_deref().unwrap_or(""));
        }
        Ok(EXIT_SOLVER)
    }
}
