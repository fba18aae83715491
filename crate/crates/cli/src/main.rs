use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tripartite_cli::config::{parse_basis_set, BackendKind, ExperimentConfig, Format};
use tripartite_cli::report::{to_json, to_text, write_csv};
use tripartite_cli::run::{run, Constants, EMBEDDED_CONSTANTS};
use tripartite_cli::{CliError, EXIT_INVARIANT, EXIT_OK};
use tripartite_core::oracle::generate_constants_toml;
use tripartite_core::par::Execution;

#[derive(Parser)]
#[command(name = "tripartite", version, about = "Three-party qutrit protocol simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(Box<RunArgs>),
    /// Recompute the exact reference constants and write them as TOML.
    Oracle {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecArg {
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Abstract,
    Optical,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// secret-sharing, qkd, herald, sorter-check or verify-paper.
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of computational,fourier.
    #[arg(long)]
    basis_set: Option<String>,
    /// fixed:i,j or random.
    #[arg(long)]
    subspace_policy: Option<String>,
    /// off, or intercept:<party>:<subspace|full|basis,...>.
    #[arg(long)]
    eve: Option<String>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long, value_enum)]
    execution: Option<ExecArg>,
    #[arg(long)]
    sample_fraction: Option<f64>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Also write the full transcript as JSON.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Reference constants file replacing the built-in table.
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn effective_config(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_toml(&read(p)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = &args.protocol {
        cfg.protocol = p.parse()?;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(b) = &args.basis_set {
        cfg.basis_set = parse_basis_set(b)?;
    }
    if let Some(p) = &args.subspace_policy {
        cfg.subspace_policy = p.parse()?;
    }
    if let Some(e) = &args.eve {
        cfg.eve = if e == "off" { None } else { Some(e.parse()?) };
    }
    if let Some(b) = args.backend {
        cfg.backend = match b {
            BackendArg::Abstract => BackendKind::Abstract,
            BackendArg::Optical => BackendKind::Optical,
        };
    }
    if let Some(x) = args.execution {
        cfg.execution = match x {
            ExecArg::Sequential => Execution::Sequential,
            ExecArg::Parallel => Execution::Parallel,
        };
    }
    if let Some(f) = args.sample_fraction {
        cfg.sample_fraction = f;
    }
    if let Some(f) = args.format {
        cfg.output.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        };
    }
    if args.output.is_some() {
        cfg.output.path = args.output.clone();
    }
    if args.transcript.is_some() {
        cfg.output.transcript = args.transcript.clone();
    }
    Ok(cfg)
}

fn run_command(args: RunArgs) -> Result<u8, CliError> {
    let cfg = effective_config(&args)?;
    cfg.validate()?;
    if args.print_config {
        print!("{}", cfg.to_toml());
        return Ok(EXIT_OK);
    }
    let constants = match &args.constants {
        Some(p) => Constants::parse(&read(p)?)?,
        None => Constants::parse(EMBEDDED_CONSTANTS)?,
    };
    let (report, transcript) = run(&cfg, &constants)?;

    let body = match cfg.output.format {
        Format::Json => to_json(&report).into_bytes(),
        Format::Text => to_text(&report).into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            let t = transcript.as_ref().ok_or_else(|| CliError::Usage("csv output needs a transcript".into()))?;
            write_csv(t, &mut buf).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
            buf
        }
    };
    match &cfg.output.path {
        Some(p) => write(p, &body)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&body).map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    if let (Some(p), Some(t)) = (&cfg.output.transcript, &transcript) {
        let mut json = serde_json::to_string_pretty(t).expect("transcript serializes");
        json.push('\n');
        write(p, json.as_bytes())?;
    }
    if !report.all_pass() {
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!("check failed: {} (observed {}, expected {})", c.name, c.observed, c.expected);
        }
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    // clap exits 2 on usage errors.
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run_command(*args),
        Command::Oracle { output } => {
            let text = generate_constants_toml();
            match output {
                Some(p) => write(&p, text.as_bytes()).map(|_| EXIT_OK),
                None => {
                    print!("{text}");
                    Ok(EXIT_OK)
                }
            }
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

