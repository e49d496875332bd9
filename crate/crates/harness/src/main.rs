use std::path::PathBuf;
use std::process::ExitCode;

use asep_harness::{reject, run, ExperimentConfig, ReplicaOrder, RunOptions, Status};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "asep", version, about = "Run exclusion-process experiments from configuration files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for replicas (0 uses every core); overrides `workers`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; overrides `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment a configuration file describes.
    Run { config: PathBuf },
    /// Check a configuration file and print it with defaults filled in.
    Validate { config: PathBuf },
}

fn exit(status: Status) -> ExitCode {
    ExitCode::from(status.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (path, running) = match &cli.command {
        Command::Run { config } => (config, true),
        Command::Validate { config } => (config, false),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return exit(Status::Invalid);
        }
    };
    let config = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(errors) => {
            eprintln!("invalid configuration\n{errors}");
            if running {
                if let Some(dir) = cli.out.or_else(|| ExperimentConfig::output_hint(&text)) {
                    if let Err(e) = reject(&text, &errors, &dir) {
                        eprintln!("cannot write the manifest to {}: {e}", dir.display());
                    }
                }
            }
            return exit(Status::Invalid);
        }
    };
    if !running {
        print!("{}", config.to_text());
        return ExitCode::SUCCESS;
    }
    let dir = cli.out.unwrap_or_else(|| config.output.clone());
    let options = RunOptions { workers: cli.workers.unwrap_or(config.workers), order: ReplicaOrder::Natural };
    match run(&config, options, &dir) {
        Ok(m) => {
            for c in &m.criteria {
                println!("{}: {} ({})", c.name, if c.pass { "pass" } else { "FAIL" }, c.detail);
            }
            if let Some(e) = &m.error {
                eprintln!("error: {e}");
            }
            println!("{} in {:.1}s, results in {}", m.status_label(), m.wall_time_seconds, dir.display());
            exit(m.status)
        }
        Err(e) => {
            eprintln!("cannot write to {}: {e}", dir.display());
            exit(Status::Fail)
        }
    }
}
