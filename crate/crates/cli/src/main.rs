use std::path::PathBuf;
use std::process::ExitCode;

use adaptopt_cli::{commands, server, CliError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adaptopt", version, about = "Multi-objective optimization of assembly workflows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a workflow file parses and satisfies all invariants.
    Validate { workflow: PathBuf },
    /// Run the configured algorithm and write a run directory.
    Optimize {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Enumerate the exact Pareto front of a small binary instance.
    Oracle {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Serve run directories over a read-only JSON API.
    Serve {
        #[arg(short = 'd', long = "runs-dir")]
        runs_dir: PathBuf,
        #[arg(short, long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Validate { workflow } => {
            let report = commands::validate(&workflow)?;
            print!("{}", report.render());
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Command::Optimize { config } => {
            let summary = commands::optimize(&config)?;
            eprintln!("{} solution(s) written to {}", summary.solutions, summary.directory.display());
            println!("{}", summary.run_id);
            Ok(0)
        }
        Command::Oracle { config } => {
            let summary = commands::oracle(&config)?;
            eprintln!("{} solution(s) written to {}", summary.solutions, summary.directory.display());
            println!("{}", summary.run_id);
            Ok(0)
        }
        Command::Serve { runs_dir, port, host } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Server(e.to_string()))?;
            rt.block_on(server::serve(runs_dir, &host, port))?;
            Ok(0)
        }
    }
}
