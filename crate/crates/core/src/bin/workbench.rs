use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ml_workbench::interp::{LexicalQa, SlotRegistry};
use ml_workbench::session::{interpret_command, run_repl, AlgorithmTable, Workbench, WorkbenchConfig};

#[derive(Parser)]
#[command(name = "workbench", version, about = "Conversational machine-learning workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Interactive terminal session.
    Repl {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the interpreted frame of a command as JSON; nothing is executed.
    Interpret {
        #[arg(long)]
        command: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Serve { config } => {
            let config = WorkbenchConfig::load(&config)?;
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{}:{}", config.bind, config.port);
            rt.block_on(ml_workbench::server::serve(config))?;
        }
        Command::Repl { config } => {
            let workbench = Workbench::open(WorkbenchConfig::load(&config)?)?;
            let stdin = io::stdin();
            run_repl(&workbench, stdin.lock(), io::stdout());
        }
        Command::Interpret { command } => {
            let frame = interpret_command(&command, &SlotRegistry::builtin(), &LexicalQa::default(), &AlgorithmTable::builtin());
            println!("{}", serde_json::to_string_pretty(&frame)?);
        }
    }
    Ok(())
}

