use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use metriplectic::verify::Suite;
use metriplectic_cli::commands::{self, VerifyArgs};

/// Simulate thermodynamic systems two ways and check that they agree.
#[derive(Debug, Parser)]
#[command(name = "metriplectic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one scenario; writes a trajectory CSV and a summary JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        /// Built-in system: piston, two_pistons, chemical, rigid_body, fluid1d.
        #[arg(long, conflicts_with = "spec")]
        system: Option<String>,
        /// Scenario file whose [system] section defines the system.
        #[arg(long, visible_alias = "config")]
        spec: Option<PathBuf>,
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short = 'n', default_value_t = 100)]
        cases: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run both engines from the same state and report their divergence.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("METRIPLECTIC_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            let mut cmd = Cli::command();
            cmd.build();
            let sub = std::env::args().nth(1).unwrap_or_default();
            let usage = match cmd.find_subcommand_mut(&sub) {
                Some(sub) => sub.render_usage(),
                None => cmd.render_usage(),
            };
            eprintln!("\n{usage}");
            std::process::exit(2);
        }
    };
    let code = match cli.command {
        Command::Simulate { config, out } => commands::simulate(&config, out),
        Command::Compare { config, out } => commands::compare(&config, out),
        Command::Verify {
            system,
            spec,
            suite,
            seed,
            cases,
            jobs,
        } => commands::verify(VerifyArgs {
            system,
            spec,
            suite,
            seed,
            cases,
            jobs,
        }),
    };
    std::process::exit(code);
}
