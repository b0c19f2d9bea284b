use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polaron_core::report::{cmd_massbound, cmd_solve, cmd_verify, CommandError, CommandOutput, RunConfig};

#[derive(Parser)]
#[command(
    name = "polaron",
    version,
    about = "Pekar ground state and the strong-coupling mass-bound identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the Pekar minimizer; writes pekar_state.json and profiles.csv
    Solve(Common),
    /// Run the identity suite; writes verify.csv, exits 1 if any check fails
    Verify(Common),
    /// Sweep the cutoff and tabulate the inverse-mass bound; writes massbound.csv
    Massbound(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config with flat dotted keys
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<CommandOutput, CommandError> {
    let (common, cmd): (&Common, fn(&RunConfig, &std::path::Path) -> _) = match &cli.command {
        Command::Solve(c) => (c, cmd_solve),
        Command::Verify(c) => (c, cmd_verify),
        Command::Massbound(c) => (c, cmd_massbound),
    };
    let cfg = RunConfig::from_path(&common.config)?;
    let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    cmd(&cfg, &out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(output) => {
            for line in &output.summary {
                println!("{line}");
            }
            for file in &output.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("polaron: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
