use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use threebody_cli::{run, Command, Sweep};

/// Closed-form approximate trajectories for the planar three-body problem,
/// with a reference integration to measure them against.
#[derive(Parser)]
#[command(name = "threebody", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample the approximate trajectories; writes bodyN_approx.csv.
    Approximate(Common),
    /// Integrate the full equations of motion; writes bodyN_oracle.csv and conservation.json.
    Integrate(Common),
    /// Run both and compare; adds bodyN_error.csv and report.json.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Use G = 1 regardless of the scenario's units.
    #[arg(long)]
    dimensionless: bool,
    /// Repeat the run per value, e.g. `m3=1e-6,1e-4` (absolute) or `q3=0.01` (fraction of the total mass).
    /// Each value writes to `<out>/<param>=<value>/`.
    #[arg(long, value_name = "PARAM=V1,V2,...")]
    sweep: Option<Sweep>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Approximate(a) => (Command::Approximate, a),
        Cmd::Integrate(a) => (Command::Integrate, a),
        Cmd::Compare(a) => (Command::Compare, a),
    };
    let outcome = run(
        command,
        &args.scenario,
        &args.out,
        args.dimensionless,
        args.sweep.as_ref(),
    );
    for m in &outcome.messages {
        eprintln!("threebody: {m}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
