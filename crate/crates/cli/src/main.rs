use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nullity_cli::{batch_exit_code, run_batch, Mode, Options};
use nullity_core::oracle::DEFAULT_STEP;

#[derive(Parser)]
#[command(name = "nullity", version, about = "Run nullity-geodesic scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate J, C and A along the geodesic as CSV.
    Evolve(Args),
    /// Check the splitting spectrum against the geodesic domain.
    Classify(Args),
    /// Search a splitting family for a special nullity direction.
    Search(Args),
    /// Emit a catalog model and verify its properties.
    Catalog(Args),
    /// Run the invariant suite.
    Check(Args),
    /// Run each scenario in the mode it declares.
    Run(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file, or a directory of `.toml` scenarios.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// RK4 step for the oracle integrator.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Evolve(a) => (Some(Mode::Evolve), a),
        Command::Classify(a) => (Some(Mode::Classify), a),
        Command::Search(a) => (Some(Mode::Search), a),
        Command::Catalog(a) => (Some(Mode::Catalog), a),
        Command::Check(a) => (Some(Mode::Check), a),
        Command::Run(a) => (None, a),
    };
    if !(args.step > 0.0 && args.step.is_finite()) {
        eprintln!("error: --step must be positive");
        return ExitCode::from(2);
    }
    if args.scenario.is_none() && mode != Some(Mode::Check) {
        eprintln!("error: --scenario is required");
        return ExitCode::from(2);
    }
    let opts = Options { seed: args.seed, step: args.step };
    let results = match run_batch(args.scenario.as_deref(), mode, &args.out, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for r in &results {
        match &r.result {
            Ok(o) => {
                println!("{}: {}", r.name, o.summary);
                if o.mode == Mode::Check {
                    print!("{}", o.contents);
                }
            }
            Err(e) => eprintln!("{}: error: {e}", r.name),
        }
    }
    ExitCode::from(batch_exit_code(&results) as u8)
}
