use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use fracshe::cli_runner::{parse_config_with, run, schema_help, Kind, Overrides};

#[derive(Parser)]
#[command(name = "fracshe", version, about = "Time-fractional stochastic heat equation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides `mc.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    /// Overrides `mc.replicas`.
    #[arg(long, value_name = "N")]
    replicas: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_beta(-x) and the stable subordinator density on a grid.
    MlEval(Common),
    /// Tabulate the Dirichlet kernel and, optionally, its increment norms.
    Kernel(Common),
    /// Simulate one path of the equation.
    Simulate(Common),
    /// Estimate second moments, fit growth rates, optionally scan lambda.
    MomentScan(Common),
    /// Evaluate the Laplace-type profile Lambda(theta).
    LambdaProfile(Common),
    /// Moment gap to the classical solution as beta approaches 1.
    BetaSweep(Common),
    /// Empirical Hoelder modulus in space and time.
    Continuity(Common),
}

impl Command {
    fn split(self) -> (Kind, Common) {
        match self {
            Command::MlEval(c) => (Kind::MlEval, c),
            Command::Kernel(c) => (Kind::Kernel, c),
            Command::Simulate(c) => (Kind::Simulate, c),
            Command::MomentScan(c) => (Kind::MomentScan, c),
            Command::LambdaProfile(c) => (Kind::LambdaProfile, c),
            Command::BetaSweep(c) => (Kind::BetaSweep, c),
            Command::Continuity(c) => (Kind::Continuity, c),
        }
    }
}

fn command() -> clap::Command {
    let mut cmd = Cli::command();
    for kind in Kind::ALL {
        cmd = cmd.mut_subcommand(kind.as_str(), |sub| sub.after_help(schema_help(kind)));
    }
    cmd.after_help("Exit status is nonzero when a replica aborted, a quadrature failed or the run raised an error.")
}

fn main() -> ExitCode {
    let matches = command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let (kind, common) = cli.command.split();
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        kind: Some(kind),
        seed: common.seed,
        replicas: common.replicas,
        output_dir: common.out,
    };
    let cfg = match parse_config_with(&text, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(manifest) => {
            for e in &manifest.errors {
                eprintln!("error: {e}");
            }
            eprintln!(
                "{}: {} file(s) in {}, aborted {}, quadrature failures {}",
                manifest.kind,
                manifest.outputs.len(),
                cfg.output_dir,
                manifest.replicas_aborted,
                manifest.quadrature_failures
            );
            ExitCode::from(manifest.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
