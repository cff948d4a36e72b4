//! `hosm`: design, verify, simulate and sweep sliding-mode scenarios.

mod commands;
mod scenario;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Output;

/// Failure classes mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: malformed scenario, inconsistent fields, uncontrollable plant.
    User(String),
    /// Floating-point breakdown in an otherwise valid computation.
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<hosm::Error> for CliError {
    fn from(e: hosm::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::User(e.to_string())
        }
    }
}

const SCENARIO_HELP: &str = "Scenario JSON file, or a bundled scenario name: \
pendulum_r1, pendulum_r2, pendulum_r3, chain3_r1, chain3_r2";

#[derive(Parser)]
#[command(name = "hosm", version, about = "Higher-order sliding-mode design and accuracy analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the sliding variable and print it with its diagnostics.
    Design(Common),
    /// Report the transfer function, zeros and minimum-phase verdict of the sliding variable.
    Verify(Common),
    /// Simulate the closed loop and write the trajectory CSV.
    Simulate(Common),
    /// Sweep the sampling period or actuator constant and fit accuracy orders.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    #[arg(help = SCENARIO_HELP)]
    scenario: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for CSV and report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Significant digits in printed numbers.
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(help = SCENARIO_HELP, required_unless_present = "self_test")]
    scenario: Option<String>,
    /// Fit a synthetic power law instead of simulating.
    #[arg(long)]
    self_test: bool,
    #[command(flatten)]
    output: OutputArgs,
}

impl OutputArgs {
    fn output(&self) -> Output {
        Output { digits: usize::from(self.digits), dir: self.out.clone() }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Design(a) => commands::design(&scenario::load(&a.scenario)?, &a.output.output()),
        Command::Verify(a) => commands::verify(&scenario::load(&a.scenario)?, &a.output.output()),
        Command::Simulate(a) => commands::simulate_cmd(&scenario::load(&a.scenario)?, &a.output.output()),
        Command::Sweep(a) => {
            let s = a.scenario.as_deref().map(scenario::load).transpose()?;
            if a.self_test {
                commands::self_test(s.as_ref(), &a.output.output())
            } else {
                let s = s.expect("clap requires a scenario without --self-test");
                commands::sweep(&s, &a.output.output())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e @ CliError::User(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Numerical(_)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(2)
        }
    }
}
