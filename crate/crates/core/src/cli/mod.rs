//! Command-line scenario runner.

mod figures;
mod report;
mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use figures::bundle_svg;
pub use report::{default_out, run_scenario, Outcome, RunOptions};
pub use scenario::{
    build_map, build_polynomial, run_checks, Analysis, BaseSpec, Control, Expect, MapSpec, PolySpec, RootCheck,
    Scenario, BUILTINS,
};

#[derive(Parser, Debug)]
#[command(name = "rootsurf", version, about = "Root surfaces and extension problems for self-maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a builtin scenario.
    Builtin {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(BUILTINS.map(|(n, _)| n)))]
        name: String,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Samples along each axis (per edge on graphs).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output directory; defaults to out/<scenario name>.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write SVG figures of both bundles.
    #[arg(long)]
    pub svg: bool,
    /// Re-run at 2n and 4n samples and require identical verdicts.
    #[arg(long)]
    pub stability: bool,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNEXPECTED: i32 = 2;

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let (scenario, flags) = match cli.command {
        Command::Run { config, flags } => (Scenario::load(&config)?, flags),
        Command::Builtin { name, flags } => (Scenario::builtin(&name)?, flags),
    };
    let out = flags.out.clone().unwrap_or_else(|| default_out(&scenario));
    let options = RunOptions { samples: flags.samples, seed: flags.seed, svg: flags.svg, stability: flags.stability };
    let outcome = run_scenario(&scenario, &options, &out)?;
    println!("{}", serde_json::to_string_pretty(&outcome.report["expectations"])?);
    println!("wrote {}", out.join("verdict.json").display());
    Ok(outcome.expectations_met)
}

/// Parses arguments, runs, and returns the process exit code: 0 when all
/// expectations hold, 2 when a verdict contradicts one, 1 on errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("a verdict contradicts the scenario's expectations");
            EXIT_UNEXPECTED
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
