//! Batch front end: `wtp <command> --config instance.toml`.
//!
//! Exit codes: 0 when every check passes, 1 on a check failure, 2 on a
//! config or run error.

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, Instance, Overrides};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wtp", version, about = "Weighted topological pressure for chains of subshifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Args)]
pub struct Flags {
    /// Instance config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the schedule's largest index.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Override the largest scheme refinement.
    #[arg(long, global = true)]
    pub refine_max: Option<usize>,
    /// Pattern enumeration budget.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-scale pressure tables.
    Pressure,
    /// Optimize the weighted objective and compare with the pressure.
    Variational,
    /// Build the near-maximizing measures and check their log Z identities.
    NuConstruct,
    /// Run a verification suite.
    Verify {
        /// identity, inequalities, folner, duality, oracle, all, or a criterion name.
        suite: String,
    },
    /// Every configured stage plus the configured suites.
    Report,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let f = &cli.flags;
    let o = Overrides { seed: f.seed, out: f.out.clone(), n_max: f.n_max, refine_max: f.refine_max, budget: f.budget };
    if let Command::Verify { suite } = &cli.command {
        if wtp_core::suites::suite_members(suite).is_none() {
            eprintln!("error: unknown suite {suite:?}");
            return EXIT_CONFIG;
        }
    }
    let inst = match (&f.config, &cli.command) {
        (Some(path), _) => Instance::load(path, &o),
        (None, Command::Verify { .. }) => Ok(Instance::bare(&o)),
        (None, _) => Err(ConfigError { line: None, message: "--config is required".into() }),
    };
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let result = match &cli.command {
        Command::Pressure => commands::pressure(&inst),
        Command::Variational => commands::variational(&inst),
        Command::NuConstruct => commands::nu_construct(&inst),
        Command::Verify { suite } => commands::verify(&inst, suite),
        Command::Report => commands::report(&inst),
    };
    let run = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_CONFIG;
        }
    };
    print!("{}", run.report.summary());
    if let Err(e) = report::write_all(&inst.out, &run.report, &run.csvs, &run.timings) {
        eprintln!("error: {e:#}");
        return EXIT_CONFIG;
    }
    if run.report.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
