//! Command-line interface: every subcommand reads one JSON config and writes
//! its artifacts (plus `manifest.json`) into the output directory.

use clap::{Args, Parser, Subcommand};
use roadfield::runner::{run, Task};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "roadfield",
    version,
    about = "Principal eigenvalues and long-time dynamics for a reaction-diffusion \
             field coupled to a fast road",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Directory for artifacts (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Suppress progress output on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Principal eigenvalue and eigenvector on a single domain.
    Eigen(Common),
    /// Eigenvalue sweep over growing truncated domains, with extrapolation.
    Sweep(Common),
    /// Long-time dynamics started from a compactly supported bump.
    Evolve(Common),
    /// Persistence/extinction verdict from the eigenvalue sign, with an
    /// optional dynamics cross-check.
    Classify(Common),
    /// Compare the coupled eigenvalue against the roadless periodic medium.
    RoadEffect(Common),
    /// Scan the reaction amplitude for the persistence transition.
    Amplitude(Common),
    /// Audit the eigenvalue orderings between domain families.
    Audit(Common),
    /// Check the reaction term against the monostability hypotheses.
    Validate(Common),
}

fn main() {
    let cli = Cli::parse();
    let (task, common) = match &cli.cmd {
        Cmd::Eigen(c) => (Task::Eigen, c),
        Cmd::Sweep(c) => (Task::Sweep, c),
        Cmd::Evolve(c) => (Task::Evolve, c),
        Cmd::Classify(c) => (Task::Classify, c),
        Cmd::RoadEffect(c) => (Task::RoadEffect, c),
        Cmd::Amplitude(c) => (Task::Amplitude, c),
        Cmd::Audit(c) => (Task::Audit, c),
        Cmd::Validate(c) => (Task::Validate, c),
    };
    std::process::exit(run(task, &common.config, &common.out, common.quiet));
}
