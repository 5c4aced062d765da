mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::{emit, Failure, Format};

#[derive(Parser)]
#[command(name = "stabctl", version, about = "Exact stability computations driven by JSON scenarios")]
struct Cli {
    /// Scenario file (JSON, "schema": 1).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration limits, e.g. '{subspace:1000000}'.
    #[arg(long, global = true)]
    caps: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Walls of the candidate family in σ-space.
    Walls,
    /// All chambers (sign vectors) with exact sample points.
    Chambers {
        /// Restrict to strictly positive σ.
        #[arg(long)]
        positive: bool,
    },
    /// Sign vector of each scenario σ.
    Locate,
    /// Multi-Gieseker verdict of the ambient sheaf at each scenario σ.
    Stability,
    #[command(subcommand)]
    Quiver(QuiverCmd),
    #[command(subcommand)]
    Cone(ConeCmd),
    #[command(subcommand)]
    Approx(ApproxCmd),
    #[command(subcommand)]
    Vgit(VgitCmd),
}

#[derive(Subcommand)]
pub enum QuiverCmd {
    /// θ-semistability of each representation.
    Check {
        #[arg(long)]
        label: Option<String>,
    },
    /// Harder–Narasimhan filtration.
    Hn {
        #[arg(long)]
        label: Option<String>,
        /// Build the filtration from the top instead of the bottom.
        #[arg(long)]
        descending: bool,
    },
    /// Jordan–Hölder filtration of a semistable representation.
    Jh {
        #[arg(long)]
        label: Option<String>,
    },
    /// S-equivalence of two semistable representations.
    Sequiv {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
    },
}

#[derive(Subcommand)]
pub enum ConeCmd {
    /// Signature of β ↦ β²L^{n−2}.
    Hodge,
    /// Membership of β in K⁺_L and of γ in L^{n−2}·K⁺_L.
    Kplus,
    /// Discriminant and the Bogomolov-type instability test.
    Bogomolov,
    /// Discriminant identity for an extension.
    Identity,
    /// Path certificate for convexity of C⁺.
    Path,
}

#[derive(Subcommand)]
pub enum ApproxCmd {
    /// Positive σ, σ' and rational λ with σ + σ'λ = τ and σ + σ'λ² = θ.
    Split {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Decomposition of a real ample class into rational ample classes.
    Omega,
}

#[derive(Subcommand)]
pub enum VgitCmd {
    /// Trace semistable sets of sample representations along a σ-segment.
    Scan {
        #[arg(long)]
        steps: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = commands::Context::new(cli.scenario.as_deref(), cli.seed, cli.caps.as_deref())?;
    let report = match cli.cmd {
        Cmd::Walls => commands::walls(&ctx),
        Cmd::Chambers { positive } => commands::chambers(&ctx, positive),
        Cmd::Locate => commands::locate(&ctx),
        Cmd::Stability => commands::stability(&ctx),
        Cmd::Quiver(q) => commands::quiver(&ctx, q),
        Cmd::Cone(c) => commands::cone(&ctx, c),
        Cmd::Approx(a) => commands::approx(&ctx, a),
        Cmd::Vgit(VgitCmd::Scan { steps }) => commands::vgit_scan(&ctx, steps),
    };
    match report {
        Ok(r) => emit(&r, cli.format, cli.out.as_deref()),
        Err(mut f) => {
            if let Some(r) = f.report.take() {
                emit(&r, cli.format, cli.out.as_deref())?;
            }
            Err(f)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stabctl: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
