//! `modcorr`: command-line runner for the sphere and Hecke experiments.
//!
//! Exit codes: 0 success, 1 internal failure, 2 invalid configuration,
//! 3 computation budget exceeded.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use settings::NRange;

/// A configuration error; the message starts with the offending field.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

#[derive(Parser)]
#[command(name = "modcorr", version, about = "Fixed-point and orbit experiments for modular correspondences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed axes of every word of length n (s = 2 reference).
    Axes(SphereArgs),
    /// Orbit of a base point under every word of length n (s = 1 reference).
    Orbit(OrbitArgs),
    /// Averages of the SO(3) characters χ_l over the words of length n.
    Characters(CharacterArgs),
    /// Elliptic fixed points of T_p^n on the modular surface.
    HeckeFix(HeckeArgs),
    /// Image of a base point under T_p^n.
    HeckeOrbit(HeckeOrbitArgs),
    /// Verifies the Hurwitz class number relation for N = 1..=hurwitz-max.
    Check(CheckArgs),
}

#[derive(Args, Clone)]
pub struct Common {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for `<name>.report.json`, `<name>.report.csv` and `<name>.points.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base name of the output files (defaults to the subcommand).
    #[arg(long)]
    pub name: Option<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Prefix length at which the enumeration is split into tasks.
    #[arg(long)]
    pub partition_depth: Option<usize>,
    /// Run every task on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Args, Clone)]
pub struct Generators {
    /// lps5 (two generators), lps5-triple (three).
    #[arg(long)]
    pub preset: Option<String>,
    /// Explicit generators `w,x,y,z;w,x,y,z;...` (normalized on input).
    #[arg(long)]
    pub quaternions: Option<String>,
    /// semigroup (positive words) or group (reduced words over generators and inverses).
    #[arg(long)]
    pub mode: Option<String>,
}

#[derive(Args, Clone)]
pub struct CapArgs {
    /// `default` or `x,y,z,r;...` (center, geodesic radius).
    #[arg(long)]
    pub caps: Option<String>,
    /// Draw this many caps with uniform centers and radii in [0.1, 1]; needs --seed.
    #[arg(long)]
    pub random_caps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Clone)]
pub struct SphereArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub generators: Generators,
    /// Word length `n` or range `start:end[:step]`.
    #[arg(long)]
    pub n: Option<NRange>,
    /// Highest spherical-harmonic degree.
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Args, Clone)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub sphere: SphereArgs,
    /// Base point `x,y,z` (normalized; default the north pole).
    #[arg(long)]
    pub point: Option<String>,
}

#[derive(Args, Clone)]
pub struct CharacterArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub generators: Generators,
    /// Word length `n` or range `start:end[:step]`.
    #[arg(long)]
    pub n: Option<NRange>,
    /// Highest character degree.
    #[arg(long = "L")]
    pub l: Option<usize>,
}

#[derive(Args, Clone)]
pub struct HeckeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Prime `p ≤ 97`.
    #[arg(long)]
    pub p: Option<u64>,
    /// Power `n` or range `start:end[:step]`.
    #[arg(long)]
    pub n: Option<NRange>,
    /// Equal x-columns per height band.
    #[arg(long)]
    pub x_slices: Option<usize>,
    /// Increasing heights above 1 separating the bands, `y1,y2,...`.
    #[arg(long)]
    pub y_breaks: Option<String>,
}

#[derive(Args, Clone)]
pub struct HeckeOrbitArgs {
    #[command(flatten)]
    pub hecke: HeckeArgs,
    /// Base point `x,y` in the upper half plane (default `0,2`).
    #[arg(long)]
    pub z0: Option<String>,
}

#[derive(Args, Clone)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Largest `N` checked (default 200).
    #[arg(long)]
    pub hurwitz_max: Option<u64>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Invalid>().is_some() {
        return 2;
    }
    match err.downcast_ref::<modcorr::Error>() {
        Some(e) if e.is_budget() => 3,
        Some(
            modcorr::Error::Internal(_)
            | modcorr::Error::Regularity { .. }
            | modcorr::Error::NonTermination(_)
            | modcorr::Error::EmptyAccumulator,
        ) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Axes(a) => commands::sphere(commands::SphereKind::Axes, a, None),
        Command::Orbit(a) => commands::sphere(commands::SphereKind::Orbit, a.sphere, a.point),
        Command::Characters(a) => commands::characters(a),
        Command::HeckeFix(a) => commands::hecke_fix(a),
        Command::HeckeOrbit(a) => commands::hecke_orbit(a),
        Command::Check(a) => commands::check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
