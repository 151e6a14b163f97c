use std::path::PathBuf;

use clap::Parser;
use ffmzm::Family;

use crate::config::{CommandKind, Format};

/// Exact-diagonalization experiments on frustration-free, parity-conserving
/// spin chains and their Majorana zero modes.
#[derive(Debug, Clone, Parser)]
#[command(name = "ffmzm", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandKind,

    /// Model family: rank1, type1, type2, case2, case3 (rank3 needs --config).
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Chain length, or an inclusive range `lo..hi` for gap-scan.
    #[arg(long = "L")]
    pub sites: Option<String>,
    /// open or closed.
    #[arg(long)]
    pub boundary: Option<String>,
    /// Sublattice carrying the extra Z in case2: even or odd.
    #[arg(long)]
    pub sublattice: Option<String>,

    /// Model spec as JSON (replaces the model flags).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write `<command>.<format>` here instead of stdout.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Turn physics checks into exit code 3 on failure.
    #[arg(long)]
    pub assert: bool,

    #[arg(long)]
    pub degeneracy_tol: Option<f64>,
    #[arg(long)]
    pub null_tol: Option<f64>,
    /// Comma-separated s values for adiabatic-scan.
    #[arg(long = "s", allow_hyphen_values = true)]
    pub s_values: Option<String>,
    /// Random samples for mps-check and lemma-a.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Expected ground degeneracy checked by spectrum and ff-check.
    #[arg(long)]
    pub expect_degeneracy: Option<usize>,
}
