use std::path::PathBuf;

use clap::ValueEnum;
use ffmzm::hilbert::check_sites;
use ffmzm::mzm::NULL_TOL;
use ffmzm::spectral::DEGENERACY_TOL;
use ffmzm::{parse_spec, Boundary, FFModelSpec, Family, ModelParams, Sublattice};
use serde::Serialize;

use crate::args::Cli;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Build,
    Spectrum,
    FfCheck,
    GapScan,
    MzmReport,
    JwCheck,
    MpsCheck,
    AdiabaticScan,
    CloseChain,
    LemmaA,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Build => "build",
            CommandKind::Spectrum => "spectrum",
            CommandKind::FfCheck => "ff-check",
            CommandKind::GapScan => "gap-scan",
            CommandKind::MzmReport => "mzm-report",
            CommandKind::JwCheck => "jw-check",
            CommandKind::MpsCheck => "mps-check",
            CommandKind::AdiabaticScan => "adiabatic-scan",
            CommandKind::CloseChain => "close-chain",
            CommandKind::LemmaA => "lemma-a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Numerical thresholds a run may override; echoed in every artifact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub degeneracy_tol: f64,
    pub null_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            degeneracy_tol: DEGENERACY_TOL,
            null_tol: NULL_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Absent only for sampling runs of mps-check and lemma-a.
    pub spec: Option<FFModelSpec>,
    /// Chain lengths; several only for gap-scan.
    pub lengths: Vec<usize>,
    pub output_dir: Option<PathBuf>,
    pub format: Format,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub assert: bool,
    pub s_values: Vec<f64>,
    pub samples: Option<usize>,
    pub theta: Option<f64>,
    pub expect_degeneracy: Option<usize>,
}

pub const DEFAULT_S_VALUES: [f64; 4] = [-0.4, 0.0, 1.0, 3.0];

impl RunConfig {
    /// A configuration for `command` on `spec` with default settings.
    pub fn new(command: CommandKind, spec: FFModelSpec) -> Self {
        Self {
            command,
            lengths: vec![spec.sites],
            spec: Some(spec),
            output_dir: None,
            format: Format::Json,
            tolerances: Tolerances::default(),
            seed: 0,
            assert: false,
            s_values: DEFAULT_S_VALUES.to_vec(),
            samples: None,
            theta: None,
            expect_degeneracy: None,
        }
    }

    pub fn from_cli(cli: &Cli) -> CliResult<Self> {
        let tolerances = Tolerances {
            degeneracy_tol: positive_tol("degeneracy-tol", cli.degeneracy_tol, DEGENERACY_TOL)?,
            null_tol: positive_tol("null-tol", cli.null_tol, NULL_TOL)?,
        };
        let lengths = match &cli.sites {
            Some(text) => parse_lengths(text)?,
            None => Vec::new(),
        };
        if lengths.len() > 1 && cli.command != CommandKind::GapScan {
            return Err(CliError::Config("--L ranges are only accepted by gap-scan".into()));
        }
        for &l in &lengths {
            check_sites(l)?;
        }
        let boundary = cli.boundary.as_deref().map(parse_boundary).transpose()?;

        let spec = match (&cli.config, cli.family) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("--config and --family are mutually exclusive".into()))
            }
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                let mut spec = parse_spec(&text)?;
                if let Some(&l) = lengths.first() {
                    spec = spec.with_sites(l)?;
                }
                if let Some(b) = boundary {
                    spec = spec.with_boundary(b);
                }
                check_sites(spec.sites)?;
                Some(spec)
            }
            (None, Some(family)) => {
                let &sites = lengths
                    .first()
                    .ok_or_else(|| CliError::Config("--L is required with --family".into()))?;
                let params = params_from_flags(family, cli)?;
                Some(FFModelSpec::new(sites, boundary.unwrap_or(Boundary::Open), params)?)
            }
            (None, None) => None,
        };

        let sampling = matches!(cli.command, CommandKind::MpsCheck)
            || (cli.command == CommandKind::LemmaA && cli.samples.is_some());
        if spec.is_none() && !sampling {
            return Err(CliError::Config(format!(
                "{} needs a model: pass --family with parameters or --config",
                cli.command.name()
            )));
        }
        if cli.command == CommandKind::MpsCheck && spec.is_none() && lengths.is_empty() {
            return Err(CliError::Config("mps-check needs --L".into()));
        }
        if let (CommandKind::MpsCheck, Some(theta)) = (cli.command, cli.theta) {
            if !(theta.is_finite() && theta > 0.0 && theta < std::f64::consts::PI) {
                return Err(CliError::Config(format!("theta must lie in open interval (0, π) (got {theta})")));
            }
        }
        let s_values = match &cli.s_values {
            Some(text) => parse_list(text)?,
            None => DEFAULT_S_VALUES.to_vec(),
        };
        let lengths = match (&spec, lengths.is_empty()) {
            (Some(s), true) => vec![s.sites],
            _ => lengths,
        };
        Ok(Self {
            command: cli.command,
            spec,
            lengths,
            output_dir: cli.output_dir.clone(),
            format: cli.format,
            tolerances,
            seed: cli.seed,
            assert: cli.assert,
            s_values,
            samples: cli.samples,
            theta: cli.theta,
            expect_degeneracy: cli.expect_degeneracy,
        })
    }

    pub fn require_spec(&self) -> CliResult<&FFModelSpec> {
        self.spec
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("{} needs a model", self.command.name())))
    }
}

fn positive_tol(name: &str, value: Option<f64>, default: f64) -> CliResult<f64> {
    match value {
        None => Ok(default),
        Some(v) if v.is_finite() && v > 0.0 => Ok(v),
        Some(v) => Err(CliError::Config(format!("{name} must be positive (got {v})"))),
    }
}

fn required(name: &str, value: Option<f64>, family: Family) -> CliResult<f64> {
    value.ok_or_else(|| CliError::Config(format!("--{name} is required for family {family}")))
}

fn params_from_flags(family: Family, cli: &Cli) -> CliResult<ModelParams> {
    let a = cli.a.unwrap_or(1.0);
    let b = cli.b.unwrap_or(1.0);
    Ok(match family {
        Family::Rank1 => ModelParams::Rank1 {
            theta: required("theta", cli.theta, family)?,
        },
        Family::Type1 => ModelParams::Type1 {
            a,
            b,
            omega: required("omega", cli.omega, family)?,
        },
        Family::Type2 => ModelParams::Type2 {
            a,
            b,
            gamma: required("gamma", cli.gamma, family)?,
        },
        Family::CaseII => ModelParams::CaseII {
            a,
            b,
            omega: required("omega", cli.omega, family)?,
            sublattice: match cli.sublattice.as_deref() {
                None => Sublattice::Odd,
                Some(s) => parse_sublattice(s)?,
            },
        },
        Family::CaseIII => ModelParams::CaseIII {
            a,
            b,
            f: required("f", cli.f, family)?,
        },
        Family::Rank3 => {
            return Err(CliError::Config(
                "rank3 has a complex local state; describe it with --config".into(),
            ))
        }
    })
}

fn parse_boundary(s: &str) -> CliResult<Boundary> {
    match s.to_ascii_lowercase().as_str() {
        "open" => Ok(Boundary::Open),
        "closed" => Ok(Boundary::Closed),
        other => Err(CliError::Config(format!("boundary must be open or closed (got {other:?})"))),
    }
}

fn parse_sublattice(s: &str) -> CliResult<Sublattice> {
    match s.to_ascii_lowercase().as_str() {
        "even" => Ok(Sublattice::Even),
        "odd" => Ok(Sublattice::Odd),
        other => Err(CliError::Config(format!("sublattice must be even or odd (got {other:?})"))),
    }
}

/// `"6"`, `"4..10"` or `"4..=10"`; ranges are inclusive.
pub fn parse_lengths(text: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Config(format!("--L expects n or lo..hi, got {text:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once("..") {
        None => Ok(vec![num(text)?]),
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(bad());
            }
            Ok((lo..=hi).collect())
        }
    }
}

fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("cannot parse {s:?} as a number")))
        })
        .collect()
}
