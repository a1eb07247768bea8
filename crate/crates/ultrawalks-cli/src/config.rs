//! Experiment configuration: TOML file plus command-line overrides.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use ultrawalks::generator::AdjacencyFile;
use ultrawalks::kernel::KernelFile;
use ultrawalks::padic::GroupSpec;
use ultrawalks::KernelProfile;

pub const DEFAULT_TIMES: [f64; 7] = [0.0, 1.0, 200.0, 500.0, 1000.0, 4000.0, 10000.0];
pub const DEFAULT_T_MAX: f64 = 10000.0;
pub const DEFAULT_TAU: f64 = 1e-8;
pub const OUT_ENV: &str = "ULTRAWALKS_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

impl std::str::FromStr for FileFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(FileFormat::Csv),
            "json" => Ok(FileFormat::Json),
            other => bail!("unknown format {other:?}, expected csv or json"),
        }
    }
}

/// Kernel selection, resolved before building anything.
#[derive(Debug, Clone)]
pub enum KernelChoice {
    Bessel { alpha: f64 },
    LogBessel,
    Tabulated { path: PathBuf },
    Adjacency { path: PathBuf },
}

/// Fully resolved experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub p: u32,
    pub l: u32,
    pub kernel: KernelChoice,
    pub times: Vec<f64>,
    pub t_max: f64,
    pub steps: usize,
    pub tau_cluster: f64,
    pub out: PathBuf,
    pub formats: Vec<FileFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    p: Option<u32>,
    l: Option<u32>,
    kernel: Option<KernelSection>,
    times: Option<Vec<f64>>,
    averaging: Option<AveragingSection>,
    outputs: Option<PathBuf>,
    formats: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSection {
    #[serde(rename = "type")]
    kind: String,
    alpha: Option<f64>,
    path: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AveragingSection {
    #[serde(rename = "T")]
    t_max: Option<f64>,
    steps: Option<usize>,
    tau_cluster: Option<f64>,
}

/// Values supplied on the command line; every field overrides the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub p: Option<u32>,
    pub l: Option<u32>,
    pub alpha: Option<f64>,
    pub kernel_file: Option<PathBuf>,
    pub adjacency_file: Option<PathBuf>,
    pub times: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<FileFormat>>,
}

impl ExperimentConfig {
    /// Merges (in increasing precedence) defaults, the optional TOML file,
    /// and command-line overrides.
    pub fn resolve(config_path: Option<&Path>, cli: &Overrides) -> Result<Self> {
        let file: ConfigFile = match config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ConfigFile::default(),
        };

        let p = cli.p.or(file.p).unwrap_or(2);
        let l = cli.l.or(file.l).unwrap_or(5);

        let kernel = Self::resolve_kernel(&file, cli)?;

        let times = cli
            .times
            .clone()
            .or(file.times)
            .unwrap_or_else(|| DEFAULT_TIMES.to_vec());
        if times.iter().any(|&t| t < 0.0) {
            bail!("times must be nonnegative");
        }
        if times.windows(2).any(|w| w[0] > w[1]) {
            bail!("times must be sorted ascending");
        }

        let averaging = file.averaging.unwrap_or(AveragingSection {
            t_max: None,
            steps: None,
            tau_cluster: None,
        });
        let t_max = cli.t_max.or(averaging.t_max).unwrap_or(DEFAULT_T_MAX);
        if t_max <= 0.0 || t_max.is_nan() {
            bail!("T must be positive");
        }
        let steps = cli
            .steps
            .or(averaging.steps)
            .unwrap_or((t_max * ultrawalks::limiting::DEFAULT_STEPS_PER_UNIT).round() as usize);
        let tau_cluster = averaging.tau_cluster.unwrap_or(DEFAULT_TAU);

        let out = cli
            .out
            .clone()
            .or(file.outputs)
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("ultrawalks-out"));

        let formats = match (&cli.formats, &file.formats) {
            (Some(f), _) => f.clone(),
            (None, Some(names)) => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<Vec<_>>>()?,
            (None, None) => vec![FileFormat::Csv, FileFormat::Json],
        };
        if formats.is_empty() {
            bail!("at least one output format is required");
        }

        Ok(Self {
            p,
            l,
            kernel,
            times,
            t_max,
            steps,
            tau_cluster,
            out,
            formats,
        })
    }

    fn resolve_kernel(file: &ConfigFile, cli: &Overrides) -> Result<KernelChoice> {
        let flag_sources = [
            cli.alpha.is_some(),
            cli.kernel_file.is_some(),
            cli.adjacency_file.is_some(),
        ]
        .iter()
        .filter(|&&x| x)
        .count();
        if flag_sources > 1 {
            bail!("choose exactly one of --alpha, --kernel-file, --adjacency-file");
        }
        if let Some(alpha) = cli.alpha {
            return Ok(if alpha == 1.0 {
                KernelChoice::LogBessel
            } else {
                KernelChoice::Bessel { alpha }
            });
        }
        if let Some(path) = &cli.kernel_file {
            return Ok(KernelChoice::Tabulated { path: path.clone() });
        }
        if let Some(path) = &cli.adjacency_file {
            return Ok(KernelChoice::Adjacency { path: path.clone() });
        }
        match &file.kernel {
            None => Ok(KernelChoice::Bessel { alpha: 1.2 }),
            Some(section) => match section.kind.as_str() {
                "bessel" => {
                    let alpha = section
                        .alpha
                        .context("kernel type \"bessel\" requires alpha")?;
                    Ok(if alpha == 1.0 {
                        KernelChoice::LogBessel
                    } else {
                        KernelChoice::Bessel { alpha }
                    })
                }
                "log_bessel" => Ok(KernelChoice::LogBessel),
                "tabulated" => Ok(KernelChoice::Tabulated {
                    path: section
                        .path
                        .clone()
                        .context("kernel type \"tabulated\" requires path")?,
                }),
                "adjacency" => Ok(KernelChoice::Adjacency {
                    path: section
                        .path
                        .clone()
                        .context("kernel type \"adjacency\" requires path")?,
                }),
                other => bail!("unknown kernel type {other:?}"),
            },
        }
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        Ok(GroupSpec::new(self.p, self.l)?)
    }

    /// Short human-readable description of the kernel choice.
    pub fn kernel_label(&self) -> String {
        match &self.kernel {
            KernelChoice::Bessel { alpha } => format!("bessel alpha={alpha}"),
            KernelChoice::LogBessel => "log_bessel".to_string(),
            KernelChoice::Tabulated { path } => format!("tabulated {}", path.display()),
            KernelChoice::Adjacency { path } => format!("adjacency {}", path.display()),
        }
    }
}

/// What the kernel choice resolves to once files are read.
pub enum BuiltKernel {
    Profile(KernelProfile),
    Adjacency(ultrawalks::generator::AdjacencySpec),
}

pub fn build_kernel(config: &ExperimentConfig) -> Result<(GroupSpec, BuiltKernel)> {
    let spec = config.spec()?;
    match &config.kernel {
        KernelChoice::Bessel { alpha } => Ok((
            spec,
            BuiltKernel::Profile(KernelProfile::bessel(&spec, *alpha)?),
        )),
        KernelChoice::LogBessel => Ok((
            spec,
            BuiltKernel::Profile(KernelProfile::log_bessel(&spec)?),
        )),
        KernelChoice::Tabulated { path } => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading kernel file {}", path.display()))?;
            let file = KernelFile::parse(&text)?;
            if file.p != config.p || file.l != config.l {
                bail!(
                    "kernel file {} is for p={} l={}, but the experiment uses p={} l={}",
                    path.display(),
                    file.p,
                    file.l,
                    config.p,
                    config.l
                );
            }
            let (spec, profile) = file.build()?;
            Ok((spec, BuiltKernel::Profile(profile)))
        }
        KernelChoice::Adjacency { path } => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading adjacency file {}", path.display()))?;
            let file = AdjacencyFile::parse(&text)?;
            if file.p != config.p || file.l != config.l {
                bail!(
                    "adjacency file {} is for p={} l={}, but the experiment uses p={} l={}",
                    path.display(),
                    file.p,
                    file.l,
                    config.p,
                    config.l
                );
            }
            let (spec, adj) = file.build()?;
            Ok((spec, BuiltKernel::Adjacency(adj)))
        }
    }
}
