//! `ultrawalks`: build ultrametric rate matrices, propagate the classical
//! and quantum walks they generate, and export plot-ready datasets.

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use ultrawalks::dynamics::{classical_transition, quantum_transition};
use ultrawalks::generator::{build_adjacency_generator, build_generator};
use ultrawalks::limiting::{compare, limiting_quadrature, limiting_spectral};
use ultrawalks::spectral::{closed_form_spectrum, eigendecompose, group_eigenvalues};

use ultrawalks_cli::config::{build_kernel, BuiltKernel, ExperimentConfig, FileFormat, Overrides};
use ultrawalks_cli::run::{generator_file, limiting_file, run_experiment, snapshot_file};
use ultrawalks_cli::{io, validate};

#[derive(Parser)]
#[command(
    name = "ultrawalks",
    version,
    about = "Ultrametric rate matrices and the classical/quantum walks they generate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Prime base of the state tree
    #[arg(long)]
    p: Option<u32>,
    /// Tree depth; the walk has p^l states
    #[arg(long)]
    l: Option<u32>,
    /// Kernel steepness parameter (1 selects the logarithmic kernel)
    #[arg(long)]
    alpha: Option<f64>,
    /// Tabulated kernel JSON ({p, l, values[], tail_mass})
    #[arg(long = "kernel-file")]
    kernel_file: Option<PathBuf>,
    /// Graph adjacency JSON ({p, l, vertices[], edges[[a,b],...]})
    #[arg(long = "adjacency-file")]
    adjacency_file: Option<PathBuf>,
    /// Observation times, comma separated, ascending
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Averaging horizon for the quadrature limit
    #[arg(long = "T")]
    t_max: Option<f64>,
    /// Trapezoid subintervals for the quadrature limit
    #[arg(long)]
    steps: Option<usize>,
    /// Output directory (default: $ULTRAWALKS_OUT or ./ultrawalks-out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output formats, comma separated: csv, json
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<FileFormat>>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            p: self.p,
            l: self.l,
            alpha: self.alpha,
            kernel_file: self.kernel_file.clone(),
            adjacency_file: self.adjacency_file.clone(),
            times: self.times.clone(),
            t_max: self.t_max,
            steps: self.steps,
            out: self.out.clone(),
            formats: self.format.clone(),
        }
    }

    fn config(&self, config_file: Option<&PathBuf>) -> Result<ExperimentConfig> {
        ExperimentConfig::resolve(config_file.map(|p| p.as_path()), &self.overrides())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the rate matrix and export it
    Matrix(CommonArgs),
    /// Classical transition matrices at the requested times
    Ctmc(CommonArgs),
    /// Quantum transition matrices at the requested times
    Ctqmc(CommonArgs),
    /// Print the eigenvalues grouped into eigenspaces
    Spectrum(CommonArgs),
    /// Limiting (long-time average) distribution of the quantum walk
    Limiting(LimitingArgs),
    /// Limiting-distribution statistics vs the uniform stationary value
    Compare(LimitingArgs),
    /// Run the structural invariant suite; nonzero exit on any failure
    Validate(CommonArgs),
    /// Emit the full experiment dataset with a manifest
    Run(RunArgs),
}

#[derive(Args)]
struct LimitingArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// spectral (exact projector average) or quadrature (trapezoid rule)
    #[arg(long, default_value = "spectral")]
    method: String,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// TOML experiment description; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() {
    if let Err(err) = dispatch() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn dispatch() -> Result<()> {
    match Cli::parse().command {
        Command::Matrix(args) => cmd_matrix(&args.config(None)?),
        Command::Ctmc(args) => cmd_transitions(&args.config(None)?, false),
        Command::Ctqmc(args) => cmd_transitions(&args.config(None)?, true),
        Command::Spectrum(args) => cmd_spectrum(&args.config(None)?),
        Command::Limiting(args) => cmd_limiting(&args.common.config(None)?, &args.method, true),
        Command::Compare(args) => cmd_limiting(&args.common.config(None)?, &args.method, false),
        Command::Validate(args) => cmd_validate(&args.config(None)?),
        Command::Run(args) => cmd_run(&args.common.config(args.config.as_ref())?),
    }
}

fn build_generator_for(config: &ExperimentConfig) -> Result<ultrawalks::GeneratorMatrix> {
    let (_, kernel) = build_kernel(config)?;
    Ok(match &kernel {
        BuiltKernel::Profile(profile) => build_generator(profile),
        BuiltKernel::Adjacency(adj) => build_adjacency_generator(adj),
    })
}

fn cmd_matrix(config: &ExperimentConfig) -> Result<()> {
    let generator = build_generator_for(config)?;
    std::fs::create_dir_all(&config.out)?;
    let paths = io::write_matrix(
        &config.out,
        "generator",
        &generator_file(&generator),
        &config.formats,
    )?;
    for path in paths {
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_transitions(config: &ExperimentConfig, quantum: bool) -> Result<()> {
    let generator = build_generator_for(config)?;
    let data = eigendecompose(&generator)?;
    std::fs::create_dir_all(&config.out)?;
    let label = if quantum { "ctqmc" } else { "ctmc" };
    for &t in &config.times {
        let snap = if quantum {
            quantum_transition(&data, t)?
        } else {
            classical_transition(&data, t)?
        };
        let file = snapshot_file(&snap);
        let paths = io::write_matrix(&config.out, &format!("{label}_t{t}"), &file, &config.formats)?;
        println!(
            "t={t}: entries in [{:.6}, {:.6}] -> {}",
            snap.matrix.min(),
            snap.matrix.max(),
            paths
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    Ok(())
}

fn cmd_spectrum(config: &ExperimentConfig) -> Result<()> {
    let (_, kernel) = build_kernel(config)?;
    let generator = match &kernel {
        BuiltKernel::Profile(profile) => build_generator(profile),
        BuiltKernel::Adjacency(adj) => build_adjacency_generator(adj),
    };
    let data = eigendecompose(&generator)?;
    let partition = group_eigenvalues(&data, config.tau_cluster)?;
    println!("eigenvalue multiplicity");
    for cluster in partition.clusters() {
        let representative = data.eigenvalues()[cluster[0]];
        println!("{representative:.12e} {}", cluster.len());
    }
    println!("distinct {}", partition.len());
    if let BuiltKernel::Profile(profile) = &kernel {
        let expanded = closed_form_spectrum(profile).expanded();
        let dev = data
            .eigenvalues()
            .iter()
            .zip(&expanded)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("closed-form-deviation {dev:.3e}");
    }
    Ok(())
}

fn cmd_limiting(config: &ExperimentConfig, method: &str, export: bool) -> Result<()> {
    let generator = build_generator_for(config)?;
    let data = eigendecompose(&generator)?;
    let limit = match method {
        "spectral" => limiting_spectral(&data, config.tau_cluster)?,
        "quadrature" => limiting_quadrature(&data, config.t_max, config.steps)?,
        other => bail!("unknown method {other:?}, expected spectral or quadrature"),
    };
    if let Some(warning) = &limit.warning {
        eprintln!("warning: {warning}");
    }
    if export {
        std::fs::create_dir_all(&config.out)?;
        let paths = io::write_matrix(
            &config.out,
            &format!("limiting_{method}"),
            &limiting_file(&limit),
            &config.formats,
        )?;
        for path in paths {
            println!("{}", path.display());
        }
    }
    let report = compare(&limit);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_validate(config: &ExperimentConfig) -> Result<()> {
    let (_, kernel) = build_kernel(config)?;
    let summary = validate::run_validation(&kernel, &config.kernel_label(), config.tau_cluster)?;
    for check in &summary.checks {
        println!(
            "{} {} (value {:.3e}, threshold {:.3e})",
            if check.pass { "ok  " } else { "FAIL" },
            check.name,
            check.value,
            check.threshold
        );
    }
    if !summary.all_pass {
        bail!("validation failed");
    }
    println!("all checks passed");
    Ok(())
}

fn cmd_run(config: &ExperimentConfig) -> Result<()> {
    let outcome = run_experiment(config)?;
    println!(
        "wrote {} files, manifest {}",
        outcome.files,
        outcome.manifest_path.display()
    );
    println!(
        "validation: {}",
        if outcome.validation_pass {
            "all checks passed"
        } else {
            "FAILURES (see validation.json)"
        }
    );
    Ok(())
}
