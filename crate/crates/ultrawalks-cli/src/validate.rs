//! The invariant suite behind `ultrawalks validate` and the validation
//! report emitted by `ultrawalks run`.

use anyhow::Result;
use serde::{Deserialize, Serialize};
use ultrawalks::dynamics::{
    classical_transition, classical_transition_via_heat, oscillatory_snapshot,
    quantum_transition, stochasticity, truncated_heat_mass, unitarity_defect,
};
use ultrawalks::generator::{
    build_adjacency_generator, build_generator, validate_generator, validate_generator_against,
    GeneratorMatrix, UltrametricCheck,
};
use ultrawalks::kernel::{symbol_from_profile, SymbolKind};
use ultrawalks::limiting::limiting_spectral;
use ultrawalks::spectral::{
    closed_form_spectrum, distinct_at_noise_scale, eigendecompose, group_eigenvalues,
};
use ultrawalks::KernelProfile;

use crate::config::BuiltKernel;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub kernel: String,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

struct Collector {
    checks: Vec<CheckResult>,
}

impl Collector {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    /// Records `value <= threshold` style checks.
    fn bound(&mut self, name: &str, value: f64, threshold: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        });
    }

    /// Records boolean facts; value is 0/1 with threshold 0 meaning "must
    /// be true".
    fn flag(&mut self, name: &str, ok: bool) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            value: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            pass: ok,
        });
    }
}

fn common_checks(c: &mut Collector, generator: &GeneratorMatrix, tau: f64) -> Result<()> {
    let data = eigendecompose(generator)?;
    let n = data.size();

    let vtv = data.vectors().transpose() * data.vectors();
    c.bound(
        "eigenvector-orthonormality",
        (vtv - nalgebra::DMatrix::identity(n, n)).amax(),
        1e-10,
    );
    c.bound(
        "eigen-reconstruction",
        (data.apply(|x| x) - generator.entries()).amax(),
        1e-9,
    );
    c.bound(
        "negative-semidefinite",
        *data.eigenvalues().last().unwrap_or(&0.0),
        1e-10,
    );

    let partition = group_eigenvalues(&data, tau)?;
    let mut projector_sum = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..partition.len() {
        projector_sum += partition.projector(&data, k);
    }
    c.bound(
        "projector-completeness",
        (projector_sum - nalgebra::DMatrix::identity(n, n)).amax(),
        1e-9,
    );
    c.flag(
        "cluster-count-matches-noise-scale",
        partition.len() == distinct_at_noise_scale(&data),
    );

    let mut classical_dev = 0.0f64;
    let mut quantum_dev = 0.0f64;
    let mut unitary_dev = 0.0f64;
    for t in [0.1, 1.0, 200.0] {
        let classical = stochasticity(&classical_transition(&data, t)?);
        classical_dev = classical_dev.max(classical.max_row_deviation);
        let quantum = stochasticity(&quantum_transition(&data, t)?);
        quantum_dev = quantum_dev
            .max(quantum.max_row_deviation)
            .max(quantum.max_col_deviation);
        unitary_dev = unitary_dev.max(unitarity_defect(&data, t)?);
    }
    c.bound("classical-stochasticity", classical_dev, 1e-10);
    c.bound("quantum-bistochasticity", quantum_dev, 1e-10);
    c.bound("unitarity", unitary_dev, 1e-10);

    let limit = limiting_spectral(&data, tau)?;
    let mut limit_dev = 0.0f64;
    for i in 0..n {
        limit_dev = limit_dev
            .max((limit.chi.row(i).sum() - 1.0).abs())
            .max((limit.chi.column(i).sum() - 1.0).abs());
    }
    c.bound("limiting-bistochasticity", limit_dev, 1e-10);
    c.flag("limiting-cluster-warning-clear", limit.warning.is_none());
    Ok(())
}

fn kernel_checks(c: &mut Collector, profile: &KernelProfile, tau: f64) -> Result<()> {
    let mass_tol = match profile.kind() {
        SymbolKind::Tabulated => 1e-9,
        _ => 1e-12,
    };
    c.bound("kernel-unit-mass", (profile.total_mass() - 1.0).abs(), mass_tol);
    c.bound(
        "symbol-normalization",
        (symbol_from_profile(profile, 0)? - 1.0).abs(),
        1e-10,
    );
    if !matches!(profile.kind(), SymbolKind::Tabulated) {
        let mut dev = 0.0f64;
        for j in 0..=profile.spec().level() {
            dev = dev.max((symbol_from_profile(profile, j)? - profile.symbol(j)?).abs());
        }
        c.bound("symbol-route-agreement", dev, 1e-10);
    }

    let generator = build_generator(profile);
    let report = validate_generator_against(&generator, profile);
    c.bound("generator-row-sums", report.max_row_sum_deviation, 1e-12);
    c.bound("generator-symmetry", report.max_asymmetry, 0.0);
    c.flag("generator-off-diagonals-nonnegative", report.min_off_diagonal >= 0.0);
    c.flag(
        "generator-ultrametric-structure",
        report.ultrametric == UltrametricCheck::Pass,
    );
    c.bound(
        "generator-diagonal-formula",
        report.diagonal_formula_deviation.unwrap_or(f64::INFINITY),
        1e-12,
    );

    let data = eigendecompose(&generator)?;
    let expanded = closed_form_spectrum(profile).expanded();
    let mut spectrum_dev = 0.0f64;
    for (got, want) in data.eigenvalues().iter().zip(&expanded) {
        spectrum_dev = spectrum_dev.max((got - want).abs());
    }
    c.bound("spectrum-oracle", spectrum_dev, 1e-9);

    let mut classical_gap = 0.0f64;
    let mut quantum_gap = 0.0f64;
    for t in [1.0, 200.0] {
        classical_gap = classical_gap.max(
            (classical_transition(&data, t)?.matrix
                - classical_transition_via_heat(profile, t)?.matrix)
                .amax(),
        );
        quantum_gap = quantum_gap.max(
            (quantum_transition(&data, t)?.matrix - oscillatory_snapshot(profile, t)?.matrix)
                .amax(),
        );
    }
    c.bound("classical-dual-path", classical_gap, 1e-9);
    c.bound("quantum-dual-path", quantum_gap, 1e-9);

    let mass_depth = match profile.kind() {
        SymbolKind::Tabulated => profile.spec().level().saturating_sub(1),
        _ => 40,
    };
    let mut mass_dev = 0.0f64;
    for t in [0.1, 1.0, 10.0] {
        mass_dev = mass_dev.max((truncated_heat_mass(profile, t, mass_depth)? - 1.0).abs());
    }
    c.bound("heat-kernel-unit-mass", mass_dev, 1e-8);

    common_checks(c, &generator, tau)
}

/// Runs every applicable invariant check for the configured kernel.
pub fn run_validation(kernel: &BuiltKernel, label: &str, tau: f64) -> Result<ValidationSummary> {
    let mut c = Collector::new();
    match kernel {
        BuiltKernel::Profile(profile) => kernel_checks(&mut c, profile, tau)?,
        BuiltKernel::Adjacency(adj) => {
            let generator = build_adjacency_generator(adj);
            let report = validate_generator(&generator);
            c.bound("generator-row-sums", report.max_row_sum_deviation, 1e-12);
            c.bound("generator-symmetry", report.max_asymmetry, 0.0);
            c.flag(
                "generator-off-diagonals-nonnegative",
                report.min_off_diagonal >= 0.0,
            );
            c.flag(
                "generator-ultrametric-not-applicable",
                report.ultrametric == UltrametricCheck::NotApplicable,
            );
            common_checks(&mut c, &generator, tau)?;
        }
    }
    let all_pass = c.checks.iter().all(|check| check.pass);
    Ok(ValidationSummary {
        kernel: label.to_string(),
        checks: c.checks,
        all_pass,
    })
}
