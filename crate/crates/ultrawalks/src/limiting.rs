//! Long-time average of the quantum transition probabilities.
//!
//! Two routes. The quadrature route mirrors the defining Cesaro limit
//! `chi = lim (1/T) int_0^T pi(t) dt` with a composite trapezoid rule.
//! The spectral route evaluates the limit exactly: averaging kills every
//! cross term `e^{it(w - w')}` between distinct eigenvalues, leaving
//! `chi_{I,J} = sum_clusters (P_c)_{I,J}^2`, which is doubly stochastic by
//! projector completeness. Quadrature exists to validate that derivation;
//! its residue decays like `1/(T * gap)`.

use crate::error::{Error, Result};
use crate::spectral::{group_eigenvalues, SpectralData};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How a limiting distribution was computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitingMethod {
    Quadrature { t_max: f64, steps: usize },
    Spectral { tolerance: f64 },
}

/// Doubly stochastic matrix of time-averaged quantum transition
/// probabilities.
#[derive(Debug, Clone)]
pub struct LimitingDistribution {
    pub spec: crate::padic::GroupSpec,
    pub chi: DMatrix<f64>,
    pub method: LimitingMethod,
    /// Set when eigenvalue clusters look chained together, i.e. the
    /// in-cluster spread dwarfs the clustering tolerance.
    pub warning: Option<String>,
}

/// Steps per unit time used by the default quadrature grid.
pub const DEFAULT_STEPS_PER_UNIT: f64 = 10.0;

/// Composite trapezoid average of the quantum snapshot over `steps`
/// subintervals of `[0, t_max]` (grid spacing `t_max / steps`).
///
/// Partial sums are accumulated over fixed disjoint chunks of the grid in
/// parallel and reduced in chunk order, so the result is bit-identical
/// across thread counts.
pub fn limiting_quadrature(
    data: &SpectralData,
    t_max: f64,
    steps: usize,
) -> Result<LimitingDistribution> {
    if t_max <= 0.0 || t_max.is_nan() || steps < 2 {
        return Err(Error::BadQuadrature { t_max, steps });
    }
    let n = data.size();
    let h = t_max / steps as f64;
    // Column k of V^T holds state k's eigenbasis coordinates contiguously.
    let vt = data.vectors().transpose();
    let coords = vt.as_slice();
    let eigenvalues = data.eigenvalues();

    const CHUNK: usize = 1024;
    let chunk_count = (steps + 1).div_ceil(CHUNK);
    let partials: Vec<DMatrix<f64>> = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(steps + 1);
            let mut acc = DMatrix::<f64>::zeros(n, n);
            let mut phased = vec![Complex64::new(0.0, 0.0); n * n];
            for k in lo..hi {
                let t = k as f64 * h;
                let weight = if k == 0 || k == steps { 0.5 } else { 1.0 };
                for i in 0..n {
                    let col = &coords[i * n..(i + 1) * n];
                    let dst = &mut phased[i * n..(i + 1) * n];
                    for j in 0..n {
                        dst[j] = Complex64::from_polar(col[j], t * eigenvalues[j]);
                    }
                }
                // amp(i, k) = sum_j V_ij e^{it w_j} V_kj is symmetric in
                // (i, k); evaluate the upper triangle and mirror.
                for i in 0..n {
                    let pi_col = &phased[i * n..(i + 1) * n];
                    for kk in i..n {
                        let v_col = &coords[kk * n..(kk + 1) * n];
                        let mut re = 0.0;
                        let mut im = 0.0;
                        for j in 0..n {
                            re += pi_col[j].re * v_col[j];
                            im += pi_col[j].im * v_col[j];
                        }
                        let prob = weight * (re * re + im * im);
                        acc[(i, kk)] += prob;
                        if kk != i {
                            acc[(kk, i)] += prob;
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut chi = DMatrix::<f64>::zeros(n, n);
    for part in partials {
        chi += part;
    }
    chi /= steps as f64;

    Ok(LimitingDistribution {
        spec: *data.spec(),
        chi,
        method: LimitingMethod::Quadrature { t_max, steps },
        warning: None,
    })
}

/// Exact long-time average through spectral projectors.
pub fn limiting_spectral(data: &SpectralData, tolerance: f64) -> Result<LimitingDistribution> {
    let partition = group_eigenvalues(data, tolerance)?;
    let n = data.size();
    let mut chi = DMatrix::<f64>::zeros(n, n);
    for c in 0..partition.len() {
        let projector = partition.projector(data, c);
        for i in 0..n {
            for j in 0..n {
                chi[(i, j)] += projector[(i, j)] * projector[(i, j)];
            }
        }
    }
    let distinct = crate::spectral::distinct_at_noise_scale(data);
    let warning = (partition.len() < distinct).then(|| {
        format!(
            "tolerance {tolerance:.3e} merged distinct eigenspaces: {} clusters where the noise-scale spectrum has {distinct}; the average may be biased toward a finite-time value",
            partition.len()
        )
    });
    Ok(LimitingDistribution {
        spec: *data.spec(),
        chi,
        method: LimitingMethod::Spectral { tolerance },
        warning,
    })
}

/// Summary statistics of a limiting distribution against the classical
/// stationary value `p^-l`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Classical stationary probability `p^-l`.
    pub stationary: f64,
    pub chi_min: f64,
    /// Max entry, the usual headline statistic for these averages.
    pub chi_max: f64,
    pub chi_diag_mean: f64,
    pub chi_offdiag_mean: f64,
    /// Strict dominance `chi_min > p^-l`.
    pub dominates: bool,
}

pub fn compare(limit: &LimitingDistribution) -> ComparisonReport {
    let n = limit.spec.size();
    let stationary = (limit.spec.prime() as f64).powi(-(limit.spec.level() as i32));
    let chi = &limit.chi;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = chi[(i, j)];
            min = min.min(v);
            max = max.max(v);
            if i == j {
                diag += v;
            } else {
                off += v;
            }
        }
    }
    let chi_diag_mean = diag / n as f64;
    let chi_offdiag_mean = if n > 1 {
        off / (n * n - n) as f64
    } else {
        0.0
    };
    ComparisonReport {
        stationary,
        chi_min: min,
        chi_max: max,
        chi_diag_mean,
        chi_offdiag_mean,
        dominates: min > stationary,
    }
}
