//! Symmetric eigendecomposition of a generator, eigenvalue clustering, and
//! the closed-form spectrum of kernel generators.
//!
//! A kernel generator is a convolution on the abelian group `G_l`, so the
//! group characters diagonalize it: the eigenvalues are `0` (the uniform
//! mode) and `J^(p^j) - 1` with multiplicity `(p-1) p^{j-1}` for
//! `j = 1..l`, where `J^` is the kernel's Fourier symbol. The numeric
//! decomposition is kept deliberately independent so the two routes can
//! cross-check each other.

use crate::error::{Error, Result};
use crate::generator::GeneratorMatrix;
use crate::kernel::KernelProfile;
use crate::padic::GroupSpec;
use nalgebra::{DMatrix, SymmetricEigen};

/// Default gap threshold separating numerical noise from true degeneracy.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// generator.
#[derive(Debug, Clone)]
pub struct SpectralData {
    spec: GroupSpec,
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralData {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Spectral gap `-lambda` of the slowest nonuniform mode, i.e. the
    /// largest eigenvalue below zero, measured from zero.
    pub fn gap(&self) -> f64 {
        let n = self.size();
        if n < 2 {
            return 0.0;
        }
        -self.eigenvalues[n - 2]
    }

    /// `V diag(f(lambda)) V^T` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.size();
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[j]);
        }
        let mut out = DMatrix::zeros(n, n);
        scaled.mul_to(&self.vectors.transpose(), &mut out);
        out
    }
}

/// Dense symmetric eigensolve, eigenvalues sorted ascending with a stable
/// permutation so identical input bits give identical output.
pub fn eigendecompose(g: &GeneratorMatrix) -> Result<SpectralData> {
    let eigen = SymmetricEigen::try_new(g.entries().clone(), f64::EPSILON, 0)
        .ok_or(Error::EigenFailure)?;
    let n = eigen.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .expect("symmetric eigenvalues are finite")
            .then(a.cmp(&b))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eigen.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eigen.eigenvectors.column(src));
    }
    Ok(SpectralData {
        spec: *g.spec(),
        eigenvalues,
        vectors,
    })
}

/// Predicted multiset of eigenvalues for a kernel generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumForecast {
    /// `(eigenvalue, multiplicity)` pairs, eigenvalue ascending.
    pairs: Vec<(f64, usize)>,
}

impl SpectrumForecast {
    pub fn pairs(&self) -> &[(f64, usize)] {
        &self.pairs
    }

    pub fn distinct_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.pairs.iter().map(|&(_, m)| m).sum()
    }

    /// Full eigenvalue list, ascending, multiplicities expanded.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for &(value, mult) in &self.pairs {
            out.extend(std::iter::repeat_n(value, mult));
        }
        out
    }
}

/// Character-basis spectrum of the kernel generator:
/// `{0} U {J^(p^j) - 1 : multiplicity (p-1) p^{j-1}, j = 1..l}`.
pub fn closed_form_spectrum(profile: &KernelProfile) -> SpectrumForecast {
    let spec = profile.spec();
    let p = spec.prime() as usize;
    let l = spec.level();
    let mut pairs: Vec<(f64, usize)> = (1..=l)
        .map(|j| {
            let value = profile
                .symbol(j)
                .expect("symbol is defined up to depth l for every kernel kind")
                - 1.0;
            let mult = (p - 1) * p.pow(j - 1);
            (value, mult)
        })
        .collect();
    pairs.push((0.0, 1));
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    SpectrumForecast { pairs }
}

/// Indices of the sorted eigenvalues grouped into eigenspaces.
#[derive(Debug, Clone)]
pub struct EigenspacePartition {
    clusters: Vec<Vec<usize>>,
    tolerance: f64,
}

impl EigenspacePartition {
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Orthogonal projector onto one cluster's span.
    pub fn projector(&self, data: &SpectralData, cluster: usize) -> DMatrix<f64> {
        let n = data.size();
        let members = &self.clusters[cluster];
        let mut basis = DMatrix::zeros(n, members.len());
        for (dst, &k) in members.iter().enumerate() {
            basis.set_column(dst, &data.vectors().column(k));
        }
        &basis * basis.transpose()
    }

    /// Largest eigenvalue spread inside a single cluster; spreads far above
    /// the tolerance mean distinct eigenspaces were chained together.
    pub fn max_cluster_spread(&self, data: &SpectralData) -> f64 {
        self.clusters
            .iter()
            .map(|c| data.eigenvalues()[*c.last().unwrap()] - data.eigenvalues()[c[0]])
            .fold(0.0, f64::max)
    }
}

/// Gap scale below which two numeric eigenvalues of these generators are
/// indistinguishable from an exactly degenerate pair.
pub const NOISE_GAP: f64 = 1e-10;

/// Number of distinct eigenvalues when clustered at the numerical noise
/// scale; the reference against which a coarser clustering is judged.
pub fn distinct_at_noise_scale(data: &SpectralData) -> usize {
    group_eigenvalues(data, NOISE_GAP)
        .expect("noise tolerance is positive")
        .len()
}

/// Single-linkage clustering of the sorted eigenvalues: a new cluster
/// starts wherever consecutive values differ by more than `tolerance`.
pub fn group_eigenvalues(data: &SpectralData, tolerance: f64) -> Result<EigenspacePartition> {
    if tolerance <= 0.0 || tolerance.is_nan() {
        return Err(Error::NonPositiveTolerance(tolerance));
    }
    let ev = data.eigenvalues();
    let mut clusters = Vec::new();
    let mut current = vec![0usize];
    for k in 1..ev.len() {
        if ev[k] - ev[k - 1] > tolerance {
            clusters.push(std::mem::take(&mut current));
        }
        current.push(k);
    }
    clusters.push(current);
    Ok(EigenspacePartition {
        clusters,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{build_adjacency_generator, build_generator, AdjacencySpec};
    use crate::kernel::KernelProfile;

    fn spec(p: u32, l: u32) -> GroupSpec {
        GroupSpec::new(p, l).unwrap()
    }

    fn kernel_spectrum(p: u32, l: u32, alpha: f64) -> (SpectralData, SpectrumForecast) {
        let profile = KernelProfile::bessel(&spec(p, l), alpha).unwrap();
        let g = build_generator(&profile);
        (eigendecompose(&g).unwrap(), closed_form_spectrum(&profile))
    }

    #[test]
    fn two_state_spectrum() {
        let alpha = 2.0;
        let (s, forecast) = kernel_spectrum(2, 1, alpha);
        let expect = 2f64.powf(-alpha) - 1.0;
        assert!((s.eigenvalues()[0] - expect).abs() < 1e-14);
        assert!(s.eigenvalues()[1].abs() < 1e-14);
        assert_eq!(forecast.pairs(), &[(expect, 1), (0.0, 1)]);
    }

    #[test]
    fn zero_matrix_decomposition() {
        let s = spec(2, 2);
        let adj = AdjacencySpec::new(&s, vec![], vec![]).unwrap();
        let g = build_adjacency_generator(&adj);
        let data = eigendecompose(&g).unwrap();
        assert!(data.eigenvalues().iter().all(|&v| v == 0.0));
        let vtv = data.vectors().transpose() * data.vectors();
        assert!((vtv - DMatrix::identity(4, 4)).amax() < 1e-12);
        let part = group_eigenvalues(&data, 1e-8).unwrap();
        assert_eq!(part.len(), 1);
        let p0 = part.projector(&data, 0);
        assert!((p0 - DMatrix::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn spectrum_matches_forecast_across_grid() {
        for p in [2u32, 3] {
            for l in 1..=5u32 {
                if (p as u64).pow(l) > 256 {
                    continue;
                }
                for alpha in [0.5, 1.0, 1.2, 2.0, 4.0] {
                    let (s, forecast) = kernel_spectrum(p, l, alpha);
                    let expanded = forecast.expanded();
                    assert_eq!(expanded.len(), s.size());
                    for (got, want) in s.eigenvalues().iter().zip(&expanded) {
                        assert!(
                            (got - want).abs() < 1e-9,
                            "p={p} l={l} a={alpha}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn forecast_multiplicities() {
        let profile = KernelProfile::bessel(&spec(2, 5), 1.2).unwrap();
        let f = closed_form_spectrum(&profile);
        let mults: Vec<usize> = f.pairs().iter().map(|&(_, m)| m).collect();
        assert_eq!(mults, vec![16, 8, 4, 2, 1, 1]);
        assert_eq!(f.total_multiplicity(), 32);

        let p32 = KernelProfile::bessel(&spec(3, 2), 2.0).unwrap();
        let f32 = closed_form_spectrum(&p32);
        let expect = vec![
            (3f64.powi(-4) - 1.0, 6),
            (3f64.powi(-2) - 1.0, 2),
            (0.0, 1),
        ];
        for ((gv, gm), (wv, wm)) in f32.pairs().iter().zip(&expect) {
            assert!((gv - wv).abs() < 1e-14);
            assert_eq!(gm, wm);
        }
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let profile = KernelProfile::bessel(&spec(3, 3), 1.2).unwrap();
        let g = build_generator(&profile);
        let s = eigendecompose(&g).unwrap();
        let n = s.size();
        let vtv = s.vectors().transpose() * s.vectors();
        assert!((vtv - DMatrix::identity(n, n)).amax() < 1e-10);
        let rebuilt = s.apply(|x| x);
        assert!((rebuilt - g.entries()).amax() < 1e-9);
    }

    #[test]
    fn negative_semidefinite_with_single_zero_mode() {
        for (p, l, alpha) in [(2u32, 5u32, 1.2f64), (3, 3, 0.5), (5, 2, 4.0)] {
            let (s, _) = kernel_spectrum(p, l, alpha);
            let ev = s.eigenvalues();
            assert!(ev[ev.len() - 1] <= 1e-10);
            let zeros = ev.iter().filter(|&&v| v.abs() <= 1e-10).count();
            assert_eq!(zeros, 1, "p={p} l={l} a={alpha}");
        }
    }

    #[test]
    fn clustering_recovers_multiplicities() {
        let (s, forecast) = kernel_spectrum(2, 5, 1.2);
        let part = group_eigenvalues(&s, 1e-8).unwrap();
        assert_eq!(part.len(), forecast.distinct_count());
        let sizes: Vec<usize> = part.clusters().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![16, 8, 4, 2, 1, 1]);
        assert!(part.max_cluster_spread(&s) < 1e-10);

        let (s1, _) = kernel_spectrum(2, 1, 1.2);
        assert_eq!(group_eigenvalues(&s1, 1e-8).unwrap().len(), 2);
    }

    #[test]
    fn projectors_resolve_identity() {
        let (s, _) = kernel_spectrum(2, 4, 1.2);
        let part = group_eigenvalues(&s, 1e-8).unwrap();
        let n = s.size();
        let mut sum = DMatrix::zeros(n, n);
        for c in 0..part.len() {
            let pc = part.projector(&s, c);
            assert!((&pc * &pc - &pc).amax() < 1e-9, "idempotent");
            for d in 0..c {
                let pd = part.projector(&s, d);
                assert!((&pc * &pd).amax() < 1e-9, "orthogonal");
            }
            sum += pc;
        }
        assert!((sum - DMatrix::identity(n, n)).amax() < 1e-9);
    }

    #[test]
    fn non_positive_tolerance_rejected() {
        let (s, _) = kernel_spectrum(2, 2, 1.2);
        assert!(matches!(
            group_eigenvalues(&s, 0.0),
            Err(Error::NonPositiveTolerance(_))
        ));
    }

    #[test]
    fn oversized_tolerance_collapses_clusters() {
        let (s, forecast) = kernel_spectrum(2, 3, 1.2);
        let part = group_eigenvalues(&s, 10.0).unwrap();
        assert!(part.len() < forecast.distinct_count());
        assert!(part.max_cluster_spread(&s) > 10.0 * 1e-8);
    }
}
