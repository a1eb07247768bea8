//! Radial jump kernels `J(|x|_p)` on the unit ball and their Fourier symbols.
//!
//! A profile stores the kernel value on each sphere `|x|_p = p^-m` for
//! `m = 0..l-1` together with the mass of the remaining ball `p^l Z_p`
//! (the "tail"). Total mass is always 1: the kernel is a jump density.
//!
//! Two families are built in. The one-parameter family
//! `J_alpha(x) = (1/Gamma(alpha)) (|x|_p^{alpha-1} - p^{alpha-1})`
//! with normalizer `Gamma(alpha) = (1 - p^{alpha-1}) / (1 - p^{-alpha})`,
//! and its `alpha = 1` limit `J_1(x) = (1 - 1/p) log_p(p / |x|_p)`.
//! Both have Fourier symbol `max(1, |xi|_p)^{-alpha}`. Arbitrary radial
//! kernels enter as tabulated profiles.

use crate::error::{Error, Result};
use crate::padic::GroupSpec;
use serde::{Deserialize, Serialize};

/// Tolerance for the unit-mass invariant of the built-in families.
pub const BESSEL_MASS_TOL: f64 = 1e-12;
/// Tolerance for the unit-mass check of user-supplied tabulated kernels.
pub const TABULATED_MASS_TOL: f64 = 1e-9;

/// Normalizer `(1 - p^{alpha-1}) / (1 - p^{-alpha})`.
///
/// Undefined at `alpha = 0` (pole of the denominator) and unusable at
/// `alpha = 1` (zero of the numerator, so `1/Gamma` blows up); both are
/// rejected within `1e-12`.
pub fn bessel_gamma(p: u32, alpha: f64) -> Result<f64> {
    if alpha.abs() < 1e-12 || (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::SingularAlpha(alpha));
    }
    let p = p as f64;
    Ok((1.0 - p.powf(alpha - 1.0)) / (1.0 - p.powf(-alpha)))
}

/// Closed-form Fourier symbol of the `alpha` family at `|xi|_p = p^j`:
/// `1` on the unit ball (`j = 0`), `p^{-j alpha}` outside.
pub fn bessel_symbol(p: u32, alpha: f64, j: u32) -> f64 {
    if j == 0 {
        1.0
    } else {
        (p as f64).powf(-(j as f64) * alpha)
    }
}

/// Which analytic family (if any) a profile came from; fixes how the
/// Fourier symbol extends beyond the tabulated depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolKind {
    /// `alpha != 1` family; symbol `p^{-j alpha}` at every depth.
    Bessel { alpha: f64 },
    /// `alpha = 1` logarithmic kernel; symbol `p^-j` at every depth.
    LogBessel,
    /// Tabulated values with the tail mass spread uniformly over `p^l Z_p`;
    /// the symbol is exact for `j <= l` and undefined beyond.
    Tabulated,
}

/// A radial kernel discretized at depth `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    spec: GroupSpec,
    /// `J(p^-m)` for `m = 0..l-1`.
    values: Vec<f64>,
    /// Mass of the central ball `p^l Z_p`.
    tail_mass: f64,
    kind: SymbolKind,
}

impl KernelProfile {
    /// Kernel of the `alpha` family. `alpha = 1` routes to the logarithmic
    /// kernel; other singular parameters are rejected.
    pub fn bessel(spec: &GroupSpec, alpha: f64) -> Result<Self> {
        if alpha <= 0.0 {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        if alpha == 1.0 {
            return Self::log_bessel(spec);
        }
        let p = spec.prime() as f64;
        let inv_gamma = 1.0 / bessel_gamma(spec.prime(), alpha)?;
        let values: Vec<f64> = (0..spec.level())
            .map(|m| inv_gamma * (p.powf(-(m as f64) * (alpha - 1.0)) - p.powf(alpha - 1.0)))
            .collect();
        Self::assemble(spec, values, SymbolKind::Bessel { alpha })
    }

    /// The `alpha = 1` kernel `J_1(p^-m) = (1 - 1/p)(m + 1)`.
    pub fn log_bessel(spec: &GroupSpec) -> Result<Self> {
        let p = spec.prime() as f64;
        let values: Vec<f64> = (0..spec.level())
            .map(|m| (1.0 - 1.0 / p) * (m as f64 + 1.0))
            .collect();
        Self::assemble(spec, values, SymbolKind::LogBessel)
    }

    fn assemble(spec: &GroupSpec, values: Vec<f64>, kind: SymbolKind) -> Result<Self> {
        // Tail by mass complement: subtracting every sphere's mass from 1
        // leaves exactly the mass of the central ball.
        let tail_mass = 1.0 - sphere_mass_sum(spec, &values);
        if tail_mass < -BESSEL_MASS_TOL {
            return Err(Error::NegativeKernel(tail_mass));
        }
        for &v in &values {
            if v < 0.0 {
                return Err(Error::NegativeKernel(v));
            }
        }
        Ok(Self {
            spec: *spec,
            values,
            tail_mass: tail_mass.max(0.0),
            kind,
        })
    }

    /// Wraps user-supplied sphere values and tail mass, enforcing
    /// nonnegativity and unit total mass within `1e-9`.
    pub fn tabulated(spec: &GroupSpec, values: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if values.len() != spec.level() as usize {
            return Err(Error::LevelCountMismatch {
                got: values.len(),
                expected: spec.level() as usize,
            });
        }
        for &v in &values {
            if v < 0.0 || v.is_nan() {
                return Err(Error::NegativeKernel(v));
            }
        }
        if tail_mass < 0.0 || tail_mass.is_nan() {
            return Err(Error::NegativeKernel(tail_mass));
        }
        let mass = sphere_mass_sum(spec, &values) + tail_mass;
        if (mass - 1.0).abs() > TABULATED_MASS_TOL {
            return Err(Error::MassViolation {
                mass,
                tol: TABULATED_MASS_TOL,
            });
        }
        Ok(Self {
            spec: *spec,
            values,
            tail_mass,
            kind: SymbolKind::Tabulated,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    /// `J(p^-m)` for `m < l`.
    pub fn level_value(&self, m: u32) -> f64 {
        self.values[m as usize]
    }

    pub fn level_values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Sphere masses plus tail; equals 1 for every accepted profile.
    pub fn total_mass(&self) -> f64 {
        sphere_mass_sum(&self.spec, &self.values) + self.tail_mass
    }

    /// Fourier symbol at `|xi|_p = p^j`.
    ///
    /// Analytic families evaluate in closed form at any depth; tabulated
    /// kernels are exact for `j <= l` (the symbol at those frequencies sees
    /// the tail only through its total mass) and rejected beyond.
    pub fn symbol(&self, j: u32) -> Result<f64> {
        match self.kind {
            SymbolKind::Bessel { alpha } => Ok(bessel_symbol(self.spec.prime(), alpha, j)),
            SymbolKind::LogBessel => Ok(bessel_symbol(self.spec.prime(), 1.0, j)),
            SymbolKind::Tabulated => symbol_from_profile(self, j),
        }
    }
}

fn sphere_mass_sum(spec: &GroupSpec, values: &[f64]) -> f64 {
    let p = spec.prime() as f64;
    let mut total = 0.0;
    for (m, &v) in values.iter().enumerate() {
        total += p.powi(-(m as i32)) * (1.0 - 1.0 / p) * v;
    }
    total
}

/// Fourier symbol at `|xi|_p = p^j` straight from the stored profile:
/// a finite difference of sphere sums plus the tail mass,
///
/// `J^(p^j) = sum_{m=j}^{l-1} p^-m J(p^-m)
///          - sum_{m=max(j-1,0)}^{l-1} p^{-m-1} J(p^-m) + tail`.
///
/// Exact for every kernel whose tail is radial, for `j <= l`; at those
/// frequencies the ball `p^l Z_p` contributes only its total mass.
pub fn symbol_from_profile(profile: &KernelProfile, j: u32) -> Result<f64> {
    let spec = profile.spec();
    let l = spec.level();
    if j > l {
        return Err(Error::SymbolOutOfRange { j, level: l });
    }
    let p = spec.prime() as f64;
    let mut acc = profile.tail_mass();
    for m in j..l {
        acc += p.powi(-(m as i32)) * profile.level_value(m);
    }
    for m in j.saturating_sub(1)..l {
        acc -= p.powi(-(m as i32 + 1)) * profile.level_value(m);
    }
    Ok(acc)
}

/// On-disk form of a tabulated kernel: `{p, l, values[], tail_mass}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelFile {
    pub p: u32,
    pub l: u32,
    pub values: Vec<f64>,
    pub tail_mass: f64,
}

impl KernelFile {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::KernelFile(e.to_string()))
    }

    pub fn build(&self) -> Result<(GroupSpec, KernelProfile)> {
        let spec = GroupSpec::new(self.p, self.l)?;
        let profile = KernelProfile::tabulated(&spec, self.values.clone(), self.tail_mass)?;
        Ok((spec, profile))
    }
}
