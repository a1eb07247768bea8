//! Classical and quantum propagation from a spectral decomposition, plus
//! two independent evaluation routes used as cross-checks: the sphere
//! character-sum amplitudes and the radial heat kernel.
//!
//! Conventions. For a generator `G` with decomposition `G = V diag(w) V^T`:
//! the classical transition matrix is `exp(tG) = V diag(e^{tw}) V^T`; the
//! quantum walk uses the unitary `V diag(e^{itw}) V^T` and squares entry
//! moduli. Since `G` is real symmetric both matrices are symmetric, the
//! classical one is stochastic, and the quantum one is unistochastic.

use crate::error::{Error, Result};
use crate::kernel::KernelProfile;
use crate::padic::{GroupSpec, PadicValuation, StateIndex};
use crate::spectral::SpectralData;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Classical (stochastic) or quantum (unistochastic) snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    Classical,
    Quantum,
}

/// Which evaluation route produced a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Spectral,
    Oscillatory,
    HeatKernel,
}

/// Transition-probability matrix at a fixed time.
#[derive(Debug, Clone)]
pub struct WalkSnapshot {
    pub spec: GroupSpec,
    pub t: f64,
    pub kind: WalkKind,
    pub provenance: Provenance,
    pub matrix: DMatrix<f64>,
}

/// `exp(tG)` through the eigenbasis. Rows sum to one; entries drift toward
/// the uniform value `p^-l` at the spectral-gap rate.
pub fn classical_transition(data: &SpectralData, t: f64) -> Result<WalkSnapshot> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let matrix = data.apply(|w| (t * w).exp());
    Ok(WalkSnapshot {
        spec: *data.spec(),
        t,
        kind: WalkKind::Classical,
        provenance: Provenance::Spectral,
        matrix,
    })
}

/// The unitary `V diag(e^{itw}) V^T`.
pub fn quantum_amplitudes(data: &SpectralData, t: f64) -> Result<DMatrix<Complex64>> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let n = data.size();
    let v = data.vectors();
    let mut scaled = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let phase = Complex64::from_polar(1.0, t * data.eigenvalues()[j]);
        for i in 0..n {
            scaled[(i, j)] = phase * v[(i, j)];
        }
    }
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += scaled[(i, j)] * v[(k, j)];
            }
            out[(i, k)] = acc;
        }
    }
    Ok(out)
}

/// Entry moduli squared of the unitary evolution; doubly stochastic.
pub fn quantum_transition(data: &SpectralData, t: f64) -> Result<WalkSnapshot> {
    let amps = quantum_amplitudes(data, t)?;
    Ok(WalkSnapshot {
        spec: *data.spec(),
        t,
        kind: WalkKind::Quantum,
        provenance: Provenance::Spectral,
        matrix: amps.map(|a| a.norm_sqr()),
    })
}

/// Character sum over the frequency sphere `|xi|_p = p^j` evaluated at a
/// difference of valuation `v`:
///
/// * `p^j - p^{j-1}` when `v >= j` (the character is trivial there),
/// * `-p^{j-1}`      when `v = j - 1`,
/// * `0`             otherwise.
pub fn sphere_character_sum(p: u32, j: u32, valuation: PadicValuation) -> f64 {
    debug_assert!(j >= 1);
    let pj = (p as f64).powi(j as i32);
    match valuation {
        PadicValuation::ZeroClass => pj - pj / p as f64,
        PadicValuation::Finite(v) => {
            if v >= j {
                pj - pj / p as f64
            } else if v + 1 == j {
                -pj / p as f64
            } else {
                0.0
            }
        }
    }
}

/// Transition amplitude by the oscillatory-integral route:
///
/// `alpha_{r,v}(t) = p^-l [ 1 + sum_{j=1}^{l} e^{-it (J^(p^j) - 1)} S_j(r - v) ]`,
///
/// where `S_j` is [`sphere_character_sum`]. The frequency ball `|xi|_p <= 1`
/// contributes the constant term: its phase cancels against the `e^{it}`
/// prefactor because the symbol is 1 there. Squared moduli agree with
/// [`quantum_transition`]; the overall phase is immaterial.
pub fn amplitude_oscillatory(
    profile: &KernelProfile,
    r: StateIndex,
    v: StateIndex,
    t: f64,
) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let spec = profile.spec();
    let p = spec.prime();
    let l = spec.level();
    let valuation = spec.valuation_of_difference(r, v);
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 1..=l {
        let eigenvalue = profile.symbol(j)? - 1.0;
        let weight = sphere_character_sum(p, j, valuation);
        if weight != 0.0 {
            acc += Complex64::from_polar(weight.abs(), -t * eigenvalue) * weight.signum();
        }
    }
    Ok(acc * (p as f64).powi(-(l as i32)))
}

/// Full quantum snapshot by the oscillatory route. Entries depend only on
/// the valuation of the state difference, so one amplitude per class is
/// evaluated and broadcast.
pub fn oscillatory_snapshot(profile: &KernelProfile, t: f64) -> Result<WalkSnapshot> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let spec = profile.spec();
    let n = spec.size();
    let zero = spec.state(0)?;
    let mut by_class = vec![0.0f64; spec.level() as usize + 1];
    for m in 0..spec.level() {
        let witness = spec.state((spec.prime() as u64).pow(m))?;
        by_class[m as usize] = amplitude_oscillatory(profile, witness, zero, t)?.norm_sqr();
    }
    by_class[spec.level() as usize] = amplitude_oscillatory(profile, zero, zero, t)?.norm_sqr();

    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let class = match spec.valuation_of((n as u64 + i as u64 - k as u64) % n as u64) {
                PadicValuation::Finite(m) => m as usize,
                PadicValuation::ZeroClass => spec.level() as usize,
            };
            matrix[(i, k)] = by_class[class];
        }
    }
    Ok(WalkSnapshot {
        spec: *spec,
        t,
        kind: WalkKind::Quantum,
        provenance: Provenance::Oscillatory,
        matrix,
    })
}

/// Radial heat-kernel value at `|x|_p = p^-m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatKernelValue {
    pub m: u32,
    pub t: f64,
    pub value: f64,
}

/// Heat kernel on the sphere `|x|_p = p^-m`:
///
/// `Z(p^-m, t) = 1 + sum_{j=1}^{m} (p^j - p^{j-1}) e^{-t(1 - J^(p^j))}
///             - p^m e^{-t(1 - J^(p^{m+1}))}`.
///
/// Evaluated in the regrouped form `(1 - e^-t) + sum (...)(a_j - e^-t)
/// - p^m (a_{m+1} - e^-t)`, which keeps the large geometric weights paired
/// with differences that decay in `j` instead of cancelling at the end.
/// Vanishes at `t = 0`. Depths `m >= l` need the analytic symbol, so
/// tabulated kernels are limited to `m <= l - 1`.
pub fn heat_kernel_value(profile: &KernelProfile, m: u32, t: f64) -> Result<HeatKernelValue> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let p = profile.spec().prime() as f64;
    let decay = (-t).exp();
    let shifted = |j: u32| -> Result<f64> {
        // e^{-t(1 - J^(p^j))} - e^{-t}
        Ok((-t * (1.0 - profile.symbol(j)?)).exp() - decay)
    };
    let mut value = -(-t).exp_m1();
    for j in 1..=m {
        value += (p.powi(j as i32) - p.powi(j as i32 - 1)) * shifted(j)?;
    }
    value -= p.powi(m as i32) * shifted(m + 1)?;
    Ok(HeatKernelValue { m, t, value })
}

/// Mass of the ball `p^-L`-around-zero under the heat kernel:
/// `p^-L (1 + sum_{j=1}^{L} (p^j - p^{j-1}) e^{-t(1 - J^(p^j))})`.
pub fn heat_ball_mass(profile: &KernelProfile, depth: u32, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let p = profile.spec().prime() as f64;
    let mut acc = 1.0;
    for j in 1..=depth {
        acc += (p.powi(j as i32) - p.powi(j as i32 - 1))
            * (-t * (1.0 - profile.symbol(j)?)).exp();
    }
    Ok(p.powi(-(depth as i32)) * acc)
}

/// Total heat-kernel mass of the unit ball, truncated at sphere depth
/// `m_max`, with the remaining central ball restored analytically. Equals
/// 1 up to roundoff for every `t >= 0`.
pub fn truncated_heat_mass(profile: &KernelProfile, t: f64, m_max: u32) -> Result<f64> {
    let p = profile.spec().prime() as f64;
    let mut mass = 0.0;
    for m in 0..=m_max {
        let z = heat_kernel_value(profile, m, t)?.value;
        mass += p.powi(-(m as i32)) * (1.0 - 1.0 / p) * z;
    }
    Ok(mass + heat_ball_mass(profile, m_max + 1, t)?)
}

/// Classical snapshot by the heat-kernel route: off-diagonal entries are
/// `p^-l Z(|v - r|_p, t)`, the diagonal is the row's mass complement.
pub fn classical_transition_via_heat(profile: &KernelProfile, t: f64) -> Result<WalkSnapshot> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let spec = profile.spec();
    let n = spec.size();
    let p = spec.prime() as f64;
    let scale = p.powi(-(spec.level() as i32));

    let class_prob: Vec<f64> = (0..spec.level())
        .map(|m| Ok(scale * heat_kernel_value(profile, m, t)?.value))
        .collect::<Result<_>>()?;
    let mut diagonal = 1.0;
    for m in 0..spec.level() {
        diagonal -= spec.sphere_count(m) as f64 * class_prob[m as usize];
    }

    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            matrix[(i, k)] = match spec.valuation_of((n as u64 + i as u64 - k as u64) % n as u64)
            {
                PadicValuation::Finite(m) => class_prob[m as usize],
                PadicValuation::ZeroClass => diagonal,
            };
        }
    }
    Ok(WalkSnapshot {
        spec: *spec,
        t,
        kind: WalkKind::Classical,
        provenance: Provenance::HeatKernel,
        matrix,
    })
}

/// Max-entry deviation of `U(t) U(t)*` from the identity.
pub fn unitarity_defect(data: &SpectralData, t: f64) -> Result<f64> {
    let u = quantum_amplitudes(data, t)?;
    let n = u.nrows();
    let gram = &u * u.adjoint();
    let mut worst = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            let expect = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, k)] - Complex64::new(expect, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Row-sum, column-sum, and range checks for a snapshot.
#[derive(Debug, Clone, Copy)]
pub struct StochasticityReport {
    pub max_row_deviation: f64,
    pub max_col_deviation: f64,
    pub min_entry: f64,
    pub max_entry: f64,
}

pub fn stochasticity(snapshot: &WalkSnapshot) -> StochasticityReport {
    let m = &snapshot.matrix;
    let n = m.nrows();
    let mut max_row = 0.0f64;
    let mut max_col = 0.0f64;
    for i in 0..n {
        max_row = max_row.max((m.row(i).sum() - 1.0).abs());
        max_col = max_col.max((m.column(i).sum() - 1.0).abs());
    }
    StochasticityReport {
        max_row_deviation: max_row,
        max_col_deviation: max_col,
        min_entry: m.min(),
        max_entry: m.max(),
    }
}
