//! Ultrametric rate matrices on the state tree `G_l = Z_p / p^l Z_p` and
//! the continuous-time walks they generate.
//!
//! The pipeline: a radial jump kernel ([`kernel::KernelProfile`]) yields a
//! symmetric rate matrix with zero row sums ([`generator`]), whose
//! eigendecomposition ([`spectral`]) drives both the classical semigroup
//! `exp(tG)` and the quantum unitary `exp(itG)` ([`dynamics`]). The
//! long-time average of the quantum walk ([`limiting`]) is what replaces
//! the classical stationary distribution, which is always uniform here.
//!
//! Independent evaluation routes (closed-form spectra, sphere character
//! sums, the radial heat kernel) exist alongside the numeric path and are
//! cross-checked in the test suite.

pub mod dynamics;
pub mod error;
pub mod generator;
pub mod kernel;
pub mod limiting;
pub mod padic;
pub mod spectral;

pub use error::{Error, Result};
pub use generator::{build_adjacency_generator, build_generator, validate_generator, GeneratorMatrix};
pub use kernel::KernelProfile;
pub use padic::{GroupSpec, PadicValuation, StateIndex};
pub use spectral::{closed_form_spectrum, eigendecompose, group_eigenvalues, SpectralData};
