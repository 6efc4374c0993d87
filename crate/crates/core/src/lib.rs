//! Linearized Gaussian dynamics of two coupled whispering-gallery-mode
//! resonators, one optomechanical and one pumped through a χ⁽²⁾
//! nonlinearity. Everything is expressed in the squeezing picture of the
//! pumped resonator: the pump is absorbed into modified detunings,
//! couplings and bath correlations, and the quadrature fluctuations form
//! a three-mode Gaussian state evolving under a constant drift matrix.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion
//! CLI crate.
//!
//! * [`model`] — physical inputs, squeezing-picture parameters, drift and
//!   diffusion matrices.
//! * [`dynamics`] — covariance evolution, direct steady state, stability.
//! * [`measures`] — two-mode reductions, logarithmic negativity, Gaussian
//!   EPR steering, region classification.
//! * [`oracle`] — independent closed-form and brute-force cross-checks.
//! * [`sweep`] — parameter scans, figure recipes, extremum search.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dynamics;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod sweep;

pub use dynamics::{steady_state, stability_check, CovarianceMatrix};
pub use measures::{classify_region, nonlocality_report, Mode, NonlocalityReport, Region};
pub use model::{build_diffusion, build_drift, derive_params, DerivedParams, PhysicalParams};
