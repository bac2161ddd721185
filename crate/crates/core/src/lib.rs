//! Cavity-induced friction, momentum diffusion and steady-state temperature
//! for a transversally pumped two-level atom moving along the axis of a
//! (possibly degenerate multimode) standing-wave cavity.
//!
//! Everything is expressed in natural units with `ħ = 1`, `k = 1` and the
//! dipole decay rate `γ` as the unit of frequency:
//!
//! | quantity        | unit        |
//! |-----------------|-------------|
//! | rates, detunings| `γ`         |
//! | length          | `1/k`       |
//! | momentum        | `ħk`        |
//! | energy, `k_B T` | `ħγ`        |
//! | friction `β`    | `ħk²`       |
//! | diffusion `D`   | `(ħk)²γ`    |
//!
//! The atomic mass only enters through the recoil frequency
//! `ω_rec = ħk²/2m`, so `m = 1/(2 ω_rec)` in these units.
//!
//! Module map:
//! - [`params`]: parameter record, validation and key/value configuration
//! - [`modes`]: degenerate Hermite-Gaussian mode family and coupling sums
//! - [`linres`]: closed-form linear-response coefficients
//! - [`thermo`]: wavelength averages, temperature and parameter scans
//! - [`oracle`]: truncated-Fock Liouvillian used to verify the closed forms
//! - [`cmsim`]: stochastic centre-of-mass trajectories
//! - [`verify`]: oracle-vs-closed-form check table

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmsim;
pub mod csv;
mod error;
pub mod linres;
pub mod modes;
pub mod oracle;
pub mod par;
pub mod params;
pub mod thermo;
pub mod verify;

pub use error::{Error, Result};
pub use modes::{CouplingSums, ModeSet};
pub use params::SystemParams;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
