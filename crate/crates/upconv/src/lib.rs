//! Desk-scale numerics for strong three-wave mixing of single photons.
//!
//! A strong quadratic nonlinearity can convert a signal/idler photon pair
//! into one pump photon and back. Away from special operating points the
//! interaction does not commute with itself at different times, so the
//! time-ordered expansion of the evolution differs from the naive
//! exponential; the difference shows up as spectral entanglement in the
//! second-order term and caps how faithfully a bulk medium converts. This
//! crate computes those effects exactly within the Gaussian-envelope model:
//!
//! * [`spectral`] — dispersion profiles, Gaussian photons, the linearized
//!   phase mismatch and its Gaussian envelope;
//! * [`kernel`] — the reduced two-time kernel of the second-order term
//!   (every frequency integral closed, both time integrals exposed);
//! * [`series`] — ordered/unordered second-order amplitudes and their
//!   fidelity;
//! * [`conversion`] — conversion probability, its optimum, and sensitivity
//!   to condition errors;
//! * [`poling`] — the periodically segmented medium and the fidelity as a
//!   function of segment count;
//! * [`bell`] — the polarization-level up-conversion Bell analyzer and the
//!   teleportation CNOT built on it;
//! * [`quad`] — the independent quadrature machinery every closed form is
//!   validated against;
//! * [`config`], [`report`], [`validate`] — the CLI surface.
//!
//! The `upconv` binary exposes the headline numbers as subcommands
//! (`f2-baseline`, `podd-surface`, `f2-vs-n`, `gate`, `validate`).

pub mod bell;
pub mod config;
pub mod conversion;
pub mod error;
pub mod kernel;
pub mod poling;
pub mod quad;
pub mod report;
pub mod series;
pub mod spectral;
pub mod validate;

pub use error::{Error, Result};
