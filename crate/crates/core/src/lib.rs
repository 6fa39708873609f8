//! Few-photon transport through a two-site Bose-Hubbard dimer coupled to an
//! input and an output waveguide.
//!
//! The crate evaluates the analytic single- and two-photon scattering
//! matrices of the dimer and turns them into observables for finite
//! wavepackets: scattering probabilities, zero-delay intensity correlations
//! of the transmitted light for Fock-state and weak coherent inputs, and
//! resonance diagnostics of the bound (interaction-induced) part of the
//! S-matrix. A truncated-Fock Lindblad solver for the coherently driven
//! dimer provides an independent cross-check.
//!
//! Energies are measured in units of the hopping rate from the bare cavity
//! frequency; group velocity and hbar are 1.

pub mod error;
pub mod lindblad;
pub mod model;
pub mod observables;
pub mod quadrature;
pub mod single_photon;
pub mod two_photon;
pub mod wavepackets;

pub use error::{DimerError, Result};
pub use model::{DimerParams, EigenSystem2Site, RawParams};
pub use num_complex::Complex64;
pub use two_photon::Channel;
