//! Synthesis and verification of time-independent hopping Hamiltonians that
//! spread a single localized excitation into a W state at a prescribed time.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: Jacobi-matrix reconstruction from eigenvalues and spectral
//!   weights, plus the symmetric, resonant and antisymmetric chain families.
//! - [`dynamics`]: exact unitary propagation, Lindblad evolution with loss and
//!   dephasing, and closed-form three-qubit results.
//! - [`lattice`]: arbitrary-connectivity graphs, Kronecker-sum grids, loop
//!   phases and gauge fixing, layer reduction of distance-regular graphs.
//! - [`designer`]: the inverse problem end to end (scan, refine, select).
//! - [`metrics`]: fidelities, delocalization, entanglement witnesses,
//!   robustness Monte-Carlo and circuit-depth bounds.
//! - [`io`] and [`cli`]: JSON/CSV file formats and the command-line surface.
//!
//! Internally everything is in natural units with hbar = 1: angular
//! frequencies in rad/ns and times in ns. Files carry linear frequencies in
//! MHz (see [`units`]).

pub mod cli;
pub mod designer;
pub(crate) mod dual;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod metrics;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
pub use spectral::{Family, FamilyParams, SpectralWeights, Spectrum, TridiagonalHamiltonian};
