//! Closed-form magnon dynamics, entanglement and transfer fidelity on the
//! ferromagnetic XY spin chain, with an exact finite-ring evolution to check
//! them against.
//!
//! Amplitudes live in [`magnon`], two-site concurrences in [`entanglement`],
//! fidelities and Bloch averages in [`fidelity`]. [`oracle`] evolves small
//! rings exactly and [`validation`] compares the two.

pub mod bessel;
pub mod entanglement;
pub mod error;
pub mod fidelity;
pub mod jacobi;
pub mod magnon;
pub mod oracle;
pub mod quadrature;
pub mod validation;

pub use error::{Error, Result};
