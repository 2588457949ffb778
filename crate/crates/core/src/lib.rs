//! Two-boundary dense loop model on the annulus.
//!
//! The crate covers the whole chain from the lattice to the continuum:
//!
//! - [`diagram`]: the two-boundary Temperley-Lieb algebra as decorated planar
//!   diagrams, with composition and loop-weight bookkeeping.
//! - [`reps`]: standard modules `V_0` and `V_2j^{ab}`, generator actions and
//!   sparse sector transfer matrices / Hamiltonians.
//! - [`trace`]: direct and sector-decomposed (modified) Markov traces, lattice
//!   partition functions and an exhaustive face-configuration oracle.
//! - [`qseries`]: formal q-series with exact rational exponents.
//! - [`continuum`]: characters, the seven-parameter annulus partition function,
//!   minimal-model characters and the Potts mapping.
//! - [`percolation`]: refined crossing probabilities for critical percolation.
//! - [`spectra`]: finite-size scaling and the XXZ spin-chain representation.
//! - [`params`]: loop weights, Coulomb-gas parameters and Kac weights.

pub mod continuum;
pub mod diagram;
pub mod error;
pub mod par;
pub mod params;
pub mod percolation;
pub mod qseries;
pub mod reps;
pub mod sparse;
pub mod spectra;
pub mod trace;

pub use error::{Error, Result};
pub use params::{CgParams, LoopWeights};
pub use qseries::{QSeries, Rat};
