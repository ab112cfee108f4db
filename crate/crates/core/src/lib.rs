//! Generalized Glauber dynamics of the ±J Ising model with k-spin flip sets
//! on periodic graphs.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: periodic graphs given by a unit cell, finite windows, the
//!   flip-set family and the k-stability check.
//! * [`model`]: Hamiltonian increments, window energies, flip rates,
//!   temperature profiles and sampling of couplings and spins.
//! * [`dynamics`]: the continuous-time simulator built on rate-1 Poisson
//!   clocks per flip set with uniform acceptance marks.
//! * [`analysis`]: fixation estimates, opposition-flip tails,
//!   classification and window-size scaling.
//! * [`absence`]: exhaustive k-absence certification on finite regions.
//! * [`presets`]: named graphs and the bundled Example M data.

pub mod absence;
pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod model;
pub mod presets;
pub mod rng;

pub use error::{Error, Result};
