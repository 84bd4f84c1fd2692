//! Spectral solver for the radial Schrödinger equation with the repulsive
//! Coulomb plus oscillator potential `V(r) = a/r + b²r²` in `d` dimensions,
//! optionally inside an impenetrable sphere of radius `R`.

pub mod aim;
pub mod bounds;
pub mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod quasiexact;
pub mod tables;

pub use error::{Error, Result};
