//! Simulation and verification toolkit for the coupled cubic Schrödinger
//! system modeling the interaction of an optical beam with its third
//! harmonic:
//!
//! ```text
//! i u_t       + Lap u - u   + (|u|^2/9 + 2|w|^2) u + conj(u)^2 w / 3 = 0
//! i sigma w_t + Lap w - mu w + (9|w|^2 + 2|u|^2) w + u^3 / 9        = 0
//! ```
//!
//! on the periodic truncation of R^n (n = 1, 2, 3). The crate computes
//! variational ground states on the Nehari manifold, evolves the Cauchy
//! problem by Strang-split spectral stepping, evaluates global-existence and
//! blow-up criteria (including the sharp Gagliardo-Nirenberg constant and
//! the explicit pseudoconformal blow-up solution), and diagonalizes the 1d
//! linearized operators behind orbital stability.

pub mod criteria;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod nlsf;
pub mod params;
pub mod spectra;

pub use error::{Error, Result};
pub use grid::{Direction, Field, GridSpec};
pub use params::PhysParams;
