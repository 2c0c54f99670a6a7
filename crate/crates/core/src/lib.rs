//! Near-field beam focusing and tracking for base stations equipped with a
//! dynamic metasurface antenna (DMA).
//!
//! The crate is organised bottom-up: [`geometry`] fixes the array layout,
//! [`frontend`] builds Lorentzian-constrained hybrid beamformers, [`channel`]
//! synthesises channels and noisy observations, [`analytics`] holds the
//! closed-form correlation and focus-window solvers, [`grid`] builds the
//! non-uniform polar search grids, [`tracking`] runs the scheduled tracker,
//! and [`sim`] drives trajectories, campaigns and reports.

pub mod analytics;
pub mod channel;
pub mod error;
pub mod fresnel;
pub mod frontend;
pub mod geometry;
pub mod grid;
pub mod quadrature;
pub mod sim;
pub mod tracking;

pub use error::{Error, Result};
