//! Gerstner-type waves over a uniform current, with and without the
//! Coriolis term of the equatorial f-plane.
//!
//! * [`params`]: parameter sets and their consistency relations
//! * [`kinematics`]: the Lagrangian flow map, its derivatives and inverse
//! * [`fields`]: pressure, vorticity and residual checks of the Euler system
//! * [`analysis`]: drift, stagnation and classification of particle paths
//! * [`figures`]: the two published particle-path figure sets as SVG
//! * [`cli`]: the `gerstner` command-line front end

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod fields;
pub mod figures;
pub mod kinematics;
pub mod numfmt;
pub mod params;

pub use error::{Error, Result};
pub use kinematics::{KinematicState, ParticleLabel};
pub use params::{PhysicalConstants, Regime, WaveParameters};
