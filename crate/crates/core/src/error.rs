use thiserror::Error;

use crate::params::Regime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("regime mismatch: {regime:?} parameters require {requirement} (omega = {omega})")]
    RegimeMismatch {
        regime: Regime,
        requirement: &'static str,
        omega: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// The quadratic for `m` has no real root: the current exceeds its upper bound.
    #[error("no wave solution for current U = {current}: bound is U <= {bound}")]
    NoSolution { current: f64, bound: f64 },

    #[error("{what} did not converge after {iterations} iterations (best iterate {best:?}, residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        best: (f64, f64),
        residual: f64,
    },

    #[error("point ({x}, {z}) is not below the free surface (eta = {eta})")]
    AboveSurface { x: f64, z: f64, eta: f64 },

    #[error("stencil needs clearance {required} below the surface, found {available}")]
    InsufficientClearance { required: f64, available: f64 },

    /// Vorticity diverges on the label line `b = 0`; `sign` is the sign of the infinity.
    #[error("vorticity is singular at b = 0 (signed infinity {sign})")]
    SingularVorticity { sign: f64 },

    #[error("{0} is undefined when m = 0")]
    UndefinedForStagnation(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
