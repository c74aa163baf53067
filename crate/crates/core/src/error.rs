use thiserror::Error;

use crate::branchmath::C64;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spectral parameter z = 0 is not allowed")]
    ZeroSpectralParameter,
    #[error("quadrature did not converge ({0})")]
    QuadratureNonConvergence(String),
    #[error("integral diverges ({0})")]
    Divergent(String),
    #[error("tail bound {tail:e} at x = {x} exceeds the requested tolerance")]
    TailTooLarge { x: f64, tail: f64 },
    #[error("series did not converge after {terms} terms (partial value {partial}, term bound {term_bound:e})")]
    SeriesNonConvergence { terms: usize, partial: C64, term_bound: f64 },
    #[error("integrator rejected step size {0}")]
    StepRejected(f64),
    #[error("phase continuation failed near z = {0}; the contour passes too close to a zero")]
    PhaseStepFailure(C64),
    #[error("contour too close to a zero: normalized |f| = {modulus:e} at z = {z}")]
    MinModulus { z: C64, modulus: f64 },
    #[error("winding number {0} is not close to an integer")]
    NonIntegerWinding(f64),
    #[error("argument of the fixed-point ratio is undefined (cut collision at w = {0})")]
    CutCollision(C64),
    #[error("fixed-point iteration for j = {j} did not converge in {iterations} steps (contraction estimate {contraction:e})")]
    FixedPointNonConvergence { j: u64, iterations: usize, contraction: f64 },
    #[error("fixed point for j = {j} left its sector: w = {w}")]
    SectorViolation { j: u64, w: C64 },
    #[error("weight condition fails: {0}")]
    WeightCondition(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
