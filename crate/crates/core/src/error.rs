use num_complex::Complex64;
use thiserror::Error;

/// Failures surfaced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e} after {intervals} subintervals")]
    Quadrature {
        estimate: f64,
        tolerance: f64,
        intervals: usize,
    },

    #[error("Liouville-Green singularity: {0}")]
    Singularity(String),

    #[error("branch discontinuity on segment {segment}: {detail}")]
    Branch {
        segment: &'static str,
        detail: String,
    },

    #[error("step size collapsed to {step:.3e} at x = {at} (stiff or singular right-hand side)")]
    StepCollapse { at: f64, step: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("pole: {0}")]
    Pole(String),

    #[error("inconsistent bracket [{lo}, {hi}]: discriminant has no sign change")]
    InconsistentBracket { lo: f64, hi: f64 },

    #[error("grid refinement exhausted near [{lo}, {hi}] after {depth} subdivisions")]
    RefinementExhausted { lo: f64, hi: f64, depth: usize },

    #[error("contour passes within relative distance {relative:.3e} of a zero at {at}")]
    ContourNearZero { at: Complex64, relative: f64 },

    #[error("winding number {winding} is not close to an integer")]
    NonIntegerWinding { winding: f64 },

    #[error("pairing error: eigenvalues {first} and {second} are both nearest to semiclassical level {n}")]
    Pairing { first: f64, second: f64, n: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
