//! Numerical spectral theory of the imaginary cubic oscillator
//! `H = p^2 + i x^3` on the real line.
//!
//! Eigenvalues are the zeros of the Wronskian of the two solutions that
//! decay at `x -> ±∞`. Both are obtained by rotating the equation onto
//! `f'' = (z^3 + mu) f` and shooting inward along the positive real axis
//! from asymptotic initial data (see [`shoot`]). On top of that sit the
//! semiclassical predictions ([`wkb`]), Liouville–Green error envelopes
//! ([`lg`]), the eigenvalue search and half-plane checks ([`spectral`]),
//! and a named suite of numerical checks ([`verify`]).

pub mod config;
pub mod error;
pub mod lg;
pub mod ode;
pub mod par;
pub mod quad;
pub mod scaled;
pub mod shoot;
pub mod spectral;
pub mod verify;
pub mod wkb;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use lg::{ErrorEnvelope, LgParams};
pub use par::Execution;
pub use scaled::ScaledComplex;
pub use shoot::{BoundaryData, Side};
pub use spectral::{DiscriminantSample, EigenvalueRecord, GridScan, Rect};
pub use wkb::{TurningPoints, WkbConstants, WkbPrediction};
