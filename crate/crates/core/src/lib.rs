//! Numerics for delayed bifurcation in slowly quenched Allen–Cahn fronts.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Airy and Bessel functions and the first Airy zero.
//! - [`solvercore`]: meshes, banded LU, damped Newton, continuation, an
//!   adaptive ODE integrator with events and a Sturm eigensolver.
//! - [`travelingwave`]: the front boundary-value problem and its diagnostics.
//! - [`painleve`]: the Hastings–McLeod solution and its certificates.
//! - [`folddelay`]: the slow passage through the fold on the invariant plane.
//! - [`stability`]: point spectrum of the linearisation about a front.
//! - [`pdesim`]: time stepping of the parabolic equation and front tracking.
//!
//! Errors from every module share the [`Error`] type.

pub mod error;
pub mod folddelay;
pub mod painleve;
pub mod pdesim;
pub mod solvercore;
pub mod specfun;
pub mod stability;
pub mod travelingwave;

pub use error::{Error, Result};
pub use folddelay::{DelayFit, FoldDelayRecord};
pub use painleve::{HmSolution, TailClass};
pub use pdesim::{FrontTrack, SimConfig};
pub use solvercore::continuation::ContinuationBranch;
pub use solvercore::mesh::Mesh;
pub use solvercore::newton::NewtonReport;
pub use specfun::{AiryPair, Omega0};
pub use stability::Spectrum;
pub use travelingwave::{FrontSolution, QuenchParams, Ramp};
