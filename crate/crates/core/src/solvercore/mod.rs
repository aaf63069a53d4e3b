//! Generic numerical kernels shared by the problem modules.

pub mod banded;
pub mod continuation;
pub mod eigen;
pub mod fit;
pub mod interp;
pub mod mesh;
pub mod newton;
pub mod ode;
pub mod quadrature;

pub use banded::{BandedLu, BandedMatrix, TridiagonalLu};
pub use continuation::{continue_branch, ContinuationBranch, ContinuationMode, ContinuationOptions, ParameterizedSystem};
pub use eigen::{eig_tridiag_symmetric, sturm_count};
pub use mesh::{GradedSpec, Mesh};
pub use newton::{solve_bvp, DiscreteSystem, NewtonOptions, NewtonReport};
pub use ode::{integrate_ode, Crossing, Event, EventHit, OdeOptions, Trajectory};
