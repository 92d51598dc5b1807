//! Numerics for the fractional g-Laplacian on the line.
//!
//! The crate evaluates the nonlocal operator
//!
//! ```text
//! (-Delta_g)^s u(x) = P.V. \int g((u(x) - u(y)) / |x-y|^s) dy / |x-y|^{n+s}
//! ```
//!
//! for Young functions G with g = G', together with the companion machinery
//! needed to work with it: Young-function inequality checks, Orlicz modulars
//! and Luxemburg norms, the g-fractional gradient, infimal convolutions, and
//! executable weak-form / viscosity-point checkers backed by a small monotone
//! Dirichlet solver.
//!
//! Everything is deterministic and pure: values are immutable after
//! construction and all operations may be called concurrently.

pub mod error;
pub mod frac;
pub mod infconv;
pub mod inequalities;
pub mod orlicz;
pub mod quad;
pub mod report;
pub mod sampled;
pub mod scenario;
pub mod solutions;
pub mod solver;
pub mod young;

pub use error::{Error, Result};
pub use report::CheckReport;
pub use sampled::{SampledFunction, TailModel};
pub use young::{YoungFamily, YoungFunction};
