//! Constructive tools for the vanishing-viscosity limit of 1-D strictly
//! hyperbolic systems
//!
//! ```text
//! u_t + A(u) u_x = ε u_xx
//! ```
//!
//! The crate is organised by subsystem:
//!
//! * [`model`]: system definitions, eigen-decompositions, built-in benchmarks.
//! * [`viscous`]: explicit method-of-lines solver, tangent (linearised) solver,
//!   heat-kernel references and derivative decay diagnostics.
//! * [`waves`]: travelling-wave profiles, center-manifold vectors, the
//!   cutoff, the gradient decomposition and its source residuals.
//! * [`functionals`]: total variation, interaction potential, area and length
//!   functionals and decay monitors.
//! * [`riemann`]: convex envelopes, the fixed-point wave curves and the
//!   composite wave fan of a Riemann problem.
//! * [`lab`]: reproducible experiments, the acceptance checks and the CLI.

pub mod error;
pub mod functionals;
pub mod lab;
pub mod model;
pub mod numerics;
pub mod riemann;
pub mod viscous;
pub mod waves;

pub use error::{Error, Result};
