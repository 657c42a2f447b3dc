//! Method-of-lines solver for `u_t + A(u) u_x = ε u_xx`, its linearisation,
//! heat-kernel references and derivative decay diagnostics.

mod decay;
mod grid;
mod kernel;
mod solver;

pub use decay::{decay_report, DecayReport, DecayRow, Derivative};
pub use grid::{field_total_variation, l1_distance, l1_norm, Field, Grid1D, Trajectory};
pub use kernel::{heat_kernel, kernel_norms, rescale_to_unit_viscosity};
pub use solver::{solve, solve_observed, solve_tangent, SolveConfig};
