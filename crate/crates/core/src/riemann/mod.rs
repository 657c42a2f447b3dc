//! Riemann solver built from convex envelopes of scalar fluxes along wave
//! curves, the fixed point that defines those curves, the composite fan and
//! shock admissibility checks.

mod admissibility;
mod curve;
mod envelope;
mod fan;

pub use admissibility::{
    check_admissibility, genuinely_nonlinear, lax_holds, rankine_hugoniot_residual, shocks, AdmissibilityReport,
    Shock, ShockCheck,
};
pub use curve::{flux_integral, psi, t_step, wave_curve, GammaCurve, RiemannParams};
pub use envelope::{lower_convex_envelope, upper_concave_envelope};
pub use fan::{solve_riemann, WaveFan};
