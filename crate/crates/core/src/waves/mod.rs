//! Travelling waves and the gradient decomposition built on them: the
//! profile ODE, first-order centre-manifold vectors, the cutoff `θ`, the
//! map `(v, w) ↦ (u_x, u_t)` with its Newton inverse, and discrete residuals
//! of the component equations.

mod center;
mod cutoff;
mod decomposition;
mod profile;
mod sources;

pub use center::{eigenvector_derivative, rtilde, rtilde_with};
pub use cutoff::{theta, theta_prime, CutoffParams};
pub use decomposition::{
    components, decompose_field, decompose_jet, eigen_components, lambda_forward, speed, Components, DecompParams,
    Decomposition, Jet,
};
pub use profile::{integrate_profile, integrate_profile_with, ProfileOptions, TravellingProfile};
pub use sources::{source_residuals, SourceReport};
