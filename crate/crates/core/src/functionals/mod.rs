//! Lyapunov-type functionals: total variation, the transversal interaction
//! potential, area and length of planar gradient curves, the flux curve of a
//! scalar law, decay monitors over time series, and the tame-oscillation
//! ratio.

mod monitor;
mod oscillation;
mod profile;

pub use monitor::{
    decay_monitor, interaction_bound, interaction_series, scalar_series, system_series, FunctionalSeries,
    IntervalCheck, MonitorParams, MonitorReport, SeriesRow,
};
pub use oscillation::{tame_oscillation, TameOscillation};
pub use profile::{
    area_dissipation, area_functional, flux_curve, interaction_potential, length_functional, overlap,
    total_variation, PlanarCurve, ScalarProfile,
};
