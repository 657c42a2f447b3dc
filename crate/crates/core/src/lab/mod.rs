//! Experiment configurations, reference solutions, reports and the
//! acceptance criteria, plus the command-line front end.

pub mod acceptance;
pub mod cli;
mod config;
mod experiments;
mod reference;
mod report;

pub use acceptance::{criterion_config, default_config, run_all, run_criterion, CriterionOutcome, CRITERIA};
pub use config::{Bump, ExperimentConfig, GridSpec, InitialData};
pub use experiments::{
    detect_jumps, exp_asymptotics, exp_l1_stability, exp_propagation_speed, exp_shock_conditions, exp_system_perturbation,
    exp_vanishing_viscosity, exp_viscosity_solution_check, run_experiment, Jump, EXPERIMENTS,
};
pub use reference::{l1_cells, l1_on, HopfLax};
pub use report::{Cmp, Report, Table, Verdict};
