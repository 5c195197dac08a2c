//! Car-following dynamics on a ring road.
//!
//! Simulates the classical optimal velocity model (OVM) and the hybrid
//! optimal velocity-drag (OVD) model, classifies uniform flow through the
//! dispersion relation of the linearized system, and measures Fourier-mode
//! growth in simulated runs.

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod model_law;
pub mod ov_function;
pub mod ring;
pub mod stability;

pub use config::{ExperimentConfig, Overrides, Preset};
pub use diagnostics::{
    deviations, fastest_growing_mode, fourier_amplitudes, measure_growth_rate, mode_amplitude,
    Deviations, FourierSeries,
};
pub use error::{Error, Result};
pub use integrator::{run, step, IntegrationPlan, Scheme, TrajectoryRecord};
pub use model_law::{single_vehicle_solution, ModelLaw};
pub use ov_function::OvFunction;
pub use ring::{RingConfig, RingState};
pub use stability::{
    bisect_threshold, classify, dispersion_eigenvalues, full_spectrum, linearized_rhs,
    long_wave_coefficients, EquilibriumInfo, SpectrumPoint, Stability,
};
