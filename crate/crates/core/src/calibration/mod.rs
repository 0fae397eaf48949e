//! Material loss calibration from directional power measurements.
//!
//! Each matched path contributes a row `w_j · L = A_j`, where `w_j` counts the
//! penetrations and reflections per material and `A_j` is the link-budget mismatch.
//! The dB-domain fit is closed-form least squares; the linear-domain fit anneals the
//! linear power coefficients.

mod linear_domain;
mod log_domain;
pub mod lstsq;
mod stats;
mod synthetic;
mod system;

pub use linear_domain::{
    objective_linear, solve_linear_domain, solve_linear_domain_with, AnnealingSchedule,
    LinearSolution,
};
pub use log_domain::{objective_db, residuals_db, solve_log_domain, LogSolution, LossVector};
pub use synthetic::{simulate_measurements, SyntheticCampaign};
pub use stats::{error_statistics, ErrorDistribution, ErrorStatistics};
pub use system::{
    assemble_system, discovery_materials, weight_row, CalibrationSystem, Exclusion,
    MeasurementRecord, DISCOVERY_PENETRATION_LOSS_DB, DISCOVERY_REFLECTION_LOSS_DB,
};
