//! File formats and the command implementations behind the binary.

mod config;
mod environment;
mod format;
mod run;
mod tables;

pub use config::{AntennaSpec, LinkSpec, RunConfig, DEFAULT_SEED};
pub use environment::{environment_to_json, parse_environment, read_environment, ENVIRONMENT_VERSION};
pub use format::sig9;
pub use run::{
    read_stats, run_calibrate, run_compare, run_stats, run_trace, write_atomic, CalibrationReport, LinkOutcome,
};
pub use tables::{
    components_to_rows, parse_antenna_cut_csv, parse_components_csv, parse_measurements_csv, read_antenna_cut,
    read_components, read_measurements, write_components_csv, write_measurements_csv, ComponentRow,
    COMPONENTS_HEADER, MEASUREMENTS_HEADER,
};
