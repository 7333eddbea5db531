//! Parameter sweeps, configuration files and table output.

mod config;
mod output;
mod sweep;

pub use config::{
    k1_grid, Axes, ClassicalOptions, OutputFormat, OutputOptions, QuantumOptions, SweepConfig, DEFAULT_K1_STEP,
    MAX_DESK_J, WORKERS_ENV,
};
pub use output::{
    csv_reader, fmt_f64, write_bifurcation_csv, write_bloch_csv, write_failures_csv, write_metrics_csv,
    write_point_metrics_csv, write_spectrum_csv, write_statistics_csv, write_sweep_outputs, write_trajectories_csv,
    Provenance,
};
pub use sweep::{
    classical_point, parameter_points, quantum_point, quantum_spectrum, run_sweep, spectrum_statistics, ClassicalRecord,
    FailureRecord, ParamPoint, QuantumRecord, SweepRecord, SweepResult,
};
