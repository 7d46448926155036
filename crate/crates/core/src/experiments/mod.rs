//! Experiment manifests, runners, and CSV rendering.

pub mod config;
pub mod csv;
pub mod runners;

pub use config::{
    CostBlock, ExperimentConfig, ExperimentKind, FactorBlock, FssBlock, FssTopology,
    InstanceBlock, SamplingBlock, ScheduleBlock, SparsifyBlock, COST_DEFAULT_K,
};
pub use csv::{fmt_f64, CsvTable, CORE_VERSION};
pub use runners::{
    decode_policy_for, run_boltzmann_fa, run_cost_model, run_experiment, run_factor,
    run_maxcut_grid, run_residual_fss, run_w0_sweep, trajectory_csv, BoltzmannReport,
    BoltzmannRow, CostReport, CostRow, ExperimentOutput, FactorReport, FactorTrialRow,
    FssReport, GridRow, MaxcutGridReport, SweepRow, W0SweepReport, FSS_B,
};
