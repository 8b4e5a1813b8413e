//! Gradient mean and variance over random initializations, closed-form
//! references, and sweep reports.

mod exact;
mod experiment;
mod report;
mod stats;

pub use exact::{bound_matrix_flow, bound_rpqc, toy_model_exact};
pub use experiment::{
    bound_value, cell_gradients, check_register, estimate_grad_stats, exact_value, register_qubits,
    run_sweep, run_sweep_with, sample_gradient, summarize, CellConfig, Route, Scheme, SweepConfig,
    SweepFailure, VarianceRow, LOCAL_M2_LAYERS, MAX_REGISTER_QUBITS, TOY_LAYERS,
};
pub use report::{write_csv_preamble, ReportMeta, VarianceReport, CSV_COLUMNS};
pub use stats::{
    bootstrap_var_ci, pairwise_sum, sample_stats, SampleStats, BOOTSTRAP_RESAMPLES, CI_LEVEL,
};
