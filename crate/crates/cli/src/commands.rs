//! One entry point per command.

use plateau_core::dqnn::{CostKind, Family};
use plateau_core::ensembles::InputEnsemble;
use plateau_core::gradient::{
    flow_vs_fd, hea_vs_dqnn, shift_vs_fd, FlowFdCheck, HeaCheck, ShiftFdCheck, HEA_TOL,
    SHIFT_FD_STEP,
};
use plateau_core::moments::{run_moment_suite, MomentCheck, MomentSuiteConfig};
use plateau_core::variance::{
    bound_matrix_flow, bound_rpqc, check_register, run_sweep_with, toy_model_exact, ReportMeta,
    SweepConfig, VarianceReport, LOCAL_M2_LAYERS,
};
use serde::Serialize;

use crate::config::{Command, ExperimentConfig};
use crate::output::{emit, write_table, write_variance};
use crate::CliError;

/// Flow-derivative checks run by `verify-gradients`.
pub const FLOW_INSTANCES: usize = 20;
/// Brick-network draws compared with their circuits by `verify-gradients`.
pub const HEA_DRAWS: usize = 100;

fn meta(cfg: &ExperimentConfig) -> ReportMeta {
    ReportMeta {
        version: plateau_core::VERSION.to_string(),
        command: cfg.command.name().to_string(),
        config: cfg.embedded(),
    }
}

pub fn dispatch(cfg: &ExperimentConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::VarianceSweep | Command::ToyModel | Command::MatrixFlow => variance(cfg),
        Command::VerifyMoments => verify_moments(cfg),
        Command::BoundTable => bound_table(cfg),
        Command::VerifyGradients => verify_gradients(cfg),
    }
}

fn sweep_config(cfg: &ExperimentConfig) -> SweepConfig {
    SweepConfig {
        n_min: cfg.n_min,
        n_max: cfg.n_max,
        families: cfg.families.iter().map(|&f| Family::from(f)).collect(),
        costs: cfg.cost_kind.kinds(),
        schemes: cfg.scheme.schemes(),
        samples: cfg.samples,
        training_pairs: cfg.training_pairs,
        seed: cfg.seed,
        inputs: if cfg.entangled_inputs {
            InputEnsemble::Entangled
        } else {
            InputEnsemble::Product
        },
        timing: cfg.timing,
    }
}

fn variance(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let sweep = sweep_config(cfg);
    let outcome = run_sweep_with(&sweep, |row| {
        eprintln!(
            "n={} {} {} {}: var {:.6e} [{:.6e}, {:.6e}] mean {:+.3e} ± {:.3e}",
            row.n,
            row.family.name(),
            row.cost_kind.name(),
            row.scheme.name(),
            row.grad_var,
            row.var_ci_lo,
            row.var_ci_hi,
            row.grad_mean,
            row.grad_mean_stderr
        )
    });
    let (rows, error) = match outcome {
        Ok(rows) => (rows, None),
        Err(f) => (f.rows, Some(f.error)),
    };
    let report = VarianceReport {
        meta: meta(cfg),
        rows,
    };
    emit(cfg.output_path.as_deref(), |w| {
        write_variance(w, &report, cfg.format)
    })?;
    match error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct MomentRow {
    identity: String,
    dim: usize,
    instance: usize,
    estimate_re: f64,
    estimate_im: f64,
    expected_re: f64,
    expected_im: f64,
    stderr: f64,
    samples: usize,
    pass: bool,
}

impl From<&MomentCheck> for MomentRow {
    fn from(c: &MomentCheck) -> Self {
        MomentRow {
            identity: c.identity.clone(),
            dim: c.dim,
            instance: c.instance,
            estimate_re: c.estimate.re,
            estimate_im: c.estimate.im,
            expected_re: c.expected.re,
            expected_im: c.expected.im,
            stderr: c.stderr,
            samples: c.samples,
            pass: c.pass,
        }
    }
}

const MOMENT_COLUMNS: [&str; 10] = [
    "identity",
    "dim",
    "instance",
    "estimate_re",
    "estimate_im",
    "expected_re",
    "expected_im",
    "stderr",
    "samples",
    "pass",
];

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn gate(failed: usize) -> Result<(), CliError> {
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verification(failed))
    }
}

/// Largest `n` for the moment suite's `2^n`-dimensional unitaries.
pub const MOMENT_MAX_N: usize = 6;

fn verify_moments(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.n_max > MOMENT_MAX_N {
        return Err(CliError::Usage(format!(
            "'n_max' is {}; the moment suite supports n up to {MOMENT_MAX_N}",
            cfg.n_max
        )));
    }
    let suite = MomentSuiteConfig {
        samples: cfg.samples,
        instances: cfg.instances,
        dims: (cfg.n_min..=cfg.n_max).map(|n| 1 << n).collect(),
        seed: cfg.seed,
        ..Default::default()
    };
    let checks = run_moment_suite(&suite)?;
    for c in &checks {
        eprintln!(
            "{} {:<34} d={:<3} #{} estimate {:.6} expected {:.6} stderr {:.2e}",
            verdict(c.pass),
            c.identity,
            c.dim,
            c.instance,
            c.estimate,
            c.expected,
            c.stderr
        );
    }
    let rows: Vec<MomentRow> = checks.iter().map(MomentRow::from).collect();
    emit(cfg.output_path.as_deref(), |w| {
        write_table(w, &meta(cfg), &MOMENT_COLUMNS, &rows, cfg.format)
    })?;
    gate(checks.iter().filter(|c| !c.pass).count())
}

#[derive(Serialize)]
struct BoundRow {
    n: usize,
    bound_rpqc_global: f64,
    bound_rpqc_local: f64,
    bound_matrix_flow: f64,
    toy_global: f64,
    toy_local: f64,
}

fn bound_table(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let rows: Vec<BoundRow> = (cfg.n_min..=cfg.n_max)
        .map(|n| BoundRow {
            n,
            bound_rpqc_global: bound_rpqc(n, CostKind::Global),
            bound_rpqc_local: bound_rpqc(n, CostKind::Local),
            bound_matrix_flow: bound_matrix_flow(n),
            toy_global: toy_model_exact(n, CostKind::Global),
            toy_local: toy_model_exact(n, CostKind::Local),
        })
        .collect();
    let columns = [
        "n",
        "bound_rpqc_global",
        "bound_rpqc_local",
        "bound_matrix_flow",
        "toy_global",
        "toy_local",
    ];
    emit(cfg.output_path.as_deref(), |w| {
        write_table(w, &meta(cfg), &columns, &rows, cfg.format)
    })
}

#[derive(Serialize)]
struct GradientRow {
    check: &'static str,
    family: &'static str,
    cost_kind: &'static str,
    instance: usize,
    value: f64,
    reference: f64,
    /// `|value − reference|`, or `|log-ratio − 1|` for flow checks.
    deviation: f64,
    tolerance: f64,
    pass: bool,
}

const GRADIENT_COLUMNS: [&str; 9] = [
    "check",
    "family",
    "cost_kind",
    "instance",
    "value",
    "reference",
    "deviation",
    "tolerance",
    "pass",
];

impl From<&ShiftFdCheck> for GradientRow {
    fn from(c: &ShiftFdCheck) -> Self {
        GradientRow {
            check: "shift-vs-fd",
            family: c.family.name(),
            cost_kind: "",
            instance: c.instance,
            value: c.shift,
            reference: c.fd,
            deviation: (c.shift - c.fd).abs(),
            tolerance: c.tolerance,
            pass: c.pass,
        }
    }
}

impl From<&FlowFdCheck> for GradientRow {
    fn from(c: &FlowFdCheck) -> Self {
        GradientRow {
            check: "flow-vs-fd",
            family: Family::GlobalDeep.name(),
            cost_kind: "",
            instance: c.instance,
            value: c.exact,
            reference: c.exact + c.err_fine,
            deviation: (c.log_ratio - 1.0).abs(),
            tolerance: 0.3,
            pass: c.pass,
        }
    }
}

impl From<&HeaCheck> for GradientRow {
    fn from(c: &HeaCheck) -> Self {
        GradientRow {
            check: "hardware-efficient",
            family: Family::LocalM2Brick.name(),
            cost_kind: c.cost_kind.name(),
            instance: c.instance,
            value: c.dqnn,
            reference: c.hea,
            deviation: (c.dqnn - c.hea).abs(),
            tolerance: HEA_TOL,
            pass: c.pass,
        }
    }
}

fn verify_gradients(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mut rows: Vec<GradientRow> = Vec::new();
    for family in [Family::GlobalDeep, Family::LocalM1Toy, Family::LocalM2Brick] {
        let checks = shift_vs_fd(family, cfg.instances, cfg.seed, SHIFT_FD_STEP)?;
        rows.extend(checks.iter().map(GradientRow::from));
    }
    rows.extend(
        flow_vs_fd(FLOW_INSTANCES, cfg.seed)?
            .iter()
            .map(GradientRow::from),
    );
    for width in cfg.n_min..=cfg.n_max {
        check_register(Family::LocalM2Brick, width)?;
        rows.extend(
            hea_vs_dqnn(HEA_DRAWS, width, LOCAL_M2_LAYERS, cfg.seed)?
                .iter()
                .map(GradientRow::from),
        );
    }
    for check in ["shift-vs-fd", "flow-vs-fd", "hardware-efficient"] {
        let group: Vec<&GradientRow> = rows.iter().filter(|r| r.check == check).collect();
        let passed = group.iter().filter(|r| r.pass).count();
        let worst = group.iter().map(|r| r.deviation).fold(0.0, f64::max);
        eprintln!(
            "{} {check}: {passed}/{} passed, largest deviation {worst:.3e}",
            verdict(passed == group.len()),
            group.len()
        );
    }
    emit(cfg.output_path.as_deref(), |w| {
        write_table(w, &meta(cfg), &GRADIENT_COLUMNS, &rows, cfg.format)
    })?;
    gate(rows.iter().filter(|r| !r.pass).count())
}
