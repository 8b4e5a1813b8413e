//! Monte-Carlo gradient statistics over random network initializations.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{bound_matrix_flow, bound_rpqc, toy_model_exact};
use super::stats::{bootstrap_var_ci, sample_stats, BOOTSTRAP_RESAMPLES, CI_LEVEL};
use crate::dqnn::{
    global_deep_haar, global_deep_rpqc, hea_grad_shift, local_m1_toy_random, local_m2_brick,
    map_parameter, map_to_hardware_efficient, CostKind, CostSpec, Family, GlobalAnsatz,
    NetworkSpec, RpqcParameterRef, TargetState, TrainingPair, BRICK_PROBE, TOY_PROBE,
};
use crate::ensembles::{
    derive_seed, label_tag, random_bits, sample_product_training_pair, InputEnsemble, RngStream,
};
use crate::error::{Error, Result};
use crate::gradient::{grad_s_statevector, grad_theta_shift, MatrixFlowState};
use crate::linalg::QuantumState;
use crate::moments::MIN_SAMPLES;

/// Largest register a cell may simulate.
pub const MAX_REGISTER_QUBITS: usize = 14;
/// Depth of the brick networks in sweeps.
pub const LOCAL_M2_LAYERS: usize = 2;
/// Depth of the toy networks in sweeps.
pub const TOY_LAYERS: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Derivative with respect to one rotation angle.
    Rpqc,
    /// Derivative with respect to the flow time `s` at `s = 0`.
    MatrixFlow,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rpqc => "rpqc",
            Scheme::MatrixFlow => "matrix-flow",
        }
    }
}

/// Which simulator evaluates brick-network gradients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Dqnn,
    HardwareEfficient,
}

/// One `(n, family, cost, scheme)` cell of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    pub n: usize,
    pub family: Family,
    pub cost_kind: CostKind,
    pub scheme: Scheme,
    pub samples: usize,
    pub training_pairs: usize,
    pub seed: u64,
    pub inputs: InputEnsemble,
    pub timing: bool,
}

impl CellConfig {
    pub fn new(
        n: usize,
        family: Family,
        cost_kind: CostKind,
        scheme: Scheme,
        samples: usize,
        seed: u64,
    ) -> Self {
        CellConfig {
            n,
            family,
            cost_kind,
            scheme,
            samples,
            training_pairs: 1,
            seed,
            inputs: InputEnsemble::Product,
            timing: false,
        }
    }

    /// Seed of the per-sample streams.
    pub fn cell_seed(&self) -> u64 {
        let label = format!(
            "{}/{}/{}/{}",
            self.family.name(),
            self.cost_kind.name(),
            self.scheme.name(),
            self.n
        );
        derive_seed(self.seed, label_tag(&label))
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "{} samples; need at least {MIN_SAMPLES}",
                self.samples
            )));
        }
        if self.training_pairs == 0 {
            return Err(Error::InvalidArgument(
                "need at least one training pair".into(),
            ));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        match self.family {
            Family::Custom => return Err(Error::Unsupported("no random custom networks".into())),
            Family::LocalM2Brick if self.n % 2 != 0 => {
                return Err(Error::InvalidArgument(format!(
                    "brick networks need an even width, got {}",
                    self.n
                )))
            }
            _ => {}
        }
        check_register(self.family, self.n)
    }
}

/// Qubits in the full register of a sweep network of width `n`.
pub fn register_qubits(family: Family, n: usize) -> usize {
    match family {
        Family::LocalM2Brick => n * (LOCAL_M2_LAYERS + 1),
        Family::LocalM1Toy => n * (TOY_LAYERS + 1),
        Family::GlobalDeep | Family::Custom => 2 * n,
    }
}

pub fn check_register(family: Family, n: usize) -> Result<()> {
    let qubits = register_qubits(family, n);
    if qubits > MAX_REGISTER_QUBITS {
        return Err(Error::ResourceGuard {
            qubits,
            limit: MAX_REGISTER_QUBITS,
        });
    }
    Ok(())
}

/// Reference value known in closed form for this cell, if any.
pub fn exact_value(cell: &CellConfig) -> Option<f64> {
    match (cell.family, cell.scheme) {
        (Family::LocalM1Toy, Scheme::Rpqc) => Some(toy_model_exact(cell.n, cell.cost_kind)),
        _ => None,
    }
}

/// Upper bound on the variance for this cell, if one applies.
pub fn bound_value(cell: &CellConfig) -> Option<f64> {
    match (cell.family, cell.scheme) {
        (Family::GlobalDeep, Scheme::Rpqc) => Some(bound_rpqc(cell.n, cell.cost_kind)),
        (Family::GlobalDeep, Scheme::MatrixFlow) => Some(bound_matrix_flow(cell.n)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub n: usize,
    pub family: Family,
    pub cost_kind: CostKind,
    pub scheme: Scheme,
    pub samples: usize,
    pub grad_mean: f64,
    pub grad_mean_stderr: f64,
    pub grad_var: f64,
    pub var_ci_lo: f64,
    pub var_ci_hi: f64,
    pub exact_value: Option<f64>,
    pub bound_value: Option<f64>,
    pub seed: u64,
    pub wall_time_ms: Option<u64>,
}

/// Basis string `z` mapped to itself.
fn basis_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TrainingPair {
    let bits = random_bits(n, rng);
    let index = bits
        .iter()
        .enumerate()
        .map(|(q, &b)| (b as usize) << q)
        .sum();
    TrainingPair {
        input: QuantumState::basis(n, index),
        output: TargetState::basis(&bits),
    }
}

fn random_network<R: Rng + ?Sized>(
    cell: &CellConfig,
    rng: &mut R,
) -> Result<(NetworkSpec, RpqcParameterRef)> {
    let n = cell.n;
    match (cell.family, cell.scheme) {
        (Family::GlobalDeep, Scheme::Rpqc) => {
            global_deep_rpqc(&[n, n], GlobalAnsatz::HaarFactors, rng)
        }
        (Family::GlobalDeep, Scheme::MatrixFlow) => {
            Ok((global_deep_haar(&[n, n], rng)?, TOY_PROBE))
        }
        (Family::LocalM1Toy, _) => Ok((local_m1_toy_random(n, TOY_LAYERS, rng)?, TOY_PROBE)),
        (Family::LocalM2Brick, _) => Ok((local_m2_brick(n, LOCAL_M2_LAYERS, rng)?, BRICK_PROBE)),
        (Family::Custom, _) => Err(Error::Unsupported("no random custom networks".into())),
    }
}

fn random_pairs<R: Rng + ?Sized>(cell: &CellConfig, rng: &mut R) -> Vec<TrainingPair> {
    (0..cell.training_pairs)
        .map(|_| match cell.family {
            Family::LocalM1Toy => basis_pair(cell.n, rng),
            _ => sample_product_training_pair(cell.n, cell.n, cell.inputs, rng),
        })
        .collect()
}

/// Gradient of one fresh random instance drawn from `stream`.
pub fn sample_gradient(cell: &CellConfig, route: Route, stream: RngStream) -> Result<f64> {
    let mut rng = stream.rng();
    let (spec, pref) = random_network(cell, &mut rng)?;
    let flow = match cell.scheme {
        Scheme::MatrixFlow => {
            Some(MatrixFlowState::from_network(&spec)?.with_random_generators(&mut rng)?)
        }
        Scheme::Rpqc => None,
    };
    let cspec = CostSpec::new(cell.cost_kind, random_pairs(cell, &mut rng));
    match (flow, route) {
        (Some(flow), Route::Dqnn) => grad_s_statevector(&flow, &spec, &cspec),
        (None, Route::Dqnn) => grad_theta_shift(&spec, &cspec, pref),
        (None, Route::HardwareEfficient) if cell.family == Family::LocalM2Brick => {
            let hea = map_to_hardware_efficient(&spec)?;
            hea_grad_shift(&hea, &cspec, map_parameter(&spec, pref)?)
        }
        _ => Err(Error::Unsupported(
            "hardware-efficient route needs a brick network and rotation gradients".into(),
        )),
    }
}

/// Gradients of `cell.samples` instances; sample `i` uses stream `i` of the cell seed.
pub fn cell_gradients(cell: &CellConfig, route: Route) -> Result<Vec<f64>> {
    cell.validate()?;
    let seed = cell.cell_seed();
    (0..cell.samples)
        .into_par_iter()
        .map(|i| {
            sample_gradient(cell, route, RngStream::new(seed, i as u64)).map_err(|e| {
                Error::SampleFailed {
                    seed,
                    stream: i as u64,
                    source: Box::new(e),
                }
            })
        })
        .collect()
}

/// Row of statistics for already computed gradients.
pub fn summarize(
    cell: &CellConfig,
    grads: &[f64],
    wall_time_ms: Option<u64>,
) -> Result<VarianceRow> {
    let s = sample_stats(grads)?;
    let boot = RngStream::new(derive_seed(cell.cell_seed(), label_tag("bootstrap")), 0);
    let (lo, hi) = bootstrap_var_ci(grads, BOOTSTRAP_RESAMPLES, CI_LEVEL, boot)?;
    Ok(VarianceRow {
        n: cell.n,
        family: cell.family,
        cost_kind: cell.cost_kind,
        scheme: cell.scheme,
        samples: s.samples,
        grad_mean: s.mean,
        grad_mean_stderr: s.mean_stderr,
        grad_var: s.var,
        var_ci_lo: lo,
        var_ci_hi: hi,
        exact_value: exact_value(cell),
        bound_value: bound_value(cell),
        seed: cell.seed,
        wall_time_ms,
    })
}

/// Mean, variance and bootstrap interval of the designated gradient.
pub fn estimate_grad_stats(cell: &CellConfig) -> Result<VarianceRow> {
    let start = Instant::now();
    let grads = cell_gradients(cell, Route::Dqnn)?;
    let elapsed = cell.timing.then(|| start.elapsed().as_millis() as u64);
    summarize(cell, &grads, elapsed)
}

/// Grid of cells over an inclusive `n` range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub families: Vec<Family>,
    pub costs: Vec<CostKind>,
    pub schemes: Vec<Scheme>,
    pub samples: usize,
    pub training_pairs: usize,
    pub seed: u64,
    pub inputs: InputEnsemble,
    pub timing: bool,
}

impl SweepConfig {
    /// Cells in output order: family, scheme, cost, then `n`. Odd widths
    /// are skipped for brick networks.
    pub fn cells(&self) -> Vec<CellConfig> {
        let mut out = Vec::new();
        for &family in &self.families {
            for &scheme in &self.schemes {
                for &cost_kind in &self.costs {
                    for n in self.n_min..=self.n_max {
                        if family == Family::LocalM2Brick && n % 2 != 0 {
                            continue;
                        }
                        out.push(CellConfig {
                            n,
                            family,
                            cost_kind,
                            scheme,
                            samples: self.samples,
                            training_pairs: self.training_pairs,
                            seed: self.seed,
                            inputs: self.inputs,
                            timing: self.timing,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Rows finished before a sweep stopped, and the reason it stopped.
#[derive(Debug)]
pub struct SweepFailure {
    pub rows: Vec<VarianceRow>,
    pub error: Error,
}

/// One row per cell, in [`SweepConfig::cells`] order. Each cell is checked
/// against the register limit just before it runs.
pub fn run_sweep(cfg: &SweepConfig) -> std::result::Result<Vec<VarianceRow>, SweepFailure> {
    run_sweep_with(cfg, |_| {})
}

/// [`run_sweep`], reporting each row as soon as it is finished.
pub fn run_sweep_with<F: FnMut(&VarianceRow)>(
    cfg: &SweepConfig,
    mut on_row: F,
) -> std::result::Result<Vec<VarianceRow>, SweepFailure> {
    let mut rows = Vec::new();
    let fail = |rows, error| Err(SweepFailure { rows, error });
    if cfg.n_min > cfg.n_max || cfg.n_min == 0 {
        return fail(
            rows,
            Error::InvalidArgument(format!("n range {}..{}", cfg.n_min, cfg.n_max)),
        );
    }
    let cells = cfg.cells();
    if cells.is_empty() {
        return fail(rows, Error::InvalidArgument("sweep has no cells".into()));
    }
    for cell in cells {
        match estimate_grad_stats(&cell) {
            Ok(row) => {
                on_row(&row);
                rows.push(row);
            }
            Err(error) => return fail(rows, error),
        }
    }
    Ok(rows)
}
