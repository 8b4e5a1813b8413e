//! End-to-end variance estimation through the public API.

use plateau_core::dqnn::{CostKind, Family};
use plateau_core::ensembles::InputEnsemble;
use plateau_core::variance::{
    cell_gradients, estimate_grad_stats, run_sweep, CellConfig, ReportMeta, Route, Scheme,
    SweepConfig, VarianceReport,
};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn sweep_bytes_do_not_depend_on_threads() {
    let cfg = SweepConfig {
        n_min: 2,
        n_max: 3,
        families: vec![Family::GlobalDeep, Family::LocalM1Toy],
        costs: vec![CostKind::Global, CostKind::Local],
        schemes: vec![Scheme::Rpqc, Scheme::MatrixFlow],
        samples: 150,
        training_pairs: 2,
        seed: 21,
        inputs: InputEnsemble::Entangled,
        timing: false,
    };
    let render = |threads| {
        let rows = in_pool(threads, || run_sweep(&cfg).unwrap());
        let report = VarianceReport {
            meta: ReportMeta {
                version: "test".into(),
                command: "sweep".into(),
                config: serde_json::json!({}),
            },
            rows,
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        buf
    };
    let one = render(1);
    assert_eq!(one, render(3));
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 3 + 1 + 16);
}

#[test]
fn toy_variance_matches_the_closed_form() {
    for kind in [CostKind::Global, CostKind::Local] {
        let cell = CellConfig::new(3, Family::LocalM1Toy, kind, Scheme::Rpqc, 20_000, 4);
        let row = estimate_grad_stats(&cell).unwrap();
        let exact = row.exact_value.unwrap();
        // (hi − lo) / 3.92 approximates the standard error of the variance
        assert!(
            (row.grad_var - exact).abs() < 5.0 * (row.var_ci_hi - row.var_ci_lo) / 3.92,
            "{row:?}"
        );
        assert!(row.grad_mean.abs() <= 5.0 * row.grad_mean_stderr, "{row:?}");
    }
}

#[test]
fn global_variance_sits_below_its_bound() {
    let cell = CellConfig::new(
        2,
        Family::GlobalDeep,
        CostKind::Global,
        Scheme::Rpqc,
        2_000,
        8,
    );
    let row = estimate_grad_stats(&cell).unwrap();
    assert!(row.var_ci_hi < row.bound_value.unwrap(), "{row:?}");
}

#[test]
fn brick_variance_is_the_same_through_the_circuit() {
    let cell = CellConfig::new(
        4,
        Family::LocalM2Brick,
        CostKind::Global,
        Scheme::Rpqc,
        300,
        2,
    );
    let a = cell_gradients(&cell, Route::Dqnn).unwrap();
    let b = cell_gradients(&cell, Route::HardwareEfficient).unwrap();
    let var = |v: &[f64]| plateau_core::variance::sample_stats(v).unwrap().var;
    assert!((var(&a) - var(&b)).abs() <= 1e-10 * var(&a).max(1e-3));
}
