//! Closed-form toy-model variances and upper bounds on the gradient variance.

use crate::dqnn::CostKind;

/// `Var[∂C]` for the single-layer toy network with basis-state pairs:
/// `(1/8)(3/8)^{n−1}` for the global cost, `1/(8n²)` for the local one.
pub fn toy_model_exact(n: usize, kind: CostKind) -> f64 {
    assert!(n >= 1, "toy model needs n >= 1");
    match kind {
        CostKind::Global => 0.125 * 0.375f64.powi(n as i32 - 1),
        CostKind::Local => 1.0 / (8.0 * (n * n) as f64),
    }
}

/// `2^n (2^n + 1/2) / (2^{2n+2} − 1)`, written without large powers.
fn product_factor(n: usize) -> f64 {
    let n = n as i32;
    (1.0 + 2f64.powi(-n - 1)) / (4.0 - 2f64.powi(-2 * n))
}

/// `1 − 2^{−2n−2}`, so that `2^{2n+2} − 1 = 2^{2n+2} · tail(n)`.
fn tail(n: usize) -> f64 {
    1.0 - 2f64.powi(-2 * n as i32 - 2)
}

/// Bound on `Var[∂_ν C]` for deep global perceptrons with a single
/// training pair per term:
/// global `2^{4n+1}/(2^{2n+2}−1)² · P(n)^{n−1}`, local `2^{3n+1}/(2^{2n+2}−1)²`,
/// with `P(n) = 2^n (2^n + 1/2)/(2^{2n+2} − 1)`.
pub fn bound_rpqc(n: usize, kind: CostKind) -> f64 {
    assert!(n >= 1, "bound needs n >= 1");
    let t = tail(n);
    match kind {
        // 2^{4n+1} / 2^{4n+4} = 1/8
        CostKind::Global => 0.125 / (t * t) * product_factor(n).powi(n as i32 - 1),
        // 2^{3n+1} / 2^{4n+4} = 2^{−n−3}
        CostKind::Local => 2f64.powi(-(n as i32) - 3) / (t * t),
    }
}

/// Bound on `Var[∂_s C]` under matrix flow: the per-term bound
/// `2^{3n+2}/(2^{2n+2}−1) · P(n)^{n−1}` times the `n²` terms of the double sum.
pub fn bound_matrix_flow(n: usize) -> f64 {
    assert!(n >= 1, "bound needs n >= 1");
    let per_term = 2f64.powi(n as i32) / tail(n) * product_factor(n).powi(n as i32 - 1);
    (n * n) as f64 * per_term
}
