//! Gradients of the DQNN cost: rotation angles and matrix flow.

mod consistency;
mod flow;
mod shift;

pub use consistency::{
    commutator_identity, flow_vs_fd, hea_vs_dqnn, shift_vs_fd, FlowFdCheck, HeaCheck, ShiftFdCheck,
    FLOW_EXACT_FLOOR, FLOW_STEPS, HEA_TOL, SHIFT_FD_STEP,
};
pub use flow::{grad_s, grad_s_statevector, update_step, MatrixFlowState};
pub use shift::{
    grad_theta, grad_theta_commutator, grad_theta_fd, grad_theta_shift, FALLBACK_FD_STEP,
};
