//! DQNN construction, dissipative forward pass and cost evaluation.

mod builders;
mod cost;
mod forward;
mod hea;
mod network;

pub use builders::{
    brick_circuit, deep_circuit, deep_circuit_depth, global_deep_haar, global_deep_rpqc,
    local_m1_toy, local_m1_toy_random, local_m2_brick, swap_matrix, swap_network, GlobalAnsatz,
    BRICK_PROBE, TOY_PROBE,
};
pub use cost::{
    cost, cost_statevector, global_observable, local_observable, observable, CostKind, CostSpec,
    TargetState, TrainingPair,
};
pub use forward::{final_register_state, forward, forward_statevector};
pub(crate) use forward::{padded_input, run_ops};
pub use hea::{
    hea_grad_shift, map_parameter, map_to_hardware_efficient, HeaBrick, HeaCircuit, HeaParameterRef,
};
pub(crate) use network::{materialize_ops, OpKind};
pub use network::{
    Family, Generator, NetworkSpec, Perceptron, PerceptronUnitary, RpqcCircuit, RpqcGate,
    RpqcParameterRef,
};
