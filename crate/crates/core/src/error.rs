use thiserror::Error;

/// Errors raised by the simulator, samplers and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("target qubit {0} listed more than once")]
    DuplicateTarget(usize),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("expectation value has imaginary part {0:.3e}")]
    ComplexExpectation(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("output state is not a declared product")]
    NotProduct,

    #[error("cost {0} lies outside [0, 1]")]
    CostOutOfRange(f64),

    #[error("generator of the referenced rotation is not a Pauli string")]
    NonPauliGenerator,

    #[error("no rotation at layer {layer}, output {output}, gate {gate}")]
    UnknownParameter {
        layer: usize,
        output: usize,
        gate: usize,
    },

    #[error("missing generator for perceptron {0}")]
    MissingGenerator(usize),

    #[error("not a rank-one projector: {0}")]
    NotRankOneProjector(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource guard: register of {qubits} qubits exceeds the limit of {limit}")]
    ResourceGuard { qubits: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample {stream} of cell seed {seed} failed: {source}")]
    SampleFailed {
        seed: u64,
        stream: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
