use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhaseError {
    #[error("phase exponent {0} exceeds the supported maximum")]
    ExponentTooLarge(u32),
    #[error("phase {numerator}/2^{exponent} is not below one cycle")]
    NotBelowOneCycle { numerator: u64, exponent: u32 },
}

/// Failures of the state-vector simulator and circuit construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("qubit index {index} out of range for {width} qubits")]
    QubitOutOfRange { index: usize, width: usize },
    #[error("classical bit index {index} out of range for {count} bits")]
    ClbitOutOfRange { index: usize, count: usize },
    #[error("classical bit {0} is read before any measurement writes it")]
    UnassignedClbit(usize),
    #[error("qubit {0} was consumed by a measurement and must be reset before reuse")]
    ConsumedQubit(usize),
    #[error("operation uses qubit {0} more than once")]
    DuplicateQubit(usize),
    #[error("branch count exceeds the cap of {cap}")]
    BranchCapExceeded { cap: usize },
    #[error("expected {expected} qubits, got {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("circuit contains non-unitary operation `{0}`")]
    NonUnitaryOp(&'static str),
    #[error("state initialization requires the target qubits to be in |0>")]
    DirtyInitialize,
    #[error("invalid state vector: {0}")]
    InvalidState(String),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("permutation table of length {found} does not match register dimension {expected}")]
    BadPermutation { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("rotation index k = {0} is outside 1..=30")]
    InvalidRotationIndex(i64),
    #[error("gate is not a diagonal phase gate diag(1, e^(i theta))")]
    NotPhaseGate,
    #[error("control and target must differ (both {0})")]
    SameQubit(usize),
    #[error("matrix dimensions differ: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QftError {
    #[error("transform width must be at least 1")]
    EmptyRegister,
    #[error("operation `{0}` cannot be lowered to the hardware gate set")]
    Unsupported(&'static str),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiclassicalError {
    #[error("block width t = {t} must satisfy 1 <= t <= n = {n}")]
    InvalidBlockWidth { n: usize, t: usize },
    #[error("measured block value {value} does not fit in {bits} bits")]
    BlockOutOfRange { value: u64, bits: usize },
    #[error("the first block takes no feedback phase")]
    FeedbackOnFirstBlock,
    #[error("block index {index} out of range for {blocks} blocks")]
    BlockIndexOutOfRange { index: usize, blocks: usize },
    #[error("value {value} out of range for {bits} bits")]
    ValueOutOfRange { value: u64, bits: usize },
    #[error("input state is not a product across the transform blocks")]
    NotStreamable,
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Qft(#[from] QftError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShorError {
    #[error("N = {0} must be an odd composite greater than 3")]
    BadModulus(u64),
    #[error("N = {n} is a power of the prime {p}")]
    PrimePower { n: u64, p: u64 },
    #[error("base x = {x} must lie in 2..N-1 for N = {n}")]
    BadBase { x: u64, n: u64 },
    #[error("gcd(x, N) = {0}; this is already a factor")]
    SharedFactor(u64),
    #[error("the compiled multiplier only exists for x = 11, N = 15")]
    NoCompiledCircuit,
    #[error(transparent)]
    Semiclassical(#[from] SemiclassicalError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("operation `{0}` is not in the hardware vocabulary; lower the circuit first")]
    NotLowered(&'static str),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("probability {0} must lie in [0, 1]")]
    InvalidProbability(f64),
    #[error("at least one trajectory is required")]
    ZeroTrajectories,
    #[error("distributions over {0} and {1} bits cannot be compared")]
    OutcomeSpaceMismatch(usize, usize),
    #[error(transparent)]
    Qft(#[from] QftError),
    #[error(transparent)]
    Semiclassical(#[from] SemiclassicalError),
    #[error(transparent)]
    Sim(#[from] SimError),
}
