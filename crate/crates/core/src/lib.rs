//! Block-wise semiclassical quantum Fourier transform, simulated.
//!
//! The crate builds and cross-checks three realizations of the QFT over
//! `Z_{2^n}`: the dense DFT matrix, the standard controlled-phase circuit, and
//! the t-bit semiclassical transform that measures `t` qubits at a time and
//! feeds the results forward as classically controlled phases. On top of that
//! sit Shor order finding on a recycled register, lowering to a CNOT-based
//! hardware gate set, noisy trajectory comparisons, and QASM/JSON I/O.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod gates;
pub mod io;
pub mod phase;
pub mod qft;
pub mod semiclassical;
pub mod shor;
pub mod sim;

pub use error::{
    AnalysisError, GateError, PhaseError, QasmError, QftError, SemiclassicalError, ShorError,
    SimError,
};
pub use phase::{Angle, DyadicPhase};
pub use sim::{Circuit, Op, OutcomeDistribution, StateVector};
