//! State-vector simulation: amplitudes, circuits, exact branch enumeration
//! and seeded sampling.

mod circuit;
mod distribution;
mod exec;
mod state;

pub use circuit::{Circuit, Op};
pub use distribution::{Counts, OutcomeDistribution, DISTRIBUTION_TOLERANCE};
pub use exec::{
    apply, enumerate_branches, inner_product, sample, Branch, Simulator, DEFAULT_BRANCH_CAP,
};
pub use state::{StateVector, NORM_TOLERANCE};

pub(crate) use state::{gather, scatter};
