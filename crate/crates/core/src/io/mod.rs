//! QASM emission and parsing, and JSON result documents.

pub mod document;
pub mod qasm;

pub use document::{ResultDocument, RunRequest};
pub use qasm::{emit_qasm, from_qasm, parse_qasm, to_qasm};
