//! The standard QFT circuit, the dense DFT oracle it is checked against,
//! lowering to the CNOT-based hardware set, and gate counting.
//!
//! The circuit is the usual Hadamard plus controlled-`R_k` ladder. It leaves
//! the output bits in reversed significance: qubit `r` ends up carrying output
//! bit `n-1-r`. Rather than appending SWAPs, measurements are relabelled, so
//! `Measure(r) -> clbit n-1-r`. [`CountLedger::two_qubit_with_swaps`] reports
//! what the SWAP network would have cost.
//!
//! Two-qubit gate counts quoted in the literature for this circuit disagree
//! with each other (`n(n+2)/2` and `n²/2`); neither equals the `n(n-1)/2`
//! controlled phases the construction actually uses. The ledger reports
//! measured counts only.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GateError, QftError};
use crate::gates::{self, GateKind, MAX_ROTATION_INDEX};
use crate::phase::Angle;
use crate::sim::{Circuit, Op, StateVector};

/// `ω_{2^n}^{ac} / 2^{n/2}` as a dense matrix, row `c`, column `a`.
pub fn dft_matrix(n: usize) -> Array2<Complex64> {
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    Array2::from_shape_fn((dim, dim), |(c, a)| {
        let k = (a * c) % dim;
        Complex64::from_polar(norm, 2.0 * PI * k as f64 / dim as f64)
    })
}

fn dft_with_sign(state: &StateVector, sign: f64) -> StateVector {
    let dim = state.amplitudes().len();
    let norm = 1.0 / (dim as f64).sqrt();
    let roots: Vec<Complex64> = (0..dim)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / dim as f64))
        .collect();
    let out = (0..dim)
        .map(|c| {
            state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(a, x)| x * roots[(a * c) % dim])
                .sum::<Complex64>()
                * norm
        })
        .collect();
    StateVector::from_unnormalized(out).expect("unitary image of a unit vector")
}

/// Ground-truth transform: `Σ_a x_a |a>  ->  2^{-n/2} Σ_c Σ_a x_a ω^{ac} |c>`.
pub fn dft_apply(state: &StateVector) -> StateVector {
    dft_with_sign(state, 1.0)
}

/// Conjugate-transpose of [`dft_apply`].
pub fn inverse_dft_apply(state: &StateVector) -> StateVector {
    dft_with_sign(state, -1.0)
}

/// Outcome probabilities `|DFT·ψ|²`.
pub fn dft_probabilities(state: &StateVector) -> Vec<f64> {
    dft_apply(state).probabilities()
}

/// Which controlled rotations to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct QftOptions {
    /// Drop controlled-`R_k` for `k` above this value; `None` keeps all.
    pub max_rotation: Option<u32>,
}

/// Unitary QFT ladder on `n` qubits, no measurements.
pub fn build_standard_qft(n: usize) -> Result<Circuit, QftError> {
    build_qft_with(n, QftOptions::default())
}

pub fn build_qft_with(n: usize, options: QftOptions) -> Result<Circuit, QftError> {
    if n < 1 {
        return Err(QftError::EmptyRegister);
    }
    if n as i64 > MAX_ROTATION_INDEX {
        return Err(GateError::InvalidRotationIndex(n as i64).into());
    }
    let mut circuit = Circuit::new(n, 0);
    for target in (0..n).rev() {
        circuit.push(Op::Gate {
            gate: gates::h(),
            target,
        })?;
        for control in (0..target).rev() {
            let k = (target - control + 1) as i64;
            if options.max_rotation.is_some_and(|m| k > m as i64) {
                continue;
            }
            circuit.push(Op::ControlledPhase {
                control,
                target,
                phase: gates::rotation_phase(k)?,
            })?;
        }
    }
    Ok(circuit)
}

/// Output bit carried by qubit `r` after the ladder.
pub fn output_bit(n: usize, qubit: usize) -> usize {
    n - 1 - qubit
}

/// The ladder followed by relabelled measurements into `n` classical bits.
pub fn build_measured_qft(n: usize) -> Result<Circuit, QftError> {
    let ladder = build_standard_qft(n)?;
    let mut circuit = Circuit::new(n, n);
    circuit.append(&ladder)?;
    for q in 0..n {
        circuit.push(Op::Measure {
            qubit: q,
            clbit: output_bit(n, q),
        })?;
    }
    Ok(circuit)
}

/// Unitary of the ladder with rows permuted by the output relabelling, which
/// should equal [`dft_matrix`].
pub fn relabelled_unitary(circuit: &Circuit) -> Result<Array2<Complex64>, QftError> {
    let n = circuit.num_qubits();
    let u = circuit.unitary()?;
    let dim = 1usize << n;
    let mut out = Array2::zeros((dim, dim));
    for row in 0..dim {
        let relabelled = (0..n).fold(0, |acc, q| acc | ((row >> q) & 1) << output_bit(n, q));
        for col in 0..dim {
            out[[relabelled, col]] = u[[row, col]];
        }
    }
    Ok(out)
}

/// Rewrites a circuit into `{U1, U2, U3, X, S, T, CX, measure, reset,
/// conditioned U1}`. Each controlled phase becomes the two-CNOT fragment and
/// each Hadamard becomes `U2(π, 0)`.
pub fn lower_to_hardware_gates(circuit: &Circuit) -> Result<Circuit, QftError> {
    let mut out = Circuit::new(circuit.num_qubits(), circuit.num_clbits())
        .with_recycling(circuit.is_recycled());
    for op in circuit.ops() {
        match op {
            Op::Gate { gate, target } => {
                let lowered = match gate.kind() {
                    GateKind::H => gates::u2(Angle::PI, Angle::ZERO),
                    GateKind::Z => gates::u1(Angle::PI),
                    GateKind::Y => {
                        gates::u3(Angle::PI, Angle::pi_dyadic(1, 1), Angle::pi_dyadic(1, 1))
                    }
                    GateKind::Custom => return Err(QftError::Unsupported("custom gate")),
                    _ => gate.clone(),
                };
                out.push(Op::Gate {
                    gate: lowered,
                    target: *target,
                })?;
            }
            Op::ControlledPhase {
                control,
                target,
                phase,
            } => {
                let dec = gates::decompose_phase_gate(&gates::u1(phase.to_angle()))?;
                let fragment = gates::controlled_gate_circuit(&dec, *control, *target)?;
                for fop in fragment.ops() {
                    out.push(fop.clone())?;
                }
            }
            Op::Cx { .. } | Op::Measure { .. } | Op::Reset { .. } | Op::ConditionedPhase { .. } => {
                out.push(op.clone())?;
            }
            Op::Permutation { .. } | Op::Initialize { .. } => {
                return Err(QftError::Unsupported(op.name()))
            }
        }
    }
    Ok(out)
}

/// Gate tallies for a circuit or an execution plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountLedger {
    pub single_qubit: usize,
    pub two_qubit: usize,
    /// Permutations spanning more than two qubits.
    pub multi_qubit: usize,
    pub measurements: usize,
    pub peak_register_width: usize,
    /// Register loads: one per block of a recycled run, one otherwise.
    pub steps: usize,
    /// Two-qubit count if output relabelling were replaced by SWAPs of 3 CX.
    pub two_qubit_with_swaps: usize,
}

/// Counts ops by arity. Conditioned phases count as single-qubit gates.
pub fn count_gates(circuit: &Circuit) -> CountLedger {
    let mut ledger = CountLedger {
        peak_register_width: circuit.num_qubits(),
        steps: 1,
        ..CountLedger::default()
    };
    let mut in_reset_run = false;
    for op in circuit.ops() {
        let is_reset = matches!(op, Op::Reset { .. });
        match op {
            Op::Gate { .. } | Op::ConditionedPhase { .. } => ledger.single_qubit += 1,
            Op::Cx { .. } | Op::ControlledPhase { .. } => ledger.two_qubit += 1,
            Op::Permutation {
                control, targets, ..
            } => match targets.len() + control.is_some() as usize {
                1 => ledger.single_qubit += 1,
                2 => ledger.two_qubit += 1,
                _ => ledger.multi_qubit += 1,
            },
            Op::Measure { .. } => ledger.measurements += 1,
            Op::Reset { .. } if !in_reset_run && circuit.is_recycled() => ledger.steps += 1,
            Op::Reset { .. } | Op::Initialize { .. } => {}
        }
        in_reset_run = is_reset;
    }
    ledger.two_qubit_with_swaps = ledger.two_qubit + 3 * relabelling_swaps(circuit);
    ledger
}

/// SWAPs needed to realize the measurement relabelling in hardware, when the
/// measurements form a qubit-to-bit bijection.
fn relabelling_swaps(circuit: &Circuit) -> usize {
    let Ok((_, measured)) = circuit.split_terminal_measurements() else {
        return 0;
    };
    let n = circuit.num_qubits();
    if measured.len() != n || circuit.num_clbits() != n {
        return 0;
    }
    let mut perm = vec![usize::MAX; n];
    for &(q, c) in &measured {
        if perm[q] != usize::MAX {
            return 0;
        }
        perm[q] = c;
    }
    let mut seen = vec![false; n];
    let mut swaps = 0;
    for start in 0..n {
        let mut len = 0usize;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        swaps += len.saturating_sub(1);
    }
    swaps
}
