use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::SimError;
use crate::gates::SingleQubitGate;
use crate::phase::DyadicPhase;

use super::state::StateVector;

/// One step of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate {
        gate: SingleQubitGate,
        target: usize,
    },
    Cx {
        control: usize,
        target: usize,
    },
    /// Phase `e^{2πi·phase}` on `|11>` of (control, target); controlled-R_k
    /// is `phase = 1/2^k`.
    ControlledPhase {
        control: usize,
        target: usize,
        phase: DyadicPhase,
    },
    /// Basis permutation `|y> -> |table[y]>` on `targets` (`targets[0]` least
    /// significant), applied when `control` is set or absent.
    Permutation {
        control: Option<usize>,
        targets: Vec<usize>,
        table: Arc<Vec<usize>>,
        label: String,
    },
    Measure {
        qubit: usize,
        clbit: usize,
    },
    /// `diag(1, e^{2πi·phase})` on `target` when every `(bit, value)` holds.
    ConditionedPhase {
        condition: Vec<(usize, bool)>,
        phase: DyadicPhase,
        target: usize,
    },
    Reset {
        qubit: usize,
    },
    /// Loads a block state into `targets`, which must hold `|0...0>`.
    Initialize {
        targets: Vec<usize>,
        amplitudes: Arc<Vec<Complex64>>,
    },
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Gate { .. } => "gate",
            Op::Cx { .. } => "cx",
            Op::ControlledPhase { .. } => "controlled-phase",
            Op::Permutation { .. } => "permutation",
            Op::Measure { .. } => "measure",
            Op::ConditionedPhase { .. } => "conditioned-phase",
            Op::Reset { .. } => "reset",
            Op::Initialize { .. } => "initialize",
        }
    }

    /// Qubits the operation touches.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Op::Gate { target, .. } => vec![*target],
            Op::Cx { control, target }
            | Op::ControlledPhase {
                control, target, ..
            } => {
                vec![*control, *target]
            }
            Op::Permutation {
                control, targets, ..
            } => control.iter().chain(targets.iter()).copied().collect(),
            Op::Measure { qubit, .. } | Op::Reset { qubit } => vec![*qubit],
            Op::ConditionedPhase { target, .. } => vec![*target],
            Op::Initialize { targets, .. } => targets.clone(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(
            self,
            Op::Gate { .. } | Op::Cx { .. } | Op::ControlledPhase { .. } | Op::Permutation { .. }
        )
    }

    /// Builds a permutation op, checking that `table` is a bijection on the
    /// register dimension.
    pub fn permutation(
        control: Option<usize>,
        targets: Vec<usize>,
        table: Vec<usize>,
        label: impl Into<String>,
    ) -> Result<Op, SimError> {
        let dim = 1usize << targets.len();
        if table.len() != dim {
            return Err(SimError::BadPermutation {
                expected: dim,
                found: table.len(),
            });
        }
        let mut seen = vec![false; dim];
        for &y in &table {
            if y >= dim || std::mem::replace(&mut seen[y], true) {
                return Err(SimError::BadPermutation {
                    expected: dim,
                    found: table.len(),
                });
            }
        }
        Ok(Op::Permutation {
            control,
            targets,
            table: Arc::new(table),
            label: label.into(),
        })
    }
}

/// Ordered operations over quantum and classical bits.
///
/// Immutable once built; ops are validated as they are pushed.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    ops: Vec<Op>,
    written: Vec<bool>,
    recycled: bool,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Self {
            num_qubits,
            num_clbits,
            ops: Vec::new(),
            written: vec![false; num_clbits],
            recycled: false,
        }
    }

    /// Marks the circuit as running on a recycled register: a measured qubit
    /// is consumed until it is reset.
    pub fn with_recycling(mut self, recycled: bool) -> Self {
        self.recycled = recycled;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn is_recycled(&self) -> bool {
        self.recycled
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.num_qubits {
            return Err(SimError::QubitOutOfRange {
                index: q,
                width: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_clbit(&self, c: usize) -> Result<(), SimError> {
        if c >= self.num_clbits {
            return Err(SimError::ClbitOutOfRange {
                index: c,
                count: self.num_clbits,
            });
        }
        Ok(())
    }

    pub fn push(&mut self, op: Op) -> Result<&mut Self, SimError> {
        let qubits = op.qubits();
        for (k, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..k].contains(&q) {
                return Err(SimError::DuplicateQubit(q));
            }
        }
        match &op {
            Op::Measure { clbit, .. } => {
                self.check_clbit(*clbit)?;
                self.written[*clbit] = true;
            }
            Op::ConditionedPhase { condition, .. } => {
                for &(bit, _) in condition {
                    self.check_clbit(bit)?;
                    if !self.written[bit] {
                        return Err(SimError::UnassignedClbit(bit));
                    }
                }
            }
            Op::Initialize {
                targets,
                amplitudes,
            } if amplitudes.len() != 1 << targets.len() => {
                return Err(SimError::InvalidState(format!(
                    "{} amplitudes for {} qubits",
                    amplitudes.len(),
                    targets.len()
                )));
            }
            _ => {}
        }
        self.ops.push(op);
        Ok(self)
    }

    /// Appends `other`, renaming its qubit `k` to `qubit_map[k]` and its
    /// classical bit `k` to `clbit_map[k]`.
    pub fn append_mapped(
        &mut self,
        other: &Circuit,
        qubit_map: &[usize],
        clbit_map: &[usize],
    ) -> Result<&mut Self, SimError> {
        let q = |k: usize| -> Result<usize, SimError> {
            qubit_map.get(k).copied().ok_or(SimError::QubitOutOfRange {
                index: k,
                width: qubit_map.len(),
            })
        };
        let c = |k: usize| -> Result<usize, SimError> {
            clbit_map.get(k).copied().ok_or(SimError::ClbitOutOfRange {
                index: k,
                count: clbit_map.len(),
            })
        };
        for op in &other.ops {
            let mapped = match op {
                Op::Gate { gate, target } => Op::Gate {
                    gate: gate.clone(),
                    target: q(*target)?,
                },
                Op::Cx { control, target } => Op::Cx {
                    control: q(*control)?,
                    target: q(*target)?,
                },
                Op::ControlledPhase {
                    control,
                    target,
                    phase,
                } => Op::ControlledPhase {
                    control: q(*control)?,
                    target: q(*target)?,
                    phase: *phase,
                },
                Op::Permutation {
                    control,
                    targets,
                    table,
                    label,
                } => Op::Permutation {
                    control: control.map(q).transpose()?,
                    targets: targets.iter().map(|&t| q(t)).collect::<Result<_, _>>()?,
                    table: Arc::clone(table),
                    label: label.clone(),
                },
                Op::Measure { qubit, clbit } => Op::Measure {
                    qubit: q(*qubit)?,
                    clbit: c(*clbit)?,
                },
                Op::ConditionedPhase {
                    condition,
                    phase,
                    target,
                } => Op::ConditionedPhase {
                    condition: condition
                        .iter()
                        .map(|&(b, v)| Ok((c(b)?, v)))
                        .collect::<Result<_, SimError>>()?,
                    phase: *phase,
                    target: q(*target)?,
                },
                Op::Reset { qubit } => Op::Reset { qubit: q(*qubit)? },
                Op::Initialize {
                    targets,
                    amplitudes,
                } => Op::Initialize {
                    targets: targets.iter().map(|&t| q(t)).collect::<Result<_, _>>()?,
                    amplitudes: Arc::clone(amplitudes),
                },
            };
            self.push(mapped)?;
        }
        Ok(self)
    }

    /// Appends `other` on the identity qubit and classical-bit maps.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self, SimError> {
        let qmap: Vec<usize> = (0..other.num_qubits).collect();
        let cmap: Vec<usize> = (0..other.num_clbits).collect();
        self.append_mapped(other, &qmap, &cmap)
    }

    /// Splits off the measurements: returns the unitary ops as a circuit and
    /// the `(qubit, clbit)` pairs, provided every measurement is terminal.
    pub fn split_terminal_measurements(&self) -> Result<(Circuit, Vec<(usize, usize)>), SimError> {
        let mut unitary = Circuit::new(self.num_qubits, 0);
        let mut measured = Vec::new();
        for op in &self.ops {
            match op {
                Op::Measure { qubit, clbit } => measured.push((*qubit, *clbit)),
                _ if !op.is_unitary() => return Err(SimError::NonUnitaryOp(op.name())),
                _ => {
                    if op
                        .qubits()
                        .iter()
                        .any(|q| measured.iter().any(|(m, _)| m == q))
                    {
                        return Err(SimError::NonUnitaryOp("mid-circuit measure"));
                    }
                    unitary.push(op.clone())?;
                }
            }
        }
        Ok((unitary, measured))
    }

    /// Dense unitary of a circuit made only of unitary ops; column `a` is the
    /// image of `|a>`.
    pub fn unitary(&self) -> Result<Array2<Complex64>, SimError> {
        if let Some(op) = self.ops.iter().find(|op| !op.is_unitary()) {
            return Err(SimError::NonUnitaryOp(op.name()));
        }
        let dim = 1usize << self.num_qubits;
        let mut u = Array2::zeros((dim, dim));
        for a in 0..dim {
            let mut state = StateVector::basis(self.num_qubits, a);
            for op in &self.ops {
                super::exec::apply(&mut state, op, &[])?;
            }
            for (row, amp) in state.amplitudes().iter().enumerate() {
                u[[row, a]] = *amp;
            }
        }
        Ok(u)
    }
}
