use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;

use super::circuit::{Circuit, Op};
use super::distribution::{Counts, OutcomeDistribution};
use super::state::StateVector;

/// Default ceiling on the number of live measurement branches.
pub const DEFAULT_BRANCH_CAP: usize = 1 << 16;

/// Branches lighter than this are dropped during enumeration.
const PRUNE_PROBABILITY: f64 = 1e-24;

/// Applies a deterministic operation. `Measure` and `Reset` need either a
/// branch walker or an RNG and are rejected here.
pub fn apply(state: &mut StateVector, op: &Op, clbits: &[Option<bool>]) -> Result<(), SimError> {
    for q in op.qubits() {
        state.check_qubit(q)?;
    }
    match op {
        Op::Gate { gate, target } => state.apply_single(gate.matrix(), *target),
        Op::Cx { control, target } => state.apply_cx(*control, *target),
        Op::ControlledPhase {
            control,
            target,
            phase,
        } => state.apply_phase_on_mask((1 << control) | (1 << target), phase.to_unit()),
        Op::Permutation {
            control,
            targets,
            table,
            ..
        } => state.apply_permutation(*control, targets, table),
        Op::ConditionedPhase {
            condition,
            phase,
            target,
        } => {
            if condition_holds(condition, clbits)? {
                state.apply_phase_on_mask(1 << target, phase.to_unit());
            }
        }
        Op::Initialize {
            targets,
            amplitudes,
        } => state.initialize(targets, amplitudes)?,
        Op::Measure { .. } | Op::Reset { .. } => return Err(SimError::NonUnitaryOp(op.name())),
    }
    Ok(())
}

fn condition_holds(condition: &[(usize, bool)], clbits: &[Option<bool>]) -> Result<bool, SimError> {
    for &(bit, value) in condition {
        match clbits.get(bit) {
            None => {
                return Err(SimError::ClbitOutOfRange {
                    index: bit,
                    count: clbits.len(),
                })
            }
            Some(None) => return Err(SimError::UnassignedClbit(bit)),
            Some(Some(b)) if *b != value => return Ok(false),
            Some(Some(_)) => {}
        }
    }
    Ok(true)
}

/// One leaf of the measurement tree.
#[derive(Clone, Debug)]
pub struct Branch {
    pub probability: f64,
    pub state: StateVector,
    pub clbits: Vec<Option<bool>>,
}

impl Branch {
    /// `c = Σ 2^j c_j` over all classical bits.
    pub fn outcome(&self) -> Result<u64, SimError> {
        assemble_outcome(&self.clbits)
    }
}

fn assemble_outcome(clbits: &[Option<bool>]) -> Result<u64, SimError> {
    clbits
        .iter()
        .enumerate()
        .try_fold(0u64, |acc, (j, b)| match b {
            Some(true) => Ok(acc | 1 << j),
            Some(false) => Ok(acc),
            None => Err(SimError::UnassignedClbit(j)),
        })
}

struct Walker {
    pc: usize,
    branch: Branch,
    consumed: Vec<bool>,
}

/// Executes circuits either by exact branch enumeration or by seeded
/// shot sampling.
#[derive(Clone, Copy, Debug)]
pub struct Simulator {
    branch_cap: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self {
            branch_cap: DEFAULT_BRANCH_CAP,
        }
    }
}

impl Simulator {
    pub fn with_branch_cap(branch_cap: usize) -> Self {
        Self { branch_cap }
    }

    pub fn branch_cap(&self) -> usize {
        self.branch_cap
    }

    fn check_width(circuit: &Circuit, input: &StateVector) -> Result<(), SimError> {
        if circuit.num_qubits() != input.width() {
            return Err(SimError::WidthMismatch {
                expected: circuit.num_qubits(),
                found: input.width(),
            });
        }
        Ok(())
    }

    /// Walks every measurement outcome with its Born weight. Each branch owns
    /// its state copy; the walk is depth first and deterministic.
    pub fn branches(
        &self,
        circuit: &Circuit,
        input: StateVector,
        clbits: Vec<Option<bool>>,
    ) -> Result<Vec<Branch>, SimError> {
        Self::check_width(circuit, &input)?;
        if clbits.len() != circuit.num_clbits() {
            return Err(SimError::ClbitOutOfRange {
                index: clbits.len(),
                count: circuit.num_clbits(),
            });
        }
        let recycled = circuit.is_recycled();
        let ops = circuit.ops();
        let mut live = 1usize;
        let mut leaves = Vec::new();
        let mut stack = vec![Walker {
            pc: 0,
            branch: Branch {
                probability: 1.0,
                state: input,
                clbits,
            },
            consumed: vec![false; circuit.num_qubits()],
        }];

        while let Some(mut w) = stack.pop() {
            while w.pc < ops.len() {
                let op = &ops[w.pc];
                w.pc += 1;
                if recycled {
                    check_consumed(op, &w.consumed)?;
                }
                let (qubit, clbit) = match *op {
                    Op::Measure { qubit, clbit } => (qubit, Some(clbit)),
                    Op::Reset { qubit } => (qubit, None),
                    _ => {
                        apply(&mut w.branch.state, op, &w.branch.clbits)?;
                        continue;
                    }
                };
                let (p0, p1) = w.branch.state.outcome_probabilities(qubit);
                let keep = [p0 > PRUNE_PROBABILITY, p1 > PRUNE_PROBABILITY];
                if keep[0] && keep[1] {
                    live += 1;
                    if live > self.branch_cap {
                        return Err(SimError::BranchCapExceeded {
                            cap: self.branch_cap,
                        });
                    }
                    let mut other = Walker {
                        pc: w.pc,
                        branch: w.branch.clone(),
                        consumed: w.consumed.clone(),
                    };
                    settle(&mut other, qubit, clbit, true, p1);
                    stack.push(other);
                    settle(&mut w, qubit, clbit, false, p0);
                } else if keep[1] {
                    settle(&mut w, qubit, clbit, true, p1);
                } else {
                    settle(&mut w, qubit, clbit, false, p0);
                }
            }
            leaves.push(w.branch);
        }
        Ok(leaves)
    }

    /// Exact distribution over all classical bits.
    pub fn enumerate(
        &self,
        circuit: &Circuit,
        input: &StateVector,
    ) -> Result<OutcomeDistribution, SimError> {
        let leaves = self.branches(circuit, input.clone(), vec![None; circuit.num_clbits()])?;
        let mut probs = BTreeMap::new();
        for leaf in &leaves {
            *probs.entry(leaf.outcome()?).or_insert(0.0) += leaf.probability;
        }
        OutcomeDistribution::new(circuit.num_clbits(), probs)
    }

    /// One shot by sequential Born-rule collapse; returns the final state and
    /// classical record.
    pub fn run_shot<R: Rng + ?Sized>(
        &self,
        circuit: &Circuit,
        input: &StateVector,
        clbits: Vec<Option<bool>>,
        rng: &mut R,
    ) -> Result<(StateVector, Vec<Option<bool>>), SimError> {
        Self::check_width(circuit, input)?;
        let mut w = Walker {
            pc: 0,
            branch: Branch {
                probability: 1.0,
                state: input.clone(),
                clbits,
            },
            consumed: vec![false; circuit.num_qubits()],
        };
        for op in circuit.ops() {
            if circuit.is_recycled() {
                check_consumed(op, &w.consumed)?;
            }
            let (qubit, clbit) = match *op {
                Op::Measure { qubit, clbit } => (qubit, Some(clbit)),
                Op::Reset { qubit } => (qubit, None),
                _ => {
                    apply(&mut w.branch.state, op, &w.branch.clbits)?;
                    continue;
                }
            };
            let (p0, p1) = w.branch.state.outcome_probabilities(qubit);
            let one = rng.random::<f64>() * (p0 + p1) >= p0;
            settle(&mut w, qubit, clbit, one, if one { p1 } else { p0 });
        }
        Ok((w.branch.state, w.branch.clbits))
    }

    /// Outcomes of `shots` independent shots, in shot order.
    pub fn sample_shots(
        &self,
        circuit: &Circuit,
        input: &StateVector,
        shots: u64,
        seed: u64,
    ) -> Result<Vec<u64>, SimError> {
        if shots == 0 {
            return Err(SimError::ZeroShots);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..shots)
            .map(|_| {
                let (_, clbits) =
                    self.run_shot(circuit, input, vec![None; circuit.num_clbits()], &mut rng)?;
                assemble_outcome(&clbits)
            })
            .collect()
    }

    pub fn sample(
        &self,
        circuit: &Circuit,
        input: &StateVector,
        shots: u64,
        seed: u64,
    ) -> Result<Counts, SimError> {
        let outcomes = self.sample_shots(circuit, input, shots, seed)?;
        Ok(Counts::from_outcomes(circuit.num_clbits(), &outcomes))
    }
}

fn check_consumed(op: &Op, consumed: &[bool]) -> Result<(), SimError> {
    if matches!(op, Op::Reset { .. }) {
        return Ok(());
    }
    match op.qubits().into_iter().find(|&q| consumed[q]) {
        Some(q) => Err(SimError::ConsumedQubit(q)),
        None => Ok(()),
    }
}

fn settle(w: &mut Walker, qubit: usize, clbit: Option<usize>, outcome: bool, p: f64) {
    w.branch.state.project(qubit, outcome, p);
    w.branch.probability *= p;
    match clbit {
        Some(c) => {
            w.branch.clbits[c] = Some(outcome);
            w.consumed[qubit] = true;
        }
        None => {
            if outcome {
                w.branch.state.flip(qubit);
            }
            w.consumed[qubit] = false;
        }
    }
}

/// Exact outcome distribution with the default branch cap.
pub fn enumerate_branches(
    circuit: &Circuit,
    input: &StateVector,
) -> Result<OutcomeDistribution, SimError> {
    Simulator::default().enumerate(circuit, input)
}

/// Seeded shot counts with the default simulator.
pub fn sample(
    circuit: &Circuit,
    input: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<Counts, SimError> {
    Simulator::default().sample(circuit, input, shots, seed)
}

/// `<a|b>`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Complex64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::phase::DyadicPhase;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &StateVector, b: &[Complex64]) -> bool {
        a.amplitudes()
            .iter()
            .zip(b)
            .all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1);
        apply(
            &mut s,
            &Op::Gate {
                gate: gates::h(),
                target: 0,
            },
            &[],
        )
        .unwrap();
        assert!(close(&s, &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]));
    }

    #[test]
    fn cx_truth_table() {
        // |10> means qubit 1 set: index 2
        let mut s = StateVector::basis(2, 0b10);
        apply(
            &mut s,
            &Op::Cx {
                control: 1,
                target: 0,
            },
            &[],
        )
        .unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11));
    }

    #[test]
    fn conditioned_phase_fires_on_set_bit() {
        let op = Op::ConditionedPhase {
            condition: vec![(0, true)],
            phase: DyadicPhase::new(1, 2).unwrap(),
            target: 0,
        };
        let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let mut s = StateVector::from_amplitudes(plus.to_vec()).unwrap();
        apply(&mut s, &op, &[Some(true)]).unwrap();
        assert!(close(&s, &[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]));

        let mut s = StateVector::from_amplitudes(plus.to_vec()).unwrap();
        apply(&mut s, &op, &[Some(false)]).unwrap();
        assert!(close(&s, &plus));

        assert_eq!(
            apply(&mut s, &op, &[None]).unwrap_err(),
            SimError::UnassignedClbit(0)
        );
    }

    #[test]
    fn measurement_distributions() {
        let mut circ = Circuit::new(1, 1);
        circ.push(Op::Gate {
            gate: gates::h(),
            target: 0,
        })
        .unwrap();
        circ.push(Op::Measure { qubit: 0, clbit: 0 }).unwrap();
        let d = enumerate_branches(&circ, &StateVector::zero(1)).unwrap();
        assert!((d.probability(0) - 0.5).abs() < 1e-15);
        assert!((d.probability(1) - 0.5).abs() < 1e-15);

        let mut m = Circuit::new(1, 1);
        m.push(Op::Measure { qubit: 0, clbit: 0 }).unwrap();
        let d = enumerate_branches(&m, &StateVector::basis(1, 1)).unwrap();
        assert_eq!(d.as_map(), &BTreeMap::from([(1, 1.0)]));
        let shot = sample(&m, &StateVector::basis(1, 1), 1, 3).unwrap();
        assert_eq!(shot.counts, BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn sampling_is_seeded_and_concentrates() {
        let mut circ = Circuit::new(1, 1);
        circ.push(Op::Gate {
            gate: gates::h(),
            target: 0,
        })
        .unwrap();
        circ.push(Op::Measure { qubit: 0, clbit: 0 }).unwrap();
        let a = sample(&circ, &StateVector::zero(1), 8192, 11).unwrap();
        let b = sample(&circ, &StateVector::zero(1), 8192, 11).unwrap();
        assert_eq!(a, b);
        let p0 = a.to_distribution().probability(0);
        assert!((p0 - 0.5).abs() <= 0.02, "p0 = {p0}");
    }

    #[test]
    fn branch_cap_is_enforced() {
        let mut circ = Circuit::new(3, 3);
        for q in 0..3 {
            circ.push(Op::Gate {
                gate: gates::h(),
                target: q,
            })
            .unwrap();
        }
        for q in 0..3 {
            circ.push(Op::Measure { qubit: q, clbit: q }).unwrap();
        }
        let sim = Simulator::with_branch_cap(4);
        assert_eq!(
            sim.enumerate(&circ, &StateVector::zero(3)).unwrap_err(),
            SimError::BranchCapExceeded { cap: 4 }
        );
        assert!(Simulator::with_branch_cap(8)
            .enumerate(&circ, &StateVector::zero(3))
            .is_ok());
    }

    #[test]
    fn recycled_register_rejects_reuse_without_reset() {
        let mut circ = Circuit::new(1, 2).with_recycling(true);
        circ.push(Op::Measure { qubit: 0, clbit: 0 }).unwrap();
        circ.push(Op::Measure { qubit: 0, clbit: 1 }).unwrap();
        assert_eq!(
            enumerate_branches(&circ, &StateVector::zero(1)).unwrap_err(),
            SimError::ConsumedQubit(0)
        );

        let mut ok = Circuit::new(1, 2).with_recycling(true);
        ok.push(Op::Gate {
            gate: gates::x(),
            target: 0,
        })
        .unwrap();
        ok.push(Op::Measure { qubit: 0, clbit: 0 }).unwrap();
        ok.push(Op::Reset { qubit: 0 }).unwrap();
        ok.push(Op::Measure { qubit: 0, clbit: 1 }).unwrap();
        let d = enumerate_branches(&ok, &StateVector::zero(1)).unwrap();
        assert_eq!(d.as_map(), &BTreeMap::from([(1, 1.0)]));
    }

    #[test]
    fn reset_of_superposition_mixes_without_recording() {
        let mut circ = Circuit::new(1, 1);
        circ.push(Op::Gate {
            gate: gates::h(),
            target: 0,
        })
        .unwrap();
        circ.push(Op::Reset { qubit: 0 }).unwrap();
        circ.push(Op::Measure { qubit: 0, clbit: 0 }).unwrap();
        let d = enumerate_branches(&circ, &StateVector::zero(1)).unwrap();
        assert!((d.probability(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let circ = Circuit::new(2, 0);
        assert!(matches!(
            enumerate_branches(&circ, &StateVector::zero(1)),
            Err(SimError::WidthMismatch {
                expected: 2,
                found: 1
            })
        ));
    }
}
