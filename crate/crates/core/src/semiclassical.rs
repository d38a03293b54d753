//! The t-bit semiclassical QFT.
//!
//! An `n`-bit register is split into one leading block of `n - lt` bits and
//! `l` blocks of `t` bits, where `l = n/t - 1` when `t` divides `n` and
//! `l = ⌊n/t⌋` otherwise. This is the only choice that keeps the leading block
//! non-empty and no wider than `t`.
//!
//! Blocks run most-significant input bits first. Block `j` takes the input bits
//! `[p_j, p_j + s_j)` (`p_0 = lt`, `p_j = (l - j)t`), receives the feedback
//! gates `S_k(φ_j)`, goes through a `s_j`-qubit QFT and is measured into output
//! bits `[q_j, q_j + s_j)` (`q_0 = 0`, `q_j = s_0 + (j - 1)t`). The feedback
//! phase, in cycles, follows
//!
//! ```text
//! φ_1     = c'_0 / 2^{s_0 + 1}
//! φ_{j+1} = φ_j / 2^t + c'_j / 2^{t + 1}
//! ```
//!
//! and `S_k(φ) = diag(1, e^{2πiφ/2^{k-1}})` acts on the block qubit of weight
//! `2^{t-k}`, so the block's most significant qubit gets `S_1`. Quoted in
//! radians instead of cycles these phases pick up a factor `2π`; for `n = 8`,
//! `t = 2`, `2π·φ_1 = (c_0/4 + c_1/2)π`.
//!
//! Two executors share one block program:
//!
//! * **full register** keeps all `n` input qubits live, so arbitrary entangled
//!   inputs can be checked against the DFT;
//! * **recycled** runs on a `t`-qubit register that is measured, reset and
//!   reloaded for every block. Inputs must factor across blocks.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{SemiclassicalError, SimError};
use crate::gates::{self, s_k};
use crate::phase::{Angle, DyadicPhase};
use crate::qft::{build_standard_qft, output_bit, CountLedger};
use crate::sim::{
    gather, scatter, Circuit, Counts, Op, OutcomeDistribution, Simulator, StateVector,
};

/// Partition of `n` bits into a leading block of `n - lt` bits and `l` blocks
/// of `t` bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    n: usize,
    t: usize,
    l: usize,
    block_sizes: Vec<usize>,
}

/// Builds the block partition for an `n`-bit transform on a `t`-qubit register.
pub fn plan_blocks(n: usize, t: usize) -> Result<BlockPlan, SemiclassicalError> {
    if t < 1 || t > n {
        return Err(SemiclassicalError::InvalidBlockWidth { n, t });
    }
    let l = if n.is_multiple_of(t) {
        n / t - 1
    } else {
        n / t
    };
    let mut block_sizes = vec![n - l * t];
    block_sizes.extend(std::iter::repeat_n(t, l));
    Ok(BlockPlan {
        n,
        t,
        l,
        block_sizes,
    })
}

impl BlockPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.l + 1
    }

    pub fn block_size(&self, j: usize) -> usize {
        self.block_sizes[j]
    }

    /// Lowest input bit of block `j`.
    pub fn input_offset(&self, j: usize) -> usize {
        (self.l - j) * self.t
    }

    /// Lowest output bit of block `j`.
    pub fn output_offset(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.block_sizes[0] + (j - 1) * self.t
        }
    }

    fn check_value(&self, value: u64) -> Result<(), SemiclassicalError> {
        if value >> self.n != 0 {
            return Err(SemiclassicalError::ValueOutOfRange {
                value,
                bits: self.n,
            });
        }
        Ok(())
    }

    /// Input block integers `a'_j`, block 0 first.
    pub fn split_input(&self, a: u64) -> Vec<u64> {
        (0..self.num_blocks())
            .map(|j| (a >> self.input_offset(j)) & ((1 << self.block_size(j)) - 1))
            .collect()
    }

    /// Output block integers `c'_j`, block 0 first.
    pub fn split_outcome(&self, c: u64) -> Vec<u64> {
        (0..self.num_blocks())
            .map(|j| (c >> self.output_offset(j)) & ((1 << self.block_size(j)) - 1))
            .collect()
    }

    pub fn join_outcome(&self, blocks: &[u64]) -> u64 {
        blocks
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | b << self.output_offset(j))
    }
}

/// Feedback phase after measuring a block of `block_size` bits with value
/// `measured`.
///
/// The first block ignores `phi_prev` and yields `c'/2^{size+1}`; later blocks
/// yield `phi_prev/2^size + c'/2^{size+1}`. The result is always below half a
/// cycle.
pub fn phi_next(
    phi_prev: DyadicPhase,
    measured: u64,
    block_size: usize,
    is_first: bool,
) -> Result<DyadicPhase, SemiclassicalError> {
    if block_size >= 64 || measured >> block_size != 0 {
        return Err(SemiclassicalError::BlockOutOfRange {
            value: measured,
            bits: block_size,
        });
    }
    let fresh = DyadicPhase::new(measured, block_size as u32 + 1)?;
    if is_first {
        return Ok(fresh);
    }
    let carried = phi_prev.div_pow2(block_size as u32)?;
    let phi = carried.checked_add(fresh)?;
    debug_assert!(phi.cycles() < 0.5);
    Ok(phi)
}

/// One block of the transform on `s_j` local qubits and `s_j` local bits:
/// the feedback gates, the block QFT, then measurement into `c'_j`.
///
/// Feedback gates are omitted when `phi` is zero. Local qubit `r` carries
/// weight `2^r`; local bit `b` receives bit `b` of `c'_j`.
pub fn build_block_step(
    plan: &BlockPlan,
    block_index: usize,
    phi: DyadicPhase,
) -> Result<Circuit, SemiclassicalError> {
    if block_index >= plan.num_blocks() {
        return Err(SemiclassicalError::BlockIndexOutOfRange {
            index: block_index,
            blocks: plan.num_blocks(),
        });
    }
    if block_index == 0 && !phi.is_zero() {
        return Err(SemiclassicalError::FeedbackOnFirstBlock);
    }
    let size = plan.block_size(block_index);
    let mut step = Circuit::new(size, size);
    if !phi.is_zero() {
        for k in 1..=plan.t() {
            let gate = s_k(k as u32, phi).map_err(|e| match e {
                crate::error::GateError::Phase(p) => SemiclassicalError::Phase(p),
                other => SemiclassicalError::Qft(other.into()),
            })?;
            step.push(Op::Gate {
                gate,
                target: plan.t() - k,
            })?;
        }
    }
    step.append(&build_standard_qft(size)?)?;
    for r in 0..size {
        step.push(Op::Measure {
            qubit: r,
            clbit: output_bit(size, r),
        })?;
    }
    Ok(step)
}

/// Record of one sampled pass through the blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiclassicalRun {
    pub plan: BlockPlan,
    pub mode: RegisterMode,
    /// `c'_j`, block 0 first.
    pub blocks: Vec<u64>,
    /// `φ_1 .. φ_l`.
    pub phases: Vec<DyadicPhase>,
    pub outcome: u64,
}

impl SemiclassicalRun {
    /// Rebuilds block values and the feedback trace from a final outcome.
    pub fn from_outcome(
        plan: &BlockPlan,
        mode: RegisterMode,
        outcome: u64,
    ) -> Result<Self, SemiclassicalError> {
        plan.check_value(outcome)?;
        let blocks = plan.split_outcome(outcome);
        Ok(Self {
            plan: plan.clone(),
            mode,
            phases: phase_trace(plan, &blocks)?,
            blocks,
            outcome,
        })
    }
}

/// `φ_1 .. φ_l` implied by the measured blocks.
pub fn phase_trace(
    plan: &BlockPlan,
    blocks: &[u64],
) -> Result<Vec<DyadicPhase>, SemiclassicalError> {
    let mut phi = DyadicPhase::ZERO;
    let mut trace = Vec::with_capacity(plan.l());
    for (j, &b) in blocks.iter().enumerate().take(plan.l()) {
        phi = phi_next(phi, b, plan.block_size(j), j == 0)?;
        trace.push(phi);
    }
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegisterMode {
    FullRegister,
    Recycled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Enumerate,
    Sample { shots: u64, seed: u64 },
}

/// Where block `j` lives and what runs before its feedback gates.
#[derive(Clone, Debug)]
pub struct BlockSlot {
    /// Qubits holding block `j`, least significant first.
    pub qubits: Vec<usize>,
    /// Ops over the whole simulated width that load or prepare the block.
    pub prepare: Circuit,
}

/// A sequence of block steps over a simulated register, shared by the
/// semiclassical transform and order finding.
#[derive(Clone, Debug)]
pub struct BlockProgram {
    plan: BlockPlan,
    width: usize,
    slots: Vec<BlockSlot>,
    recycled: bool,
}

impl BlockProgram {
    pub fn new(plan: BlockPlan, width: usize, slots: Vec<BlockSlot>, recycled: bool) -> Self {
        debug_assert_eq!(slots.len(), plan.num_blocks());
        Self {
            plan,
            width,
            slots,
            recycled,
        }
    }

    pub fn plan(&self) -> &BlockPlan {
        &self.plan
    }

    /// Simulated register width.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Block `j` with its concrete feedback phase, on the full width, writing
    /// `c'_j` into local bits `0..s_j`.
    fn step_circuit(&self, j: usize, phi: DyadicPhase) -> Result<Circuit, SemiclassicalError> {
        let slot = &self.slots[j];
        let size = self.plan.block_size(j);
        let mut circuit = Circuit::new(self.width, size);
        circuit.append_mapped(&slot.prepare, &(0..self.width).collect::<Vec<_>>(), &[])?;
        let step = build_block_step(&self.plan, j, phi)?;
        circuit.append_mapped(&step, &slot.qubits, &(0..size).collect::<Vec<_>>())?;
        Ok(circuit)
    }

    /// Exact outcome distribution, walking every block outcome with its own
    /// feedback trace.
    ///
    /// Refuses up front when `2^n` outcomes could exceed the simulator's
    /// branch cap.
    pub fn enumerate(
        &self,
        input: &StateVector,
        sim: &Simulator,
    ) -> Result<OutcomeDistribution, SemiclassicalError> {
        if self.plan.n() >= usize::BITS as usize || 1usize << self.plan.n() > sim.branch_cap() {
            return Err(SimError::BranchCapExceeded {
                cap: sim.branch_cap(),
            }
            .into());
        }
        let mut acc = BTreeMap::new();
        let mut leaves = 0usize;
        self.walk(
            0,
            input.clone(),
            DyadicPhase::ZERO,
            0,
            1.0,
            sim,
            &mut leaves,
            &mut acc,
        )?;
        Ok(OutcomeDistribution::new(self.plan.n(), acc)?)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        j: usize,
        state: StateVector,
        phi: DyadicPhase,
        prefix: u64,
        weight: f64,
        sim: &Simulator,
        leaves: &mut usize,
        acc: &mut BTreeMap<u64, f64>,
    ) -> Result<(), SemiclassicalError> {
        let size = self.plan.block_size(j);
        let step = self.step_circuit(j, phi)?;
        let branches = sim.branches(&step, state, vec![None; size])?;
        for branch in branches {
            let block = branch.outcome()?;
            let outcome = prefix | block << self.plan.output_offset(j);
            let probability = weight * branch.probability;
            if j == self.plan.l() {
                *leaves += 1;
                if *leaves > sim.branch_cap() {
                    return Err(SimError::BranchCapExceeded {
                        cap: sim.branch_cap(),
                    }
                    .into());
                }
                *acc.entry(outcome).or_insert(0.0) += probability;
            } else {
                let next = phi_next(phi, block, size, j == 0)?;
                self.walk(
                    j + 1,
                    branch.state,
                    next,
                    outcome,
                    probability,
                    sim,
                    leaves,
                    acc,
                )?;
            }
        }
        Ok(())
    }

    /// Seeded shots, each a full pass with its own feedback trace.
    pub fn sample_runs(
        &self,
        input: &StateVector,
        shots: u64,
        seed: u64,
        sim: &Simulator,
    ) -> Result<Vec<SemiclassicalRun>, SemiclassicalError> {
        if shots == 0 {
            return Err(SimError::ZeroShots.into());
        }
        let mode = if self.recycled {
            RegisterMode::Recycled
        } else {
            RegisterMode::FullRegister
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut runs = Vec::with_capacity(shots as usize);
        for _ in 0..shots {
            let mut state = input.clone();
            let mut phi = DyadicPhase::ZERO;
            let mut blocks = Vec::with_capacity(self.plan.num_blocks());
            let mut phases = Vec::with_capacity(self.plan.l());
            for j in 0..self.plan.num_blocks() {
                let size = self.plan.block_size(j);
                let step = self.step_circuit(j, phi)?;
                let (next_state, bits) = sim.run_shot(&step, &state, vec![None; size], &mut rng)?;
                let block = bits
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (b, v)| acc | (v.unwrap_or(false) as u64) << b);
                state = next_state;
                blocks.push(block);
                if j < self.plan.l() {
                    phi = phi_next(phi, block, size, j == 0)?;
                    phases.push(phi);
                }
            }
            runs.push(SemiclassicalRun {
                plan: self.plan.clone(),
                mode,
                outcome: self.plan.join_outcome(&blocks),
                blocks,
                phases,
            });
        }
        Ok(runs)
    }

    /// The whole program as one circuit with `n` classical bits, the feedback
    /// realized as phases conditioned on single earlier bits.
    pub fn to_circuit(&self) -> Result<Circuit, SemiclassicalError> {
        let plan = &self.plan;
        let mut circuit = Circuit::new(self.width, plan.n()).with_recycling(self.recycled);
        for (j, slot) in self.slots.iter().enumerate() {
            circuit.append_mapped(&slot.prepare, &(0..self.width).collect::<Vec<_>>(), &[])?;
            let size = plan.block_size(j);
            if j > 0 {
                for op in feedback_ops(plan, j, &slot.qubits)? {
                    circuit.push(op)?;
                }
            }
            let ladder = build_standard_qft(size)?;
            circuit.append_mapped(&ladder, &slot.qubits, &[])?;
            for r in 0..size {
                circuit.push(Op::Measure {
                    qubit: slot.qubits[r],
                    clbit: plan.output_offset(j) + output_bit(size, r),
                })?;
            }
        }
        Ok(circuit)
    }
}

/// Per-bit conditioned phases equal to `S_1(φ_j) … S_t(φ_j)` for every value
/// of the earlier outcome bits.
///
/// Qubit of weight `2^w` needs `e^{2πi·2^w·φ_j/2^{t-1}}` and
/// `φ_j = Σ_{b < q_j} c_b 2^b / 2^{q_j+1}`, so bit `b` contributes
/// `2^{b+w} / 2^{q_j+t}` cycles.
fn feedback_ops(
    plan: &BlockPlan,
    j: usize,
    qubits: &[usize],
) -> Result<Vec<Op>, SemiclassicalError> {
    let q = plan.output_offset(j);
    let t = plan.t();
    let mut ops = Vec::new();
    for k in 1..=t {
        let w = t - k;
        for b in 0..q {
            let exponent = (q + t - b - w) as u32;
            ops.push(Op::ConditionedPhase {
                condition: vec![(b, true)],
                phase: DyadicPhase::new(1, exponent)?,
                target: qubits[w],
            });
        }
    }
    Ok(ops)
}

/// Full-register program: all `n` input qubits stay live.
pub fn full_register_program(plan: &BlockPlan) -> BlockProgram {
    let n = plan.n();
    let slots = (0..plan.num_blocks())
        .map(|j| BlockSlot {
            qubits: (plan.input_offset(j)..plan.input_offset(j) + plan.block_size(j)).collect(),
            prepare: Circuit::new(n, 0),
        })
        .collect();
    BlockProgram::new(plan.clone(), n, slots, false)
}

/// Recycled program on a `t`-qubit register, loading each block state in turn
/// and resetting the register between blocks. The program runs on `|0...0>`.
pub fn recycled_program(
    plan: &BlockPlan,
    block_states: &[StateVector],
) -> Result<BlockProgram, SemiclassicalError> {
    let width = plan.t();
    let mut slots = Vec::with_capacity(plan.num_blocks());
    for j in 0..plan.num_blocks() {
        let size = plan.block_size(j);
        let qubits: Vec<usize> = (0..size).collect();
        let mut prepare = Circuit::new(width, 0);
        if j > 0 {
            for q in 0..plan.block_size(j - 1) {
                prepare.push(Op::Reset { qubit: q })?;
            }
        }
        for op in load_ops(&block_states[j], &qubits)? {
            prepare.push(op)?;
        }
        slots.push(BlockSlot { qubits, prepare });
    }
    Ok(BlockProgram::new(plan.clone(), width, slots, true))
}

/// Splits a state into per-block factors, block 0 first, or fails when the
/// state is entangled across blocks.
pub fn factor_blocks(
    input: &StateVector,
    plan: &BlockPlan,
) -> Result<Vec<StateVector>, SemiclassicalError> {
    if input.width() != plan.n() {
        return Err(SimError::WidthMismatch {
            expected: plan.n(),
            found: input.width(),
        }
        .into());
    }
    let amps = input.amplitudes();
    let pivot = amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut factors = Vec::with_capacity(plan.num_blocks());
    for j in 0..plan.num_blocks() {
        let qubits: Vec<usize> =
            (plan.input_offset(j)..plan.input_offset(j) + plan.block_size(j)).collect();
        let mask = scatter((1 << qubits.len()) - 1, &qubits);
        let slice = (0..1usize << qubits.len())
            .map(|y| amps[(pivot & !mask) | scatter(y, &qubits)])
            .collect();
        factors.push(StateVector::from_unnormalized(slice)?);
    }
    // ψ must equal the product of its block slices up to a global phase
    let overlap: Complex64 = amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let product: Complex64 = factors
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    let qubits: Vec<usize> =
                        (plan.input_offset(j)..plan.input_offset(j) + plan.block_size(j)).collect();
                    f.amplitudes()[gather(i, &qubits)]
                })
                .product();
            a.conj() * product
        })
        .sum();
    if (overlap.norm() - 1.0).abs() > 1e-10 {
        return Err(SemiclassicalError::NotStreamable);
    }
    Ok(factors)
}

/// Gates that prepare `state` on `qubits` from `|0...0>`: X gates for a basis
/// state, one U3 per qubit for a product state, otherwise a raw load.
pub fn load_ops(state: &StateVector, qubits: &[usize]) -> Result<Vec<Op>, SemiclassicalError> {
    let amps = state.amplitudes();
    if let Some(index) = amps
        .iter()
        .position(|a| (a.norm_sqr() - 1.0).abs() <= 1e-12)
    {
        return Ok(qubits
            .iter()
            .enumerate()
            .filter(|(k, _)| index >> k & 1 == 1)
            .map(|(_, &q)| Op::Gate {
                gate: gates::x(),
                target: q,
            })
            .collect());
    }
    if let Some(per_qubit) = factor_qubits(state) {
        let mut ops = Vec::new();
        for (k, (alpha, beta)) in per_qubit.into_iter().enumerate() {
            if beta.norm() <= 1e-15 {
                continue;
            }
            // (α, β) ~ (cos θ/2, e^{iφ} sin θ/2) up to a global phase
            let theta = 2.0 * beta.norm().atan2(alpha.norm());
            let phi = beta.arg()
                - if alpha.norm() > 1e-15 {
                    alpha.arg()
                } else {
                    0.0
                };
            ops.push(Op::Gate {
                gate: gates::u3(Angle::Radians(theta), Angle::ZERO, Angle::Radians(phi)),
                target: qubits[k],
            });
        }
        return Ok(ops);
    }
    Ok(vec![Op::Initialize {
        targets: qubits.to_vec(),
        amplitudes: Arc::new(amps.to_vec()),
    }])
}

/// Single-qubit factors `(α_k, β_k)` of a product state, or `None`.
fn factor_qubits(state: &StateVector) -> Option<Vec<(Complex64, Complex64)>> {
    let plan = plan_blocks(state.width(), 1).ok()?;
    let blocks = factor_blocks(state, &plan).ok()?;
    // plan with t = 1 lists qubits from most to least significant
    let mut factors: Vec<(Complex64, Complex64)> = blocks
        .iter()
        .map(|b| (b.amplitudes()[0], b.amplitudes()[1]))
        .collect();
    factors.reverse();
    Some(factors)
}

/// Runs the semiclassical transform on `input`.
///
/// In enumerate mode the result equals `|DFT·ψ|²`; in sample mode it holds
/// empirical frequencies.
pub fn run_semiclassical(
    input: &StateVector,
    plan: &BlockPlan,
    mode: RegisterMode,
    execution: Execution,
) -> Result<OutcomeDistribution, SemiclassicalError> {
    let sim = Simulator::default();
    let (program, start) = program_for(input, plan, mode)?;
    match execution {
        Execution::Enumerate => program.enumerate(&start, &sim),
        Execution::Sample { shots, seed } => {
            let runs = program.sample_runs(&start, shots, seed, &sim)?;
            let outcomes: Vec<u64> = runs.iter().map(|r| r.outcome).collect();
            Ok(Counts::from_outcomes(plan.n(), &outcomes).to_distribution())
        }
    }
}

/// The block program for `mode` and the state it starts from.
pub fn program_for(
    input: &StateVector,
    plan: &BlockPlan,
    mode: RegisterMode,
) -> Result<(BlockProgram, StateVector), SemiclassicalError> {
    if input.width() != plan.n() {
        return Err(SimError::WidthMismatch {
            expected: plan.n(),
            found: input.width(),
        }
        .into());
    }
    match mode {
        RegisterMode::FullRegister => Ok((full_register_program(plan), input.clone())),
        RegisterMode::Recycled => {
            let blocks = factor_blocks(input, plan)?;
            let program = recycled_program(plan, &blocks)?;
            Ok((program, StateVector::zero(plan.t())))
        }
    }
}

/// Amplitude of outcome `c` given basis input `a`, accumulated block by block
/// from the block kernels `ω_{2^{s_j}}^{a'_j c'_j} / 2^{s_j/2}` and the feedback
/// factors `e^{2πi·a'_j·φ_j/2^{t-1}}`.
pub fn branch_phase(a: u64, c: u64, plan: &BlockPlan) -> Result<Complex64, SemiclassicalError> {
    plan.check_value(a)?;
    plan.check_value(c)?;
    let inputs = plan.split_input(a);
    let outputs = plan.split_outcome(c);
    let mut amplitude = Complex64::new(1.0, 0.0);
    let mut phi = DyadicPhase::ZERO;
    for j in 0..plan.num_blocks() {
        let size = plan.block_size(j);
        let kernel = DyadicPhase::wrapping(inputs[j] * outputs[j], size as u32)?;
        let feedback = if j == 0 {
            DyadicPhase::ZERO
        } else {
            phi.div_pow2(plan.t() as u32 - 1)?.mul_int(inputs[j])
        };
        let scale = (2f64).powf(-(size as f64) / 2.0);
        amplitude *= kernel.checked_add(feedback)?.to_unit() * scale;
        phi = phi_next(phi, outputs[j], size, j == 0)?;
    }
    Ok(amplitude)
}

/// Closed-form resource figures for a recycled run.
///
/// Two-qubit gates are the controlled phases inside the block transforms,
/// before lowering. Single-qubit gates are the `n` Hadamards plus one `S_k`
/// per qubit of each fed-back block.
pub fn recycled_execution_ledger(plan: &BlockPlan, extra_work_qubits: usize) -> CountLedger {
    let (t, l, n) = (plan.t(), plan.l(), plan.n());
    let first = plan.block_size(0);
    let two_qubit = l * t * (t - 1) / 2 + first * (first.max(1) - 1) / 2;
    CountLedger {
        single_qubit: n + l * t,
        two_qubit,
        multi_qubit: 0,
        measurements: n,
        peak_register_width: t + extra_work_qubits,
        steps: l + 1,
        two_qubit_with_swaps: two_qubit,
    }
}
