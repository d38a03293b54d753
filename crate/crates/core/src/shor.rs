//! Order finding and factoring on the recycled semiclassical register.
//!
//! The exponent register has `n = 2⌈log₂N⌉` bits and is never held at once:
//! each `t`-bit block is prepared with Hadamards on a fresh register, drives
//! controlled multiplications of the work register by `x^{2^k} mod N`, then
//! goes through the fed-back block transform and is measured. The work
//! register (`⌈log₂N⌉` qubits, starting at `|1>`) is never measured.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{ShorError, SimError};
use crate::gates;
use crate::qft::CountLedger;
use crate::semiclassical::{
    plan_blocks, recycled_execution_ledger, BlockPlan, BlockProgram, BlockSlot, Execution,
};
use crate::sim::{Circuit, Counts, Op, OutcomeDistribution, Simulator, StateVector};

/// How the controlled multiplications are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Multiplier {
    /// Basis permutation of the whole work register.
    #[default]
    Permutation,
    /// Two-CNOT multiplier by 11 modulo 15, exact on `{|1>, |11>}`.
    Compiled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShorConfig {
    pub modulus: u64,
    pub base: u64,
    pub n: usize,
    pub t: usize,
    pub work_qubits: usize,
    pub multiplier: Multiplier,
}

impl ShorConfig {
    /// Validates `N` and `x` and sizes both registers.
    pub fn new(modulus: u64, base: u64, t: usize) -> Result<Self, ShorError> {
        if modulus < 9 || modulus.is_multiple_of(2) || is_prime(modulus) {
            return Err(ShorError::BadModulus(modulus));
        }
        if let Some(p) = prime_power_base(modulus) {
            return Err(ShorError::PrimePower { n: modulus, p });
        }
        if base < 2 || base >= modulus {
            return Err(ShorError::BadBase {
                x: base,
                n: modulus,
            });
        }
        let g = gcd(base, modulus);
        if g != 1 {
            return Err(ShorError::SharedFactor(g));
        }
        let work_qubits = ceil_log2(modulus);
        let n = 2 * work_qubits;
        plan_blocks(n, t)?;
        Ok(Self {
            modulus,
            base,
            n,
            t,
            work_qubits,
            multiplier: Multiplier::Permutation,
        })
    }

    pub fn with_multiplier(mut self, multiplier: Multiplier) -> Result<Self, ShorError> {
        if multiplier == Multiplier::Compiled && (self.modulus, self.base) != (15, 11) {
            return Err(ShorError::NoCompiledCircuit);
        }
        self.multiplier = multiplier;
        Ok(self)
    }

    pub fn plan(&self) -> BlockPlan {
        plan_blocks(self.n, self.t).expect("checked in ShorConfig::new")
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc = 1u128 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Least `r ≥ 1` with `x^r ≡ 1 (mod N)`, by brute force.
pub fn multiplicative_order(x: u64, modulus: u64) -> Option<u64> {
    if gcd(x, modulus) != 1 {
        return None;
    }
    let mut y = x % modulus;
    for r in 1..=modulus {
        if y == 1 {
            return Some(r);
        }
        y = (y as u128 * x as u128 % modulus as u128) as u64;
    }
    None
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn prime_power_base(n: u64) -> Option<u64> {
    (2..).take_while(|p| p * p <= n).find(|&p| {
        if !n.is_multiple_of(p) || !is_prime(p) {
            return false;
        }
        let mut m = n;
        while m.is_multiple_of(p) {
            m /= p;
        }
        m == 1
    })
}

fn ceil_log2(n: u64) -> usize {
    (64 - (n - 1).leading_zeros()) as usize
}

/// Controlled multiplication `|y> -> |y·x^{2^k} mod N>` for `y < N`, identity
/// on `y ≥ N`, over `work` (least significant first).
pub fn modexp_permutation(
    base: u64,
    modulus: u64,
    exponent_bit: u32,
    control: Option<usize>,
    work: &[usize],
) -> Result<Op, ShorError> {
    let g = gcd(base, modulus);
    if g != 1 {
        return Err(ShorError::SharedFactor(g));
    }
    let dim = 1usize << work.len();
    if (dim as u64) < modulus {
        return Err(SimError::BadPermutation {
            expected: modulus as usize,
            found: dim,
        }
        .into());
    }
    let factor = pow_mod(base, 1u64 << exponent_bit, modulus);
    let table = (0..dim)
        .map(|y| {
            if (y as u64) < modulus {
                (y as u64 * factor % modulus) as usize
            } else {
                y
            }
        })
        .collect();
    Ok(Op::permutation(
        control,
        work.to_vec(),
        table,
        format!("×{factor} mod {modulus}"),
    )?)
}

/// Multiplication by 11 modulo 15 on four work qubits, valid on `{|1>, |11>}`:
/// `|0001> <-> |1011>` is a flip of bits 1 and 3.
pub fn compiled_mult11_mod15() -> Circuit {
    let mut c = Circuit::new(4, 0);
    for q in [1, 3] {
        c.push(Op::Gate {
            gate: gates::x(),
            target: q,
        })
        .expect("static circuit");
    }
    c
}

/// The multiplier controlled on `control`: one CX per flipped work bit.
pub fn controlled_mult11_mod15(control: usize, work: &[usize]) -> Vec<Op> {
    [1, 3]
        .into_iter()
        .map(|k| Op::Cx {
            control,
            target: work[k],
        })
        .collect()
}

/// The recycled order-finding program and its `|0...0>` start state.
///
/// Register qubits are `0..t`, work qubits `t..t+w`.
pub fn order_finding_program(cfg: &ShorConfig) -> Result<(BlockProgram, StateVector), ShorError> {
    let plan = cfg.plan();
    let width = cfg.t + cfg.work_qubits;
    let work: Vec<usize> = (cfg.t..width).collect();
    let mut slots = Vec::with_capacity(plan.num_blocks());
    for j in 0..plan.num_blocks() {
        let size = plan.block_size(j);
        let qubits: Vec<usize> = (0..size).collect();
        let mut prepare = Circuit::new(width, 0);
        if j == 0 {
            prepare.push(Op::Gate {
                gate: gates::x(),
                target: work[0],
            })?;
        } else {
            for q in 0..plan.block_size(j - 1) {
                prepare.push(Op::Reset { qubit: q })?;
            }
        }
        for &q in &qubits {
            prepare.push(Op::Gate {
                gate: gates::h(),
                target: q,
            })?;
        }
        for (i, &q) in qubits.iter().enumerate() {
            let bit = (plan.input_offset(j) + i) as u32;
            match cfg.multiplier {
                Multiplier::Permutation => {
                    prepare.push(modexp_permutation(
                        cfg.base,
                        cfg.modulus,
                        bit,
                        Some(q),
                        &work,
                    )?)?;
                }
                Multiplier::Compiled => {
                    // 11^{2^k} ≡ 1 (mod 15) for k ≥ 1
                    if bit == 0 {
                        for op in controlled_mult11_mod15(q, &work) {
                            prepare.push(op)?;
                        }
                    }
                }
            }
        }
        slots.push(BlockSlot { qubits, prepare });
    }
    Ok((
        BlockProgram::new(plan, width, slots, true),
        StateVector::zero(width),
    ))
}

/// Distribution of the measured integer `c ∈ [0, 2^n)`.
pub fn run_order_finding(
    cfg: &ShorConfig,
    execution: Execution,
) -> Result<OutcomeDistribution, ShorError> {
    let sim = Simulator::default();
    let (program, start) = order_finding_program(cfg)?;
    match execution {
        Execution::Enumerate => Ok(program.enumerate(&start, &sim)?),
        Execution::Sample { shots, seed } => {
            let outcomes = sample_outcomes(cfg, shots, seed)?;
            Ok(Counts::from_outcomes(cfg.n, &outcomes).to_distribution())
        }
    }
}

/// Measured integers of `shots` seeded runs, in shot order.
pub fn sample_outcomes(cfg: &ShorConfig, shots: u64, seed: u64) -> Result<Vec<u64>, ShorError> {
    let (program, start) = order_finding_program(cfg)?;
    let runs = program.sample_runs(&start, shots, seed, &Simulator::default())?;
    Ok(runs.into_iter().map(|r| r.outcome).collect())
}

/// Resource figures of the recycled pipeline.
pub fn order_finding_ledger(cfg: &ShorConfig) -> CountLedger {
    recycled_execution_ledger(&cfg.plan(), cfg.work_qubits)
}

/// First convergent `d/r` of `c/2^n` with `r ≤ N` and
/// `|c/2^n - d/r| ≤ 1/2^{n+1}`.
pub fn continued_fraction_order(c: u64, n_bits: usize, modulus: u64) -> Option<(u64, u64)> {
    if c == 0 || n_bits >= 63 || c >> n_bits != 0 {
        return None;
    }
    let denom = 1u64 << n_bits;
    let (mut num, mut den) = (c, denom);
    // convergents h_k/k_k with h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1
    let (mut h_prev, mut h) = (0u64, 1u64);
    let (mut k_prev, mut k) = (1u64, 0u64);
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num % den);
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
        if k > modulus {
            break;
        }
        let err = (c as i128 * k as i128 - h as i128 * denom as i128).unsigned_abs();
        if h > 0 && 2 * err <= k as u128 {
            return Some((h, k));
        }
    }
    let _ = (h_prev, k_prev);
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShorStatus {
    Success,
    FailureZero,
    FailureBadOrder,
    FailureTrivialGcd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShorOutcome {
    pub c: Option<u64>,
    pub convergent: Option<(u64, u64)>,
    pub order: Option<u64>,
    pub factors: Option<BTreeSet<u64>>,
    pub status: ShorStatus,
}

impl ShorOutcome {
    pub fn is_success(&self) -> bool {
        self.status == ShorStatus::Success
    }
}

/// Classical post-processing of a candidate order.
pub fn extract_factors(cfg: &ShorConfig, r: u64) -> ShorOutcome {
    let (x, m) = (cfg.base, cfg.modulus);
    let mut outcome = ShorOutcome {
        c: None,
        convergent: None,
        order: None,
        factors: None,
        status: ShorStatus::FailureBadOrder,
    };
    if r == 0 || pow_mod(x, r, m) != 1 {
        return outcome;
    }
    outcome.order = Some(r);
    outcome.status = ShorStatus::FailureTrivialGcd;
    if r % 2 == 1 {
        return outcome;
    }
    let half = pow_mod(x, r / 2, m);
    if half == m - 1 {
        return outcome;
    }
    let found: BTreeSet<u64> = [gcd(half + m - 1, m), gcd(half + 1, m)]
        .into_iter()
        .filter(|&g| g > 1 && g < m)
        .collect();
    if !found.is_empty() {
        outcome.factors = Some(found);
        outcome.status = ShorStatus::Success;
    }
    outcome
}

/// Continued fractions then factor extraction for one measured `c`.
pub fn post_process(cfg: &ShorConfig, c: u64) -> ShorOutcome {
    let Some((d, r)) = continued_fraction_order(c, cfg.n, cfg.modulus) else {
        return ShorOutcome {
            c: Some(c),
            convergent: None,
            order: None,
            factors: None,
            status: if c == 0 {
                ShorStatus::FailureZero
            } else {
                ShorStatus::FailureBadOrder
            },
        };
    };
    let mut outcome = extract_factors(cfg, r);
    outcome.c = Some(c);
    outcome.convergent = Some((d, r));
    outcome
}

pub const DEFAULT_ATTEMPTS: usize = 10;

/// A factoring run: the sampled shots, the attempts made on them in order and
/// the final outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorRun {
    pub outcome: ShorOutcome,
    pub attempts: Vec<ShorOutcome>,
    pub counts: Counts,
}

impl FactorRun {
    pub fn succeeded(&self) -> bool {
        self.outcome.is_success()
    }
}

/// Samples `shots` outcomes with one seed and post-processes them in shot
/// order, stopping at the first success or after `attempts` tries.
///
/// When every try fails the last failure is the outcome.
pub fn factor(
    cfg: &ShorConfig,
    shots: u64,
    seed: u64,
    attempts: usize,
) -> Result<FactorRun, ShorError> {
    let outcomes = sample_outcomes(cfg, shots, seed)?;
    let mut tried = Vec::new();
    for &c in outcomes.iter().take(attempts.max(1)) {
        let outcome = post_process(cfg, c);
        let done = outcome.is_success();
        tried.push(outcome);
        if done {
            break;
        }
    }
    Ok(FactorRun {
        outcome: tried.last().cloned().expect("at least one shot"),
        attempts: tried,
        counts: Counts::from_outcomes(cfg.n, &outcomes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::enumerate_branches;

    fn cfg(n: u64, x: u64, t: usize) -> ShorConfig {
        ShorConfig::new(n, x, t).unwrap()
    }

    #[test]
    fn config_validation() {
        let c = cfg(15, 11, 2);
        assert_eq!((c.n, c.work_qubits), (8, 4));
        assert_eq!(cfg(21, 2, 2).n, 10);
        assert_eq!(ShorConfig::new(14, 3, 2), Err(ShorError::BadModulus(14)));
        assert_eq!(ShorConfig::new(13, 3, 2), Err(ShorError::BadModulus(13)));
        assert_eq!(
            ShorConfig::new(9, 2, 2),
            Err(ShorError::PrimePower { n: 9, p: 3 })
        );
        assert_eq!(
            ShorConfig::new(27, 2, 2),
            Err(ShorError::PrimePower { n: 27, p: 3 })
        );
        assert_eq!(ShorConfig::new(15, 6, 2), Err(ShorError::SharedFactor(3)));
        assert!(ShorConfig::new(15, 14, 2).is_ok());
        assert_eq!(
            ShorConfig::new(15, 1, 2),
            Err(ShorError::BadBase { x: 1, n: 15 })
        );
        assert!(ShorConfig::new(15, 11, 9).is_err());
        assert_eq!(
            cfg(15, 7, 2).with_multiplier(Multiplier::Compiled),
            Err(ShorError::NoCompiledCircuit)
        );
    }

    #[test]
    fn number_theory_helpers() {
        assert_eq!(gcd(12, 15), 3);
        assert_eq!(pow_mod(11, 2, 15), 1);
        assert_eq!(pow_mod(7, 2, 15), 4);
        assert_eq!(multiplicative_order(2, 21), Some(6));
        assert_eq!(multiplicative_order(4, 15), Some(2));
        assert_eq!(multiplicative_order(3, 15), None);
        assert_eq!(ceil_log2(15), 4);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(21), 5);
    }

    fn apply_to_basis(op: &Op, width: usize, index: usize) -> usize {
        let mut c = Circuit::new(width, 0);
        c.push(op.clone()).unwrap();
        let u = c.unitary().unwrap();
        (0..1 << width)
            .find(|&r| u[[r, index]].norm() > 0.5)
            .unwrap()
    }

    #[test]
    fn modexp_tables() {
        let work = [0, 1, 2, 3];
        let m0 = modexp_permutation(11, 15, 0, None, &work).unwrap();
        assert_eq!(apply_to_basis(&m0, 4, 1), 11);
        assert_eq!(apply_to_basis(&m0, 4, 15), 15);
        let m1 = modexp_permutation(11, 15, 1, None, &work).unwrap();
        for y in 0..16 {
            assert_eq!(apply_to_basis(&m1, 4, y), y);
        }
        let controlled = modexp_permutation(11, 15, 0, Some(4), &work).unwrap();
        assert_eq!(apply_to_basis(&controlled, 5, 1), 1);
        assert_eq!(apply_to_basis(&controlled, 5, 1 | 16), 11 | 16);
        assert!(modexp_permutation(5, 15, 0, None, &work).is_err());
        assert!(modexp_permutation(2, 21, 0, None, &work).is_err());
    }

    #[test]
    fn compiled_multiplier_on_reachable_subspace() {
        let compiled = compiled_mult11_mod15();
        let oracle = modexp_permutation(11, 15, 0, None, &[0, 1, 2, 3]).unwrap();
        for y in [1usize, 11] {
            let out = enumerate_branches(&compiled, &StateVector::basis(4, y)).unwrap();
            assert_eq!(out.bits(), 0);
            let u = compiled.unitary().unwrap();
            assert!((u[[apply_to_basis(&oracle, 4, y), y]].norm() - 1.0).abs() < 1e-12);
        }
        let mut twice = compiled.clone();
        twice.append(&compiled).unwrap();
        let u = twice.unitary().unwrap();
        assert!((u[[1, 1]].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_finding_distributions() {
        let d = run_order_finding(&cfg(15, 11, 2), Execution::Enumerate).unwrap();
        assert_eq!(d.support(1e-12), vec![0, 128]);
        assert!((d.probability(0) - 0.5).abs() < 1e-12);

        let d = run_order_finding(&cfg(15, 7, 2), Execution::Enumerate).unwrap();
        assert_eq!(d.support(1e-12), vec![0, 64, 128, 192]);
        for c in [0, 64, 128, 192] {
            assert!((d.probability(c) - 0.25).abs() < 1e-12);
        }

        let compiled = cfg(15, 11, 2)
            .with_multiplier(Multiplier::Compiled)
            .unwrap();
        let d = run_order_finding(&compiled, Execution::Enumerate).unwrap();
        assert_eq!(d.support(1e-12), vec![0, 128]);
    }

    #[test]
    fn single_circuit_has_the_recycled_shape() {
        let (program, start) = order_finding_program(&cfg(15, 11, 2)).unwrap();
        let circuit = program.to_circuit().unwrap();
        let ledger = crate::qft::count_gates(&circuit);
        assert_eq!(ledger.peak_register_width, 6);
        assert_eq!(ledger.steps, 4);
        assert_eq!(ledger.measurements, 8);
        assert_eq!(order_finding_ledger(&cfg(15, 11, 2)).peak_register_width, 6);
        let whole = enumerate_branches(&circuit, &start).unwrap();
        assert!((whole.probability(128) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(continued_fraction_order(128, 8, 15), Some((1, 2)));
        assert_eq!(continued_fraction_order(0, 8, 15), None);
        assert_eq!(continued_fraction_order(192, 8, 15), Some((3, 4)));
        assert_eq!(continued_fraction_order(64, 8, 15), Some((1, 4)));
        // 171/256 ≈ 2/3
        assert_eq!(continued_fraction_order(171, 8, 15), Some((2, 3)));
    }

    #[test]
    fn factor_extraction() {
        let good = extract_factors(&cfg(15, 11, 2), 2);
        assert_eq!(good.factors, Some(BTreeSet::from([3, 5])));
        let trivial = extract_factors(&cfg(15, 14, 2), 2);
        assert_eq!(trivial.status, ShorStatus::FailureTrivialGcd);
        assert_eq!(
            extract_factors(&cfg(15, 7, 2), 4).factors,
            Some(BTreeSet::from([3, 5]))
        );
        assert_eq!(
            extract_factors(&cfg(15, 4, 2), 2).factors,
            Some(BTreeSet::from([3, 5]))
        );
        assert_eq!(
            extract_factors(&cfg(21, 2, 2), 6).factors,
            Some(BTreeSet::from([3, 7]))
        );
        assert_eq!(
            extract_factors(&cfg(15, 7, 2), 2).status,
            ShorStatus::FailureBadOrder
        );
    }

    #[test]
    fn post_processing_statuses() {
        let c = cfg(15, 11, 2);
        assert_eq!(post_process(&c, 0).status, ShorStatus::FailureZero);
        let ok = post_process(&c, 128);
        assert_eq!((ok.convergent, ok.order), (Some((1, 2)), Some(2)));
        assert!(ok.is_success());
    }

    #[test]
    fn factoring_is_seeded() {
        let c = cfg(15, 11, 2);
        let a = factor(&c, 64, 3, DEFAULT_ATTEMPTS).unwrap();
        let b = factor(&c, 64, 3, DEFAULT_ATTEMPTS).unwrap();
        assert_eq!(a, b);
        assert!(a.succeeded());
        assert_eq!(a.outcome.factors, Some(BTreeSet::from([3, 5])));
        let one = factor(&c, 1, 7, DEFAULT_ATTEMPTS).unwrap();
        assert_eq!(one.attempts.len(), 1);
        assert!([0, 128].contains(&one.outcome.c.unwrap()));
    }
}
