//! Overlap metric, Pauli trajectory noise and the two-circuit comparison.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::gates::{self, SingleQubitGate};
use crate::qft::{
    build_measured_qft, count_gates, dft_probabilities, inverse_dft_apply, lower_to_hardware_gates,
};
use crate::semiclassical::{load_ops, plan_blocks, program_for, RegisterMode};
use crate::sim::{Circuit, Op, OutcomeDistribution, Simulator, StateVector};

/// Hardware overlaps observed on the device, kept for reports only.
pub const DEVICE_GAMMA_CONTROLLED_R4: f64 = 0.956;
pub const DEVICE_GAMMA_SEMICLASSICAL: f64 = 0.9952;
pub const DEVICE_GAMMA_STANDARD: f64 = 0.9355;

/// Squared statistical overlap `(Σ_y √(m_y e_y))²`.
pub fn sso(
    measured: &OutcomeDistribution,
    expected: &OutcomeDistribution,
) -> Result<f64, AnalysisError> {
    if measured.bits() != expected.bits() {
        return Err(AnalysisError::OutcomeSpaceMismatch(
            measured.bits(),
            expected.bits(),
        ));
    }
    let (small, large) = if measured.as_map().len() <= expected.as_map().len() {
        (measured, expected)
    } else {
        (expected, measured)
    };
    let root: f64 = small
        .iter()
        .map(|(y, p)| (p * large.probability(y)).sqrt())
        .sum();
    Ok(root * root)
}

fn sso_dense(measured: &[f64], expected: &[f64]) -> f64 {
    let root: f64 = measured
        .iter()
        .zip(expected)
        .map(|(m, e)| (m * e).sqrt())
        .sum();
    root * root
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub two_qubit_depolarizing_p: f64,
    pub single_qubit_depolarizing_p: f64,
}

impl NoiseModel {
    pub fn new(two_qubit_p: f64, single_qubit_p: f64) -> Result<Self, AnalysisError> {
        for p in [two_qubit_p, single_qubit_p] {
            if !(0.0..=1.0).contains(&p) {
                return Err(AnalysisError::InvalidProbability(p));
            }
        }
        Ok(Self {
            two_qubit_depolarizing_p: two_qubit_p,
            single_qubit_depolarizing_p: single_qubit_p,
        })
    }

    pub fn two_qubit(p: f64) -> Result<Self, AnalysisError> {
        Self::new(p, 0.0)
    }
}

fn pauli(index: usize) -> Option<SingleQubitGate> {
    match index {
        1 => Some(gates::x()),
        2 => Some(gates::y()),
        3 => Some(gates::z()),
        _ => None,
    }
}

/// One noisy realization: Paulis drawn after each gate, or `None` when no
/// error fired.
fn noisy_copy<R: Rng>(
    circuit: &Circuit,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Option<Circuit>, AnalysisError> {
    let mut out = Circuit::new(circuit.num_qubits(), circuit.num_clbits())
        .with_recycling(circuit.is_recycled());
    let mut fired = false;
    for op in circuit.ops() {
        out.push(op.clone())?;
        let (targets, p) = match *op {
            Op::Cx { control, target }
            | Op::ControlledPhase {
                control, target, ..
            } => (vec![control, target], noise.two_qubit_depolarizing_p),
            Op::Gate { target, .. } => (vec![target], noise.single_qubit_depolarizing_p),
            _ => continue,
        };
        if p == 0.0 || rng.random::<f64>() >= p {
            continue;
        }
        fired = true;
        let choices = 1usize << (2 * targets.len());
        let mut draw = rng.random_range(1..choices);
        for &q in &targets {
            if let Some(gate) = pauli(draw & 3) {
                out.push(Op::Gate { gate, target: q })?;
            }
            draw >>= 2;
        }
    }
    Ok(fired.then_some(out))
}

/// Per-trajectory outcome distributions. Error-free trajectories share the
/// ideal distribution.
#[derive(Clone, Debug)]
pub struct NoisyEnsemble {
    bits: usize,
    ideal: Arc<Vec<f64>>,
    trajectories: Vec<Arc<Vec<f64>>>,
}

impl NoisyEnsemble {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Trajectories in which at least one error fired.
    pub fn noisy_count(&self) -> usize {
        self.trajectories
            .iter()
            .filter(|t| !Arc::ptr_eq(t, &self.ideal))
            .count()
    }

    fn mean_dense(&self) -> Vec<f64> {
        let mut mean = vec![0.0; 1 << self.bits];
        for t in &self.trajectories {
            for (m, p) in mean.iter_mut().zip(t.iter()) {
                *m += p;
            }
        }
        let scale = 1.0 / self.trajectories.len() as f64;
        mean.iter_mut().for_each(|m| *m *= scale);
        mean
    }

    pub fn mean(&self) -> Result<OutcomeDistribution, AnalysisError> {
        Ok(OutcomeDistribution::from_dense(
            self.bits,
            &self.mean_dense(),
        )?)
    }

    /// Overlap of the mean distribution with `expected`, and its standard
    /// error from the spread of per-trajectory contributions.
    ///
    /// With `γ = (Σ_y √(m_y e_y))²` and `m = mean_i P^{(i)}`, the linearized
    /// per-trajectory term is `g_i = Σ_y √γ·√(e_y/m_y)·P_y^{(i)}`.
    pub fn sso_with_error(
        &self,
        expected: &OutcomeDistribution,
    ) -> Result<Estimate, AnalysisError> {
        if expected.bits() != self.bits {
            return Err(AnalysisError::OutcomeSpaceMismatch(
                self.bits,
                expected.bits(),
            ));
        }
        let e = expected.to_dense();
        let m = self.mean_dense();
        let gamma = sso_dense(&m, &e);
        let weights: Vec<f64> = m
            .iter()
            .zip(&e)
            .map(|(&my, &ey)| {
                if my > 0.0 {
                    (gamma * ey / my).sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        let g: Vec<f64> = self
            .trajectories
            .iter()
            .map(|t| t.iter().zip(&weights).map(|(p, w)| p * w).sum())
            .collect();
        let count = g.len() as f64;
        let mean_g = g.iter().sum::<f64>() / count;
        let var = if g.len() > 1 {
            g.iter().map(|x| (x - mean_g).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        Ok(Estimate {
            value: gamma,
            standard_error: (var / count).sqrt(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

/// Runs `trajectories` noisy copies of `circuit`, each enumerated exactly.
///
/// Trajectory `i` draws its errors from stream `i` of a generator keyed by
/// `seed`, so results do not depend on thread scheduling.
pub fn noisy_ensemble(
    circuit: &Circuit,
    input: &StateVector,
    noise: &NoiseModel,
    trajectories: usize,
    seed: u64,
) -> Result<NoisyEnsemble, AnalysisError> {
    if trajectories == 0 {
        return Err(AnalysisError::ZeroTrajectories);
    }
    let sim = Simulator::default();
    let bits = circuit.num_clbits();
    let ideal = Arc::new(sim.enumerate(circuit, input)?.to_dense());
    let runs: Result<Vec<Arc<Vec<f64>>>, AnalysisError> = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            match noisy_copy(circuit, noise, &mut rng)? {
                None => Ok(Arc::clone(&ideal)),
                Some(noisy) => Ok(Arc::new(sim.enumerate(&noisy, input)?.to_dense())),
            }
        })
        .collect();
    Ok(NoisyEnsemble {
        bits,
        ideal,
        trajectories: runs?,
    })
}

/// Mean outcome distribution over noisy trajectories.
pub fn run_noisy(
    circuit: &Circuit,
    input: &StateVector,
    noise: &NoiseModel,
    trajectories: usize,
    seed: u64,
) -> Result<OutcomeDistribution, AnalysisError> {
    noisy_ensemble(circuit, input, noise, trajectories, seed)?.mean()
}

/// Input fed to both circuits of the comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum CompareInput {
    /// `|000>`; the ideal output is uniform.
    #[default]
    Zero,
    /// The inverse transform of `|c>`, a product of equatorial qubits whose
    /// ideal output is `c` with certainty.
    Fourier(u64),
}

impl CompareInput {
    pub fn state(&self, n: usize) -> StateVector {
        match *self {
            CompareInput::Zero => StateVector::zero(n),
            CompareInput::Fourier(c) => inverse_dft_apply(&StateVector::basis(n, c as usize)),
        }
    }
}

const COMPARE_BITS: usize = 3;

/// The 2-bit semiclassical transform over `Z_8` on a recycled 2-qubit
/// register, input loads included, lowered to hardware gates.
pub fn semiclassical_z8_circuit(
    input: CompareInput,
) -> Result<(Circuit, StateVector), AnalysisError> {
    let plan = plan_blocks(COMPARE_BITS, 2)?;
    let (program, start) = program_for(&input.state(COMPARE_BITS), &plan, RegisterMode::Recycled)?;
    Ok((lower_to_hardware_gates(&program.to_circuit()?)?, start))
}

/// The standard measured transform over `Z_8` on three qubits, input
/// preparation included, lowered to hardware gates.
pub fn standard_z8_circuit(input: CompareInput) -> Result<(Circuit, StateVector), AnalysisError> {
    let qubits: Vec<usize> = (0..COMPARE_BITS).collect();
    let mut circuit = Circuit::new(COMPARE_BITS, COMPARE_BITS);
    for op in load_ops(&input.state(COMPARE_BITS), &qubits)? {
        circuit.push(op)?;
    }
    circuit.append(&build_measured_qft(COMPARE_BITS)?)?;
    Ok((
        lower_to_hardware_gates(&circuit)?,
        StateVector::zero(COMPARE_BITS),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub input: CompareInput,
    pub noise: NoiseModel,
    pub trajectories: usize,
    pub seed: u64,
    pub gamma_semiclassical: Estimate,
    pub gamma_standard: Estimate,
    pub cx_semiclassical: usize,
    pub cx_standard: usize,
}

impl ComparisonReport {
    /// `γ_semiclassical − γ_standard` in units of the combined standard error.
    pub fn margin_in_standard_errors(&self) -> f64 {
        let diff = self.gamma_semiclassical.value - self.gamma_standard.value;
        let se = self
            .gamma_semiclassical
            .standard_error
            .hypot(self.gamma_standard.standard_error);
        if se == 0.0 {
            if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            diff / se
        }
    }
}

/// Runs both `Z_8` circuits under the same noise and scores each against the
/// ideal `|DFT·ψ|²`.
pub fn compare_z8_circuits(
    noise: &NoiseModel,
    trajectories: usize,
    seed: u64,
    input: CompareInput,
) -> Result<ComparisonReport, AnalysisError> {
    let expected = OutcomeDistribution::from_dense(
        COMPARE_BITS,
        &dft_probabilities(&input.state(COMPARE_BITS)),
    )?;
    let (semi, semi_start) = semiclassical_z8_circuit(input)?;
    let (standard, standard_start) = standard_z8_circuit(input)?;
    let semi_runs = noisy_ensemble(&semi, &semi_start, noise, trajectories, seed)?;
    let standard_runs = noisy_ensemble(
        &standard,
        &standard_start,
        noise,
        trajectories,
        seed ^ 0x5eed,
    )?;
    Ok(ComparisonReport {
        input,
        noise: *noise,
        trajectories,
        seed,
        gamma_semiclassical: semi_runs.sso_with_error(&expected)?,
        gamma_standard: standard_runs.sso_with_error(&expected)?,
        cx_semiclassical: count_gates(&semi).two_qubit,
        cx_standard: count_gates(&standard).two_qubit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn dist(bits: usize, pairs: &[(u64, f64)]) -> OutcomeDistribution {
        OutcomeDistribution::new(bits, pairs.iter().copied().collect::<BTreeMap<_, _>>()).unwrap()
    }

    #[test]
    fn sso_worked_values() {
        let half = dist(1, &[(0, 0.5), (1, 0.5)]);
        let zero = dist(1, &[(0, 1.0)]);
        let one = dist(1, &[(1, 1.0)]);
        assert!((sso(&half, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(sso(&zero, &one).unwrap(), 0.0);
        assert!((sso(&half, &half).unwrap() - 1.0).abs() < 1e-15);
        assert!(sso(&half, &dist(2, &[(0, 1.0)])).is_err());
    }

    #[test]
    fn noise_model_bounds() {
        assert!(NoiseModel::new(1.1, 0.0).is_err());
        assert!(NoiseModel::new(0.1, -0.1).is_err());
        assert!(NoiseModel::two_qubit(1.0).is_ok());
    }

    #[test]
    fn noiseless_trajectories_equal_enumeration() {
        let (circuit, start) = standard_z8_circuit(CompareInput::Fourier(5)).unwrap();
        let d = run_noisy(&circuit, &start, &NoiseModel::default(), 10, 1).unwrap();
        assert!((d.probability(5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_noise_on_one_cx_mixes() {
        let mut c = Circuit::new(2, 2);
        c.push(Op::Gate {
            gate: gates::h(),
            target: 0,
        })
        .unwrap();
        c.push(Op::Cx {
            control: 0,
            target: 1,
        })
        .unwrap();
        c.push(Op::Measure { qubit: 0, clbit: 0 }).unwrap();
        c.push(Op::Measure { qubit: 1, clbit: 1 }).unwrap();
        let start = StateVector::zero(2);
        let ideal = Simulator::default().enumerate(&c, &start).unwrap();
        let noisy = run_noisy(&c, &start, &NoiseModel::two_qubit(1.0).unwrap(), 2000, 3).unwrap();
        let gamma = sso(&noisy, &ideal).unwrap();
        assert!(gamma < 0.9, "{gamma}");
    }

    #[test]
    fn ensembles_are_seeded() {
        let (circuit, start) = semiclassical_z8_circuit(CompareInput::Fourier(5)).unwrap();
        let noise = NoiseModel::two_qubit(0.2).unwrap();
        let a = run_noisy(&circuit, &start, &noise, 500, 11).unwrap();
        let b = run_noisy(&circuit, &start, &noise, 500, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circuits_have_expected_cx_counts() {
        for input in [CompareInput::Zero, CompareInput::Fourier(3)] {
            let (semi, _) = semiclassical_z8_circuit(input).unwrap();
            let (standard, _) = standard_z8_circuit(input).unwrap();
            assert_eq!(count_gates(&semi).two_qubit, 2);
            assert_eq!(count_gates(&standard).two_qubit, 6);
            assert_eq!(semi.num_qubits(), 2);
        }
    }

    #[test]
    fn noiseless_comparison_is_perfect() {
        let report =
            compare_z8_circuits(&NoiseModel::default(), 20, 0, CompareInput::Zero).unwrap();
        assert!((report.gamma_semiclassical.value - 1.0).abs() < 1e-12);
        assert!((report.gamma_standard.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_input_is_blind_to_pauli_noise() {
        let report = compare_z8_circuits(
            &NoiseModel::two_qubit(0.3).unwrap(),
            2000,
            4,
            CompareInput::Zero,
        )
        .unwrap();
        assert!((report.gamma_semiclassical.value - 1.0).abs() < 1e-12);
        assert!((report.gamma_standard.value - 1.0).abs() < 1e-12);
    }
}
