use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semiqft::io::{from_qasm, to_qasm};
use semiqft::qft::{build_standard_qft, dft_probabilities, lower_to_hardware_gates};
use semiqft::semiclassical::{
    plan_blocks, program_for, run_semiclassical, Execution, RegisterMode,
};
use semiqft::sim::{OutcomeDistribution, StateVector};

fn product_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).fold(StateVector::zero(0), |acc, _| {
        StateVector::random(1, &mut rng).tensor(&acc)
    })
}

fn dft(state: &StateVector) -> OutcomeDistribution {
    OutcomeDistribution::from_dense(state.width(), &dft_probabilities(state)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recycled_register_matches_dft_on_product_inputs(n in 1usize..=7, t in 1usize..=7, seed: u64) {
        prop_assume!(t <= n);
        let psi = product_state(n, seed);
        let plan = plan_blocks(n, t).unwrap();
        let got = run_semiclassical(&psi, &plan, RegisterMode::Recycled, Execution::Enumerate).unwrap();
        prop_assert!(got.total_variation(&dft(&psi)).unwrap() < 1e-9);
    }

    #[test]
    fn block_program_circuit_round_trips_through_qasm(n in 1usize..=5, t in 1usize..=5, seed: u64) {
        prop_assume!(t <= n);
        let psi = product_state(n, seed);
        let plan = plan_blocks(n, t).unwrap();
        for mode in [RegisterMode::FullRegister, RegisterMode::Recycled] {
            let (program, _) = program_for(&psi, &plan, mode).unwrap();
            let lowered = lower_to_hardware_gates(&program.to_circuit().unwrap()).unwrap();
            let text = to_qasm(&lowered).unwrap();
            let parsed = from_qasm(&text).unwrap();
            prop_assert_eq!(to_qasm(&parsed).unwrap(), text);
        }
    }
}

#[test]
fn sampled_frequencies_converge_to_the_dft() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let psi = StateVector::random(4, &mut rng);
    let plan = plan_blocks(4, 2).unwrap();
    let exact = dft(&psi);
    let shots = 40_000;
    let sampled = run_semiclassical(
        &psi,
        &plan,
        RegisterMode::FullRegister,
        Execution::Sample { shots, seed: 1 },
    )
    .unwrap();
    // Expected TV for 16 outcomes at this shot count is about 0.01.
    assert!(sampled.total_variation(&exact).unwrap() < 0.03);
}

#[test]
fn standard_qft_unitary_survives_qasm() {
    for n in 1..=5 {
        let lowered = lower_to_hardware_gates(&build_standard_qft(n).unwrap()).unwrap();
        let back = from_qasm(&to_qasm(&lowered).unwrap()).unwrap();
        let (a, b) = (lowered.unitary().unwrap(), back.unitary().unwrap());
        let diff = (&a - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "n={n}: {diff}");
    }
}
