//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 branch-cap
//! exceeded, 4 factoring failed within the attempt budget.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{noisy_ensemble, CompareInput, NoiseModel};
use crate::error::{AnalysisError, QasmError, QftError, SemiclassicalError, ShorError, SimError};
use crate::gates::{controlled_gate_circuit, decompose_phase_gate, r_k, MAX_ROTATION_INDEX};
use crate::io::document::{
    DecompositionSection, InputSpec, RegisterChoice, ResultDocument, RunRequest, ShorSection,
    TransformMode,
};
use crate::io::qasm::to_qasm;
use crate::qft::{build_measured_qft, count_gates, dft_probabilities, lower_to_hardware_gates};
use crate::semiclassical::Execution;
use crate::semiclassical::{
    load_ops, plan_blocks, program_for, recycled_execution_ledger, RegisterMode,
};
use crate::shor::{factor, order_finding_ledger, run_order_finding, Multiplier, ShorConfig};
use crate::sim::{Circuit, Counts, OutcomeDistribution, Simulator, StateVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_SHOR_FAILURE: i32 = 4;

/// Largest register the `qft` command will simulate.
pub const MAX_CLI_QUBITS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "semiqft", version, about = "Semiclassical QFT simulator")]
pub struct Cli {
    /// Also write the result document to this path.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a standard or semiclassical QFT on an input state.
    Qft(QftArgs),
    /// Factor N by order finding on the recycled register.
    Shor(ShorArgs),
    /// Split controlled-R_k into single-qubit gates and two CNOTs.
    Decompose(DecomposeArgs),
    /// Score the semiclassical and standard Z_8 circuits under noise.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("execution").args(["exact", "shots"]))]
pub struct QftArgs {
    #[arg(long)]
    pub n: usize,
    /// Defaults to semiclassical when --t is given.
    #[arg(long, value_enum)]
    pub mode: Option<TransformMode>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, value_enum, default_value_t = RegisterChoice::Auto)]
    pub register: RegisterChoice,
    /// Bitstring, most significant bit first, or `random`.
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub noise_p: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trajectories: usize,
    #[arg(long)]
    pub emit_qasm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShorArgs {
    #[arg(long = "N")]
    pub modulus: u64,
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::shor::DEFAULT_ATTEMPTS)]
    pub attempts: usize,
    /// Report the exact distribution instead of shot frequencies.
    #[arg(long)]
    pub exact: bool,
    /// Use the two-CNOT multiplier (N = 15, x = 11 only).
    #[arg(long)]
    pub compiled: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub k: i64,
    #[arg(long)]
    pub emit_qasm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub noise_p: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trajectories: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the inverse transform of |c> instead of |000>.
    #[arg(long)]
    pub fourier: Option<u64>,
}

/// What the binary prints and returns.
#[derive(Debug)]
pub struct CliOutcome {
    pub exit_code: i32,
    pub document: Option<ResultDocument>,
    /// Help, version or error text.
    pub message: Option<String>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn sim_code(e: &SimError) -> i32 {
    match e {
        SimError::BranchCapExceeded { .. } => EXIT_CAPACITY,
        _ => EXIT_USAGE,
    }
}

fn semi_code(e: &SemiclassicalError) -> i32 {
    match e {
        SemiclassicalError::Sim(s) | SemiclassicalError::Qft(QftError::Sim(s)) => sim_code(s),
        _ => EXIT_USAGE,
    }
}

macro_rules! failure_from {
    ($ty:ty, $code:expr) => {
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                let code: fn(&$ty) -> i32 = $code;
                Failure {
                    code: code(&e),
                    message: e.to_string(),
                }
            }
        }
    };
}

failure_from!(SimError, sim_code);
failure_from!(SemiclassicalError, semi_code);
failure_from!(QftError, |e| match e {
    QftError::Sim(s) => sim_code(s),
    _ => EXIT_USAGE,
});
failure_from!(QasmError, |_| EXIT_USAGE);
failure_from!(ShorError, |e| match e {
    ShorError::Semiclassical(s) => semi_code(s),
    ShorError::Sim(s) => sim_code(s),
    _ => EXIT_USAGE,
});
failure_from!(AnalysisError, |e| match e {
    AnalysisError::Sim(s) => sim_code(s),
    AnalysisError::Semiclassical(s) => semi_code(s),
    _ => EXIT_USAGE,
});

/// Parses `argv` (program name first) and runs the command.
pub fn parse_and_run<I, T>(argv: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return CliOutcome {
                exit_code: code,
                document: None,
                message: Some(e.render().to_string()),
            };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> CliOutcome {
    let result = match &cli.command {
        Command::Qft(args) => run_qft(args),
        Command::Shor(args) => run_shor(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Compare(args) => run_compare(args),
    };
    match result {
        Ok((document, code)) => {
            if let Some(path) = &cli.json {
                if let Err(e) = std::fs::write(path, document.to_json()) {
                    return CliOutcome {
                        exit_code: EXIT_USAGE,
                        document: Some(document),
                        message: Some(format!("cannot write {}: {e}", path.display())),
                    };
                }
            }
            CliOutcome {
                exit_code: code,
                message: (code == EXIT_SHOR_FAILURE)
                    .then(|| "no factor found within the attempt budget".to_string()),
                document: Some(document),
            }
        }
        Err(f) => CliOutcome {
            exit_code: f.code,
            document: None,
            message: Some(format!("error: {}", f.message)),
        },
    }
}

fn parse_input(input: &str, n: usize, seed: u64) -> Result<(InputSpec, StateVector), Failure> {
    if input == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok((InputSpec::Random, StateVector::random(n, &mut rng)));
    }
    if input.len() != n || !input.chars().all(|c| c == '0' || c == '1') {
        return Err(Failure::usage(format!(
            "--input must be `random` or a {n}-character bitstring, found `{input}`"
        )));
    }
    let value = usize::from_str_radix(input, 2).expect("validated bitstring");
    Ok((
        InputSpec::Basis(input.to_string()),
        StateVector::basis(n, value),
    ))
}

/// Prepends gates preparing `input` from `|0...0>` when they exist; otherwise
/// returns the circuit unchanged with `input` as its start state.
fn with_preparation(
    circuit: Circuit,
    input: &StateVector,
) -> Result<(Circuit, StateVector), Failure> {
    let qubits: Vec<usize> = (0..input.width()).collect();
    let prep = load_ops(input, &qubits)?;
    if prep.iter().any(|op| !op.is_unitary()) {
        return Ok((circuit, input.clone()));
    }
    let mut out = Circuit::new(circuit.num_qubits(), circuit.num_clbits())
        .with_recycling(circuit.is_recycled());
    for op in prep {
        out.push(op)?;
    }
    out.append(&circuit)?;
    Ok((out, StateVector::zero(input.width())))
}

fn run_qft(args: &QftArgs) -> Result<(ResultDocument, i32), Failure> {
    let n = args.n;
    if n == 0 || n > MAX_CLI_QUBITS {
        return Err(Failure::usage(format!(
            "--n must lie in 1..={MAX_CLI_QUBITS}"
        )));
    }
    let mode = args.mode.unwrap_or(if args.t.is_some() {
        TransformMode::Semiclassical
    } else {
        TransformMode::Standard
    });
    let t = match (mode, args.t) {
        (TransformMode::Semiclassical, None) => {
            return Err(Failure::usage("--mode semiclassical needs --t"))
        }
        (_, t) => t,
    };
    if let Some(p) = args.noise_p {
        NoiseModel::two_qubit(p)?;
        if args.trajectories == 0 {
            return Err(Failure::usage("--trajectories must be at least 1"));
        }
    }
    if args.shots == Some(0) {
        return Err(Failure::usage("--shots must be at least 1"));
    }
    let (input_spec, input) = parse_input(&args.input, n, args.seed)?;
    let sim = Simulator::default();
    if args.shots.is_none() && 1usize << n > sim.branch_cap() {
        return Err(SimError::BranchCapExceeded {
            cap: sim.branch_cap(),
        }
        .into());
    }
    let request = RunRequest::Qft {
        n,
        mode,
        t,
        register: args.register,
        input: input_spec,
        shots: args.shots,
        seed: args.seed,
        noise_p: args.noise_p,
        trajectories: args.trajectories,
        emit_qasm: args.emit_qasm.as_ref().map(|p| p.display().to_string()),
    };
    let mut doc = ResultDocument::new(request, Some(args.seed));
    let ideal = OutcomeDistribution::from_dense(n, &dft_probabilities(&input))?;

    let (circuit, start, distribution) = match mode {
        TransformMode::Standard => {
            let (circuit, start) = with_preparation(build_measured_qft(n)?, &input)?;
            let distribution = match args.shots {
                Some(shots) => sim
                    .sample(&circuit, &start, shots, args.seed)?
                    .to_distribution(),
                None => sim.enumerate(&circuit, &start)?,
            };
            (circuit, start, distribution)
        }
        TransformMode::Semiclassical => {
            let t = t.expect("checked above");
            let plan = plan_blocks(n, t)?;
            let register = match args.register {
                RegisterChoice::Full => RegisterMode::FullRegister,
                RegisterChoice::Recycled => RegisterMode::Recycled,
                RegisterChoice::Auto => match crate::semiclassical::factor_blocks(&input, &plan) {
                    Ok(_) => RegisterMode::Recycled,
                    Err(_) => RegisterMode::FullRegister,
                },
            };
            let (program, start) = program_for(&input, &plan, register)?;
            let distribution = match args.shots {
                Some(shots) => {
                    let runs = program.sample_runs(&start, shots, args.seed, &sim)?;
                    let outcomes: Vec<u64> = runs.iter().map(|r| r.outcome).collect();
                    Counts::from_outcomes(n, &outcomes).to_distribution()
                }
                None => program.enumerate(&start, &sim)?,
            };
            if register == RegisterMode::Recycled {
                doc.resources = Some(recycled_execution_ledger(&plan, 0));
                (program.to_circuit()?, start, distribution)
            } else {
                let (circuit, start) = with_preparation(program.to_circuit()?, &input)?;
                (circuit, start, distribution)
            }
        }
    };

    let lowered = lower_to_hardware_gates(&circuit);
    if let Ok(lowered) = &lowered {
        doc.gate_counts = Some(count_gates(lowered));
    }
    if let Some(path) = &args.emit_qasm {
        let lowered = lowered.clone()?;
        std::fs::write(path, to_qasm(&lowered)?)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    match args.noise_p {
        Some(p) => {
            let noisy_circuit = lowered.unwrap_or(circuit);
            let noise = NoiseModel::two_qubit(p)?;
            let ensemble =
                noisy_ensemble(&noisy_circuit, &start, &noise, args.trajectories, args.seed)?;
            doc.gamma = Some(ensemble.sso_with_error(&ideal)?);
            doc.set_distribution(&ensemble.mean()?);
        }
        None => doc.set_distribution(&distribution),
    }
    Ok((doc, EXIT_OK))
}

fn run_shor(args: &ShorArgs) -> Result<(ResultDocument, i32), Failure> {
    if args.shots == 0 || args.attempts == 0 {
        return Err(Failure::usage("--shots and --attempts must be at least 1"));
    }
    let mut cfg = ShorConfig::new(args.modulus, args.x, args.t)?;
    if args.compiled {
        cfg = cfg.with_multiplier(Multiplier::Compiled)?;
    }
    let request = RunRequest::Shor {
        modulus: args.modulus,
        x: args.x,
        t: args.t,
        shots: args.shots,
        seed: args.seed,
        attempts: args.attempts,
        exact: args.exact,
        compiled: args.compiled,
    };
    let mut doc = ResultDocument::new(request, Some(args.seed));
    let run = factor(&cfg, args.shots, args.seed, args.attempts)?;
    let distribution = if args.exact {
        run_order_finding(&cfg, Execution::Enumerate)?
    } else {
        run.counts.to_distribution()
    };
    doc.set_distribution(&distribution);
    doc.resources = Some(order_finding_ledger(&cfg));
    let (program, _) = crate::shor::order_finding_program(&cfg)?;
    doc.gate_counts = Some(count_gates(&program.to_circuit()?));
    let code = if run.succeeded() {
        EXIT_OK
    } else {
        EXIT_SHOR_FAILURE
    };
    doc.shor = Some(ShorSection {
        config: cfg,
        succeeded: run.succeeded(),
        outcome: run.outcome,
        attempts: run.attempts,
        counts: run.counts.counts.clone(),
    });
    Ok((doc, code))
}

fn run_decompose(args: &DecomposeArgs) -> Result<(ResultDocument, i32), Failure> {
    if !(1..=MAX_ROTATION_INDEX).contains(&args.k) {
        return Err(Failure::usage(format!(
            "--k must lie in 1..={MAX_ROTATION_INDEX}"
        )));
    }
    let gate = r_k(args.k).map_err(|e| Failure::usage(e.to_string()))?;
    let dec = decompose_phase_gate(&gate).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(path) = &args.emit_qasm {
        let circuit =
            controlled_gate_circuit(&dec, 0, 1).map_err(|e| Failure::usage(e.to_string()))?;
        std::fs::write(path, to_qasm(&circuit)?)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut doc = ResultDocument::new(
        RunRequest::Decompose {
            k: args.k,
            emit_qasm: args.emit_qasm.as_ref().map(|p| p.display().to_string()),
        },
        None,
    );
    doc.decomposition = Some(DecompositionSection {
        k: args.k,
        alpha: dec.alpha.to_string(),
        a: dec.a.label().to_string(),
        b: dec.b.label().to_string(),
        c: dec.c.label().to_string(),
        identity_residual: dec.identity_residual(),
        reconstruction_residual: dec.reconstruction_residual(gate.matrix()),
    });
    Ok((doc, EXIT_OK))
}

fn run_compare(args: &CompareArgs) -> Result<(ResultDocument, i32), Failure> {
    let noise = NoiseModel::two_qubit(args.noise_p)?;
    if args.trajectories == 0 {
        return Err(Failure::usage("--trajectories must be at least 1"));
    }
    let input = match args.fourier {
        None => CompareInput::Zero,
        Some(c) if c < 8 => CompareInput::Fourier(c),
        Some(c) => {
            return Err(Failure::usage(format!(
                "--fourier must lie in 0..8, found {c}"
            )))
        }
    };
    let report = crate::analysis::compare_z8_circuits(&noise, args.trajectories, args.seed, input)?;
    let mut doc = ResultDocument::new(
        RunRequest::Compare {
            noise_p: args.noise_p,
            trajectories: args.trajectories,
            seed: args.seed,
            input,
        },
        Some(args.seed),
    );
    doc.comparison = Some(report);
    Ok((doc, EXIT_OK))
}
