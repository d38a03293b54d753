//! The hardware gate vocabulary, the QFT phase rotations, and the two-CNOT
//! realization of controlled phase gates.
//!
//! Parameter order follows the device convention: `U2(λ, φ)` has `-e^{iλ}` in
//! the upper-right entry and `e^{iφ}` in the lower-left, and `U3(θ, λ, φ)`
//! likewise. Hadamard is `U2(π, 0)`.
//!
//! A controlled `U = diag(1, e^{iθ})` is realized as
//!
//! ```text
//! control ──────────●───────────●───────── U1(α)
//! target  ── C ─────X──── B ────X──── A ──
//! ```
//!
//! with `α = θ/2`, `A = C = U1(θ/4)` and `B = U1(-θ/2)`. Then `ABC = I` and
//! `e^{iα}·A·X·B·X·C = U`. Putting `U1(α)` on the control wire makes the
//! two-qubit unitary exactly controlled-U, global phase included.

use std::f64::consts::FRAC_1_SQRT_2;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{GateError, SimError};
use crate::phase::{Angle, DyadicPhase};
use crate::sim::{Circuit, Op};

pub type Mat2 = [[Complex64; 2]; 2];

/// Unitarity tolerance for single-qubit matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// Tolerance used by [`unitary_equal`].
pub const EQUALITY_TOLERANCE: f64 = 1e-10;

/// Largest supported rotation index for `R_k`.
pub const MAX_ROTATION_INDEX: i64 = 30;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];

/// Which named gate a matrix came from; drives QASM emission.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    U1(Angle),
    U2 {
        lambda: Angle,
        phi: Angle,
    },
    U3 {
        theta: Angle,
        lambda: Angle,
        phi: Angle,
    },
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleQubitGate {
    matrix: Mat2,
    kind: GateKind,
    label: String,
}

impl SingleQubitGate {
    /// Wraps an arbitrary matrix, rejecting non-unitary input.
    pub fn from_matrix(matrix: Mat2, label: impl Into<String>) -> Result<Self, SimError> {
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARY_TOLERANCE {
            return Err(SimError::NonUnitary(deviation));
        }
        Ok(Self {
            matrix,
            kind: GateKind::Custom,
            label: label.into(),
        })
    }

    fn named(matrix: Mat2, kind: GateKind, label: String) -> Self {
        Self {
            matrix,
            kind,
            label,
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether the matrix is `diag(1, e^{iθ})`.
    pub fn is_phase_gate(&self) -> bool {
        let m = &self.matrix;
        m[0][1].norm() <= UNITARY_TOLERANCE
            && m[1][0].norm() <= UNITARY_TOLERANCE
            && (m[0][0] - ONE).norm() <= UNITARY_TOLERANCE
    }
}

fn unit(radians: f64) -> Complex64 {
    Complex64::from_polar(1.0, radians)
}

pub fn h() -> SingleQubitGate {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    SingleQubitGate::named([[r, r], [r, -r]], GateKind::H, "H".into())
}

pub fn x() -> SingleQubitGate {
    SingleQubitGate::named(PAULI_X, GateKind::X, "X".into())
}

pub fn y() -> SingleQubitGate {
    let i = Complex64::new(0.0, 1.0);
    SingleQubitGate::named([[ZERO, -i], [i, ZERO]], GateKind::Y, "Y".into())
}

pub fn z() -> SingleQubitGate {
    SingleQubitGate::named([[ONE, ZERO], [ZERO, -ONE]], GateKind::Z, "Z".into())
}

pub fn s() -> SingleQubitGate {
    let i = Complex64::new(0.0, 1.0);
    SingleQubitGate::named([[ONE, ZERO], [ZERO, i]], GateKind::S, "S".into())
}

pub fn t() -> SingleQubitGate {
    let w = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    SingleQubitGate::named([[ONE, ZERO], [ZERO, w]], GateKind::T, "T".into())
}

/// `U1(λ) = diag(1, e^{iλ})`.
pub fn u1(lambda: Angle) -> SingleQubitGate {
    SingleQubitGate::named(
        [[ONE, ZERO], [ZERO, unit(lambda.radians())]],
        GateKind::U1(lambda),
        format!("U1({lambda})"),
    )
}

/// `U2(λ, φ) = [[1, -e^{iλ}], [e^{iφ}, e^{i(λ+φ)}]] / √2`.
pub fn u2(lambda: Angle, phi: Angle) -> SingleQubitGate {
    let (l, p) = (lambda.radians(), phi.radians());
    let r = FRAC_1_SQRT_2;
    SingleQubitGate::named(
        [[ONE * r, -unit(l) * r], [unit(p) * r, unit(l + p) * r]],
        GateKind::U2 { lambda, phi },
        format!("U2({lambda}, {phi})"),
    )
}

/// `U3(θ, λ, φ) = [[cos θ/2, -e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(λ+φ)} cos θ/2]]`.
pub fn u3(theta: Angle, lambda: Angle, phi: Angle) -> SingleQubitGate {
    let (th, l, p) = (theta.radians(), lambda.radians(), phi.radians());
    let (sin, cos) = (th / 2.0).sin_cos();
    SingleQubitGate::named(
        [
            [ONE * cos, -unit(l) * sin],
            [unit(p) * sin, unit(l + p) * cos],
        ],
        GateKind::U3 { theta, lambda, phi },
        format!("U3({theta}, {lambda}, {phi})"),
    )
}

/// The phase of `R_k` in cycles, `1/2^k`.
pub fn rotation_phase(k: i64) -> Result<DyadicPhase, GateError> {
    if !(1..=MAX_ROTATION_INDEX).contains(&k) {
        return Err(GateError::InvalidRotationIndex(k));
    }
    Ok(DyadicPhase::new(1, k as u32)?)
}

/// `R_k = diag(1, e^{2πi/2^k})`.
pub fn r_k(k: i64) -> Result<SingleQubitGate, GateError> {
    let phase = rotation_phase(k)?;
    let mut gate = u1(phase.to_angle());
    gate.label = format!("R_{k}");
    Ok(gate)
}

/// Feedback gate `S_k(φ) = diag(1, e^{2πiφ/2^{k-1}})`.
pub fn s_k(k: u32, phi: DyadicPhase) -> Result<SingleQubitGate, GateError> {
    if k < 1 {
        return Err(GateError::InvalidRotationIndex(k as i64));
    }
    let phase = phi.div_pow2(k - 1)?;
    let mut gate = u1(phase.to_angle());
    gate.label = format!("S_{k}({phi})");
    Ok(gate)
}

/// `α, A, B, C` with `ABC = I` and `U = e^{iα}·A·X·B·X·C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlledDecomposition {
    pub alpha: Angle,
    pub a: SingleQubitGate,
    pub b: SingleQubitGate,
    pub c: SingleQubitGate,
}

impl ControlledDecomposition {
    /// `‖ABC - I‖_max`.
    pub fn identity_residual(&self) -> f64 {
        let abc = mat2_mul(&mat2_mul(self.a.matrix(), self.b.matrix()), self.c.matrix());
        mat2_max_diff(&abc, &IDENTITY)
    }

    /// `e^{iα}·A·X·B·X·C`.
    pub fn reconstruct(&self) -> Mat2 {
        let axbxc = [
            self.a.matrix(),
            &PAULI_X,
            self.b.matrix(),
            &PAULI_X,
            self.c.matrix(),
        ]
        .into_iter()
        .fold(IDENTITY, |acc, m| mat2_mul(&acc, m));
        let phase = unit(self.alpha.radians());
        axbxc.map(|row| row.map(|z| z * phase))
    }

    /// `‖e^{iα}·A·X·B·X·C - U‖_max`.
    pub fn reconstruction_residual(&self, target: &Mat2) -> f64 {
        mat2_max_diff(&self.reconstruct(), target)
    }
}

/// Splits `diag(1, e^{iθ})` into `α = θ/2`, `A = C = U1(θ/4)`, `B = U1(-θ/2)`.
///
/// Dyadic angles stay exact, so `R_4` yields `α = π/16`, `A = C = U1(π/32)`
/// and `B = U1(-π/16)`.
pub fn decompose_phase_gate(u: &SingleQubitGate) -> Result<ControlledDecomposition, GateError> {
    if !u.is_phase_gate() {
        return Err(GateError::NotPhaseGate);
    }
    let theta = match u.kind() {
        GateKind::U1(angle) => *angle,
        GateKind::Z => Angle::PI,
        GateKind::S => Angle::pi_dyadic(1, 1),
        GateKind::T => Angle::pi_dyadic(1, 2),
        _ => Angle::Radians(u.matrix()[1][1].arg()),
    };
    let quarter = theta.scale(1, 2);
    Ok(ControlledDecomposition {
        alpha: theta.half(),
        a: u1(quarter),
        b: u1(-theta.half()),
        c: u1(quarter),
    })
}

/// The two-CNOT controlled-U fragment, on `max(control, target) + 1` qubits.
pub fn controlled_gate_circuit(
    dec: &ControlledDecomposition,
    control: usize,
    target: usize,
) -> Result<Circuit, GateError> {
    if control == target {
        return Err(GateError::SameQubit(control));
    }
    let mut circuit = Circuit::new(control.max(target) + 1, 0);
    circuit
        .push(Op::Gate {
            gate: dec.c.clone(),
            target,
        })?
        .push(Op::Cx { control, target })?
        .push(Op::Gate {
            gate: dec.b.clone(),
            target,
        })?
        .push(Op::Cx { control, target })?
        .push(Op::Gate {
            gate: dec.a.clone(),
            target,
        })?
        .push(Op::Gate {
            gate: u1(dec.alpha),
            target: control,
        })?;
    Ok(circuit)
}

/// Compares two square matrices entrywise at [`EQUALITY_TOLERANCE`].
///
/// With `up_to_global_phase`, `V` is first rotated by the unit phase that
/// aligns its largest-magnitude entry with the matching entry of `U`.
pub fn unitary_equal(
    u: &Array2<Complex64>,
    v: &Array2<Complex64>,
    up_to_global_phase: bool,
) -> Result<bool, GateError> {
    if u.dim() != v.dim() || u.nrows() != u.ncols() {
        return Err(GateError::DimensionMismatch(u.nrows(), v.nrows()));
    }
    let lambda = if up_to_global_phase {
        let (idx, pivot) = v
            .indexed_iter()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, z)| (i, *z))
            .unwrap_or(((0, 0), ONE));
        let ratio = u[idx] / pivot;
        if ratio.norm() == 0.0 || !ratio.norm().is_finite() {
            return Ok(false);
        }
        ratio / ratio.norm()
    } else {
        ONE
    };
    Ok(max_abs_diff(u, &v.mapv(|z| z * lambda)) <= EQUALITY_TOLERANCE)
}

/// `‖U - V‖_max` for equally shaped matrices.
pub fn max_abs_diff(u: &Array2<Complex64>, v: &Array2<Complex64>) -> f64 {
    u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn mat2_max_diff(a: &Mat2, b: &Mat2) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `‖M†M - I‖_max`.
pub fn unitarity_deviation(m: &Mat2) -> f64 {
    mat2_max_diff(&mat2_mul(&mat2_adjoint(m), m), &IDENTITY)
}

/// 4×4 controlled-U on two qubits, `control` and `target` each 0 or 1, in the
/// little-endian basis used throughout.
pub fn controlled_matrix(u: &Mat2, control: usize, target: usize) -> Array2<Complex64> {
    let mut out = Array2::zeros((4, 4));
    for col in 0..4usize {
        if col >> control & 1 == 0 {
            out[[col, col]] = ONE;
            continue;
        }
        let tb = col >> target & 1;
        for out_bit in 0..2usize {
            let row = (col & !(1 << target)) | out_bit << target;
            out[[row, col]] = u[out_bit][tb];
        }
    }
    out
}

/// Embeds a 2×2 matrix as an `Array2`.
pub fn mat2_to_array(m: &Mat2) -> Array2<Complex64> {
    Array2::from_shape_fn((2, 2), |(i, j)| m[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        mat2_max_diff(a, b) <= 1e-12
    }

    #[test]
    fn named_gates_match_their_matrices() {
        for gate in [h(), x(), y(), z(), s(), t()] {
            assert!(unitarity_deviation(gate.matrix()) <= UNITARY_TOLERANCE);
        }
        assert!(close(u2(Angle::PI, Angle::ZERO).matrix(), h().matrix()));
        assert!(close(u1(Angle::pi_dyadic(1, 1)).matrix(), s().matrix()));
        assert!(close(u1(Angle::pi_dyadic(1, 2)).matrix(), t().matrix()));
        assert!(close(
            u3(Angle::pi_dyadic(1, 1), Angle::PI, Angle::ZERO).matrix(),
            h().matrix()
        ));
    }

    #[test]
    fn rotation_gates() {
        assert!(close(r_k(1).unwrap().matrix(), z().matrix()));
        assert!(close(r_k(2).unwrap().matrix(), s().matrix()));
        let r4 = r_k(4).unwrap();
        assert_eq!(r4.kind(), &GateKind::U1(Angle::pi_dyadic(1, 3)));
        assert!((r4.matrix()[1][1].arg() - std::f64::consts::PI / 8.0).abs() < 1e-15);
        assert_eq!(r_k(0).unwrap_err(), GateError::InvalidRotationIndex(0));
        assert_eq!(r_k(31).unwrap_err(), GateError::InvalidRotationIndex(31));
    }

    #[test]
    fn feedback_gates() {
        assert!(close(
            s_k(1, DyadicPhase::ZERO).unwrap().matrix(),
            &IDENTITY
        ));
        assert!(close(
            s_k(1, DyadicPhase::new(1, 1).unwrap()).unwrap().matrix(),
            z().matrix()
        ));
        // 2π·(1/4)/2 = π/4
        assert!(close(
            s_k(2, DyadicPhase::new(1, 2).unwrap()).unwrap().matrix(),
            t().matrix()
        ));
    }

    #[test]
    fn r4_decomposition_constants() {
        let dec = decompose_phase_gate(&r_k(4).unwrap()).unwrap();
        assert_eq!(dec.alpha, Angle::pi_dyadic(1, 4));
        assert_eq!(dec.a.kind(), &GateKind::U1(Angle::pi_dyadic(1, 5)));
        assert_eq!(dec.b.kind(), &GateKind::U1(Angle::pi_dyadic(-1, 4)));
        assert_eq!(dec.c.kind(), &GateKind::U1(Angle::pi_dyadic(1, 5)));
        assert_eq!(dec.a.label(), "U1(π/32)");
        assert_eq!(dec.b.label(), "U1(-π/16)");
    }

    #[test]
    fn identity_and_r2_decompositions() {
        let id = decompose_phase_gate(&u1(Angle::ZERO)).unwrap();
        assert_eq!(id.alpha, Angle::ZERO);
        assert!(close(id.a.matrix(), &IDENTITY) && close(id.b.matrix(), &IDENTITY));

        let r2 = r_k(2).unwrap();
        let dec = decompose_phase_gate(&r2).unwrap();
        assert_eq!(dec.alpha, Angle::pi_dyadic(1, 2));
        assert_eq!(dec.a.kind(), &GateKind::U1(Angle::pi_dyadic(1, 3)));
        assert_eq!(dec.b.kind(), &GateKind::U1(Angle::pi_dyadic(-1, 2)));
        assert!(dec.reconstruction_residual(r2.matrix()) <= 1e-12);
    }

    #[test]
    fn decomposition_needs_a_phase_gate() {
        assert_eq!(
            decompose_phase_gate(&h()).unwrap_err(),
            GateError::NotPhaseGate
        );
        let scaled =
            SingleQubitGate::from_matrix([[Complex64::new(0.0, 1.0), ZERO], [ZERO, ONE]], "iZ-ish")
                .unwrap();
        assert_eq!(
            decompose_phase_gate(&scaled).unwrap_err(),
            GateError::NotPhaseGate
        );
    }

    #[test]
    fn non_diagonal_kinds_fall_back_to_matrix_angle() {
        let custom = SingleQubitGate::from_matrix(*r_k(3).unwrap().matrix(), "custom").unwrap();
        let dec = decompose_phase_gate(&custom).unwrap();
        assert!(dec.reconstruction_residual(custom.matrix()) <= 1e-12);
        assert!(dec.identity_residual() <= 1e-12);
    }

    #[test]
    fn fragment_acts_as_controlled_r4() {
        let dec = decompose_phase_gate(&r_k(4).unwrap()).unwrap();
        let frag = controlled_gate_circuit(&dec, 0, 1).unwrap();
        let u = frag.unitary().unwrap();
        let expected = controlled_matrix(r_k(4).unwrap().matrix(), 0, 1);
        assert!(max_abs_diff(&u, &expected) <= 1e-12);
        assert!((u[[0, 0]] - ONE).norm() <= 1e-12);
        let e = unit(std::f64::consts::PI / 8.0);
        assert!((u[[3, 3]] - e).norm() <= 1e-12);
        // control (qubit 0) off, target on: index 2 unchanged
        assert!((u[[2, 2]] - ONE).norm() <= 1e-12);
        assert_eq!(
            controlled_gate_circuit(&dec, 1, 1).unwrap_err(),
            GateError::SameQubit(1)
        );
    }

    #[test]
    fn unitary_equality_modes() {
        let hh = mat2_to_array(h().matrix());
        assert!(unitary_equal(&hh, &hh, false).unwrap());
        let zz = mat2_to_array(z().matrix());
        let rotated = zz.mapv(|v| v * unit(std::f64::consts::PI / 3.0));
        assert!(unitary_equal(&zz, &rotated, true).unwrap());
        assert!(!unitary_equal(&zz, &rotated, false).unwrap());
        let ss = mat2_to_array(s().matrix());
        let tt = mat2_to_array(t().matrix());
        assert!(!unitary_equal(&ss, &tt, false).unwrap());
        assert!(!unitary_equal(&ss, &tt, true).unwrap());
        assert!(unitary_equal(&ss, &Array2::zeros((4, 4)), false).is_err());
    }

    #[test]
    fn non_unitary_matrices_are_rejected() {
        assert!(SingleQubitGate::from_matrix([[ONE, ONE], [ZERO, ONE]], "bad").is_err());
    }
}
