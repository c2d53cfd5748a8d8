//! Standard gate matrices over the exact backend.
//!
//! Every entry lives in Q(ζ₈): ±1/√2 for Hadamard, i for S, ζ for T.

use crate::matrix::Matrix;
use crate::scalar::Cyclotomic;
use num::traits::One;

/// H = (1/√2)·[[1, 1], [1, −1]].
pub fn hadamard() -> Matrix<Cyclotomic> {
    let h = (Cyclotomic::sqrt2() * Cyclotomic::from_ratio(1, 2)).clone();
    let mut m = Matrix::from_fn(2, |_, _| h.clone());
    m[(1, 1)] = -h;
    m
}

pub fn pauli_x() -> Matrix<Cyclotomic> {
    let mut m = Matrix::zeros(2);
    m[(0, 1)] = Cyclotomic::one();
    m[(1, 0)] = Cyclotomic::one();
    m
}

pub fn pauli_z() -> Matrix<Cyclotomic> {
    let mut m = Matrix::identity(2);
    m[(1, 1)] = Cyclotomic::from_int(-1);
    m
}

/// S = diag(1, i).
pub fn phase_s() -> Matrix<Cyclotomic> {
    let mut m = Matrix::identity(2);
    m[(1, 1)] = Cyclotomic::i();
    m
}

/// T = diag(1, ζ) with ζ = e^{iπ/4}.
pub fn phase_t() -> Matrix<Cyclotomic> {
    let mut m = Matrix::identity(2);
    m[(1, 1)] = Cyclotomic::omega();
    m
}

/// CNOT with the first tensor factor as control.
pub fn cnot() -> Matrix<Cyclotomic> {
    let mut m = Matrix::zeros(4);
    m[(0, 0)] = Cyclotomic::one();
    m[(1, 1)] = Cyclotomic::one();
    m[(2, 3)] = Cyclotomic::one();
    m[(3, 2)] = Cyclotomic::one();
    m
}

/// SWAP of two qubits.
pub fn swap() -> Matrix<Cyclotomic> {
    let mut m = Matrix::zeros(4);
    m[(0, 0)] = Cyclotomic::one();
    m[(1, 2)] = Cyclotomic::one();
    m[(2, 1)] = Cyclotomic::one();
    m[(3, 3)] = Cyclotomic::one();
    m
}

/// diag(1, 1, 1, φ) — the controlled phase with the given corner.
pub fn controlled_phase(corner: Cyclotomic) -> Matrix<Cyclotomic> {
    let mut m = Matrix::identity(4);
    m[(3, 3)] = corner;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates_are_unitary() {
        for g in [hadamard(), pauli_x(), pauli_z(), phase_s(), phase_t()] {
            assert!(g.is_unitary(0.0), "{g}");
        }
        for g in [cnot(), swap(), controlled_phase(-Cyclotomic::i())] {
            assert!(g.is_unitary(0.0), "{g}");
        }
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let c = cnot();
        // |10⟩ ↦ |11⟩.
        assert_eq!(c[(3, 2)], Cyclotomic::one());
        assert_eq!(c[(2, 2)], Cyclotomic::from_int(0));
    }
}
