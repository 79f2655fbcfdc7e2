//! Dense linear algebra over N-qubit Hilbert spaces.

mod eigen;
pub mod file;
mod matrix;
pub mod presets;
mod spin;
mod state;

pub use eigen::{hermitian_eigen, HermitianEigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::ComplexMatrix;
pub use spin::{
    pauli, pauli_string, product_observable, spin_op, tensor, Axis, BasisIndex, Spin, SpinDirection, UNIT_TOL,
};
pub use state::{
    embed, expectation, ghz, ghz_class, ghz_class_targets, matrix_element, mix, permute_operator, permute_parties,
    psi_b, qubit, validate_density, validate_matrix, Permutation, QuantumState, StateKind, ValidationReport,
    ALGEBRAIC_TOL, PHYSICAL_TOL, WEIGHT_SUM_TOL,
};

pub type ComplexScalar = num_complex::Complex64;
