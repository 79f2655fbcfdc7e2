//! Experimentally testable sufficient conditions for genuine N-particle
//! entanglement of qubits.
//!
//! * [`hilbert`]: dense states, operators, tensor products and density-matrix
//!   validation.
//! * [`bell`]: CHSH / Bell-Klyshko / Mermin operators and the scan observables
//!   used to read off far off-diagonal density-matrix elements.
//! * [`witness`]: the Bell-Klyshko threshold test (Condition A), the
//!   GHZ-fidelity test (Condition B), angle optimization and harmonic
//!   extraction.
//! * [`experiments`]: record ingestion and the analyses of three published
//!   three-particle experiments.

pub mod bell;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod random;
pub mod witness;

pub use error::{Error, Result};
pub use hilbert::{BasisIndex, ComplexMatrix, QuantumState, SpinDirection};
pub use witness::MeasuredValue;
