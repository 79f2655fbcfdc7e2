//! JSON state files.
//!
//! ```json
//! {"n_parties": 3, "kind": "pure", "ket": [[0.707, 0], ...], "rho": [[[re, im], ...], ...]}
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::state::{QuantumState, StateKind, PHYSICAL_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateDocument {
    pub n_parties: usize,
    pub kind: StateKind,
    pub ket: Option<Vec<[f64; 2]>>,
    pub rho: Vec<Vec<[f64; 2]>>,
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<&QuantumState> for StateDocument {
    fn from(state: &QuantumState) -> Self {
        StateDocument {
            n_parties: state.n_parties(),
            kind: state.kind(),
            ket: state.ket().map(|k| k.iter().map(pair).collect()),
            rho: state.rho().rows().map(|r| r.iter().map(pair).collect()).collect(),
        }
    }
}

impl StateDocument {
    /// Checks every type invariant and builds the state.
    pub fn into_state(self) -> Result<QuantumState> {
        if self.n_parties == 0 || self.n_parties > 6 {
            return Err(Error::validation("n_parties must be between 1 and 6", format!("got {}", self.n_parties)));
        }
        let dim = 1usize << self.n_parties;
        if self.rho.len() != dim || self.rho.iter().any(|r| r.len() != dim) {
            return Err(Error::validation(
                "rho must be a 2^n × 2^n matrix",
                format!("expected {dim}×{dim} for n_parties = {}", self.n_parties),
            ));
        }
        let rows: Vec<Vec<Complex64>> = self.rho.iter().map(|r| r.iter().map(complex).collect()).collect();
        let rho = ComplexMatrix::from_rows(&rows)?;
        match self.kind {
            StateKind::Pure => {
                let ket = self.ket.ok_or_else(|| Error::validation("pure state requires a ket", "\"ket\" is null"))?;
                if ket.len() != dim {
                    return Err(Error::validation(
                        "ket must have 2^n amplitudes",
                        format!("expected {dim}, got {}", ket.len()),
                    ));
                }
                let state = QuantumState::pure(ket.iter().map(complex).collect())?;
                let defect = state.rho().max_abs_diff(&rho)?;
                if defect > PHYSICAL_TOL {
                    return Err(Error::validation(
                        "rho must equal the outer product of ket",
                        format!("max entry defect {defect:e}"),
                    ));
                }
                Ok(state)
            }
            StateKind::Density => {
                if self.ket.is_some() {
                    return Err(Error::validation("density state must have \"ket\": null", "ket was provided"));
                }
                QuantumState::density(rho)
            }
        }
    }
}

pub fn to_json(state: &QuantumState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&StateDocument::from(state))?)
}

pub fn from_json(text: &str) -> Result<QuantumState> {
    let doc: StateDocument = serde_json::from_str(text)?;
    doc.into_state()
}

pub fn read_state(path: impl AsRef<Path>) -> Result<QuantumState> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_state(path: impl AsRef<Path>, state: &QuantumState) -> Result<()> {
    std::fs::write(path, to_json(state)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::presets::singlet_triplet_mixture;
    use crate::hilbert::state::{ghz, psi_b};

    #[test]
    fn round_trips_pure_and_mixed_states() {
        for state in [ghz(3).unwrap(), psi_b(), singlet_triplet_mixture().unwrap()] {
            let back = from_json(&to_json(&state).unwrap()).unwrap();
            assert_eq!(back, state);
        }
    }

    #[test]
    fn rejects_non_unit_trace_naming_the_invariant() {
        let mut doc = StateDocument::from(&singlet_triplet_mixture().unwrap());
        doc.rho[0][0][0] += 0.2;
        let err = doc.into_state().unwrap_err();
        assert!(err.to_string().contains("unit trace"), "{err}");
    }

    #[test]
    fn rejects_pure_ket_inconsistent_with_rho() {
        let mut doc = StateDocument::from(&ghz(3).unwrap());
        doc.rho[0][7] = [0.0, 0.0];
        doc.rho[7][0] = [0.0, 0.0];
        let err = doc.into_state().unwrap_err();
        assert!(err.to_string().contains("outer product"), "{err}");
    }

    #[test]
    fn rejects_wrong_shapes() {
        let mut doc = StateDocument::from(&ghz(2).unwrap());
        doc.rho.pop();
        assert!(doc.into_state().unwrap_err().to_string().contains("2^n × 2^n"));
        let mut doc = StateDocument::from(&ghz(2).unwrap());
        doc.ket = None;
        assert!(doc.into_state().unwrap_err().to_string().contains("requires a ket"));
        assert!(from_json("{\"n_parties\": 2}").is_err());
    }
}
