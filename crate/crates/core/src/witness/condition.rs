//! Condition A: Bell-Klyshko thresholds.
//!
//! For N qubits, local realism bounds |E(F_N)| by 2, states in which at most
//! N−1 particles are entangled bound it by 2^{N/2}, and quantum mechanics
//! allows up to 2^{(N+1)/2}. Exceeding 2^{N/2} witnesses genuine N-particle
//! entanglement.

use serde::{Deserialize, Serialize};

use super::measured::MeasuredValue;
use crate::bell::{klyshko_operator, PartySettings};
use crate::error::{Error, Result};
use crate::hilbert::QuantumState;

/// Margin applied when comparing an interval against a threshold, so exact
/// saturation (e.g. 2√2 against 2^{3/2}) reads as "not exceeded".
pub const THRESHOLD_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub local_realist: f64,
    pub biseparable: f64,
    pub quantum_max: f64,
}

impl Thresholds {
    pub fn for_parties(n: usize) -> Self {
        let n = n as f64;
        Thresholds { local_realist: 2.0, biseparable: 2f64.powf(n / 2.0), quantum_max: 2f64.powf((n + 1.0) / 2.0) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdOutcome {
    Exceeded,
    NotExceeded,
    /// The 1σ interval straddles the threshold.
    Inconclusive,
}

impl ThresholdOutcome {
    pub fn compare(value: &MeasuredValue, threshold: f64) -> Self {
        if value.lower() > threshold + THRESHOLD_MARGIN {
            ThresholdOutcome::Exceeded
        } else if value.upper() <= threshold + THRESHOLD_MARGIN {
            ThresholdOutcome::NotExceeded
        } else {
            ThresholdOutcome::Inconclusive
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ThresholdOutcome::Exceeded => "witnessed",
            ThresholdOutcome::NotExceeded => "not witnessed",
            ThresholdOutcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NoViolation,
    LocalRealismViolated,
    NPartiteWitnessed,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessVerdict {
    pub n_parties: usize,
    pub classification: Classification,
    pub tested_value: MeasuredValue,
    pub thresholds: Thresholds,
    /// Against the local-realist bound 2.
    pub local_realism: ThresholdOutcome,
    /// Against the (N−1)-entangled bound 2^{N/2}.
    pub n_partite: ThresholdOutcome,
}

impl WitnessVerdict {
    pub fn summary(&self) -> String {
        let lr = match self.local_realism {
            ThresholdOutcome::Exceeded => "local realism violated",
            ThresholdOutcome::NotExceeded => "no violation of local realism",
            ThresholdOutcome::Inconclusive => "local realism test inconclusive",
        };
        format!("{lr}; {}-particle witness: {}", self.n_parties, self.n_partite.describe())
    }
}

fn classify(tested: MeasuredValue, n: usize) -> WitnessVerdict {
    let thresholds = Thresholds::for_parties(n);
    let local_realism = ThresholdOutcome::compare(&tested, thresholds.local_realist);
    let n_partite = ThresholdOutcome::compare(&tested, thresholds.biseparable);
    let classification = match (n_partite, local_realism) {
        (ThresholdOutcome::Exceeded, _) => Classification::NPartiteWitnessed,
        (_, ThresholdOutcome::Exceeded) => Classification::LocalRealismViolated,
        (_, ThresholdOutcome::NotExceeded) => Classification::NoViolation,
        (_, ThresholdOutcome::Inconclusive) => Classification::Inconclusive,
    };
    WitnessVerdict { n_parties: n, classification, tested_value: tested, thresholds, local_realism, n_partite }
}

/// Evaluates |E(F_N)| on a state and classifies it (sigma 0).
pub fn condition_a(state: &QuantumState, settings: &PartySettings) -> Result<WitnessVerdict> {
    if settings.n_parties() != state.n_parties() {
        return Err(Error::argument(format!(
            "{}-party settings for a {}-party state",
            settings.n_parties(),
            state.n_parties()
        )));
    }
    let value = klyshko_operator(settings, false)?.expectation(state)?;
    Ok(classify(MeasuredValue::exact(value.abs()), state.n_parties()))
}

/// Classifies a measured |E(F_N)| using its 1σ interval.
pub fn condition_a_from_data(measured: MeasuredValue, n: usize) -> Result<WitnessVerdict> {
    if n < 2 {
        return Err(Error::argument(format!("Condition A needs at least 2 parties, got {n}")));
    }
    Ok(classify(measured.abs(), n))
}
