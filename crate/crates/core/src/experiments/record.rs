//! Experiment records: measured populations, signal amplitudes and Bell values.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{BasisIndex, QuantumState, PHYSICAL_TOL};
use crate::witness::MeasuredValue;

/// Extra slack allowed on the population sum beyond the combined sigma.
pub const POPULATION_SUM_SLACK: f64 = 0.02;

/// Measured z-basis populations of a 3-qubit state, labels 1..8.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MeasuredValue>", into = "Vec<MeasuredValue>")]
pub struct PopulationTable {
    entries: [MeasuredValue; 8],
}

impl PopulationTable {
    pub fn new(entries: [MeasuredValue; 8]) -> Result<Self> {
        for (k, p) in entries.iter().enumerate() {
            if !p.value.is_finite() || !p.sigma.is_finite() || p.sigma < 0.0 {
                return Err(Error::validation("population must be finite with sigma ≥ 0", format!("P{} = {p}", k + 1)));
            }
            if p.upper() < -PHYSICAL_TOL || p.lower() > 1.0 + PHYSICAL_TOL {
                return Err(Error::validation("population must lie in [0, 1]", format!("P{} = {p}", k + 1)));
            }
        }
        let total: MeasuredValue = entries.iter().copied().sum();
        if (total.value - 1.0).abs() > total.sigma + POPULATION_SUM_SLACK {
            return Err(Error::validation("populations must sum to 1", format!("sum = {total}")));
        }
        Ok(PopulationTable { entries })
    }

    pub fn from_values(values: [f64; 8], sigma: f64) -> Result<Self> {
        Self::new(values.map(|v| MeasuredValue { value: v, sigma }))
    }

    /// Exact populations of a 3-qubit state.
    pub fn from_state(state: &QuantumState) -> Result<Self> {
        if state.n_parties() != 3 {
            return Err(Error::argument("population tables describe three qubits"));
        }
        let p = state.populations();
        Self::new(std::array::from_fn(|k| MeasuredValue::exact(p[k])))
    }

    /// By basis label, 1..8.
    pub fn get(&self, label: usize) -> MeasuredValue {
        self.entries[label - 1]
    }

    pub fn at(&self, index: BasisIndex) -> MeasuredValue {
        self.entries[index.offset()]
    }

    pub fn entries(&self) -> &[MeasuredValue; 8] {
        &self.entries
    }

    pub fn total(&self) -> MeasuredValue {
        self.entries.iter().copied().sum()
    }
}

impl TryFrom<Vec<MeasuredValue>> for PopulationTable {
    type Error = Error;
    fn try_from(v: Vec<MeasuredValue>) -> Result<Self> {
        let entries: [MeasuredValue; 8] = v
            .try_into()
            .map_err(|v: Vec<MeasuredValue>| Error::argument(format!("expected 8 populations, got {}", v.len())))?;
        PopulationTable::new(entries)
    }
}

impl From<PopulationTable> for Vec<MeasuredValue> {
    fn from(t: PopulationTable) -> Self {
        t.entries.to_vec()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub setting: String,
    pub value: f64,
    pub sigma: f64,
}

impl Correlation {
    pub fn measured(&self) -> MeasuredValue {
        MeasuredValue { value: self.value, sigma: self.sigma }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub populations: Option<PopulationTable>,
    /// Fitted amplitude `A` of the Bell-signal difference.
    pub signal_amplitude: Option<MeasuredValue>,
    pub mermin_value: Option<MeasuredValue>,
    pub correlations: Option<Vec<Correlation>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    name: String,
    #[serde(default)]
    populations: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    signal_amplitude: Option<serde_json::Value>,
    #[serde(default)]
    mermin_value: Option<serde_json::Value>,
    #[serde(default)]
    correlations: Option<Vec<serde_json::Value>>,
}

fn field<T: serde::de::DeserializeOwned>(path: String, value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Schema { path, message: e.to_string() })
}

fn measured(path: String, value: serde_json::Value) -> Result<MeasuredValue> {
    let m: MeasuredValue = field(path.clone(), value)?;
    MeasuredValue::new(m.value, m.sigma).map_err(|e| Error::Schema { path, message: e.to_string() })
}

impl ExperimentRecord {
    pub fn correlation(&self, setting: &str) -> Option<&Correlation> {
        self.correlations.as_ref()?.iter().find(|c| c.setting == setting)
    }

    fn validate(&self) -> Result<()> {
        if self.populations.is_none()
            && self.signal_amplitude.is_none()
            && self.mermin_value.is_none()
            && self.correlations.is_none()
        {
            return Err(Error::validation("record needs at least one measurement", self.name.clone()));
        }
        Ok(())
    }
}

/// Parses and validates a record document. Schema violations name the
/// offending field, e.g. `populations[3].sigma`.
pub fn load_record(document: &str) -> Result<ExperimentRecord> {
    let raw: RawRecord = serde_json::from_str(document)?;
    let populations = match raw.populations {
        None => None,
        Some(items) => {
            if items.len() != 8 {
                return Err(Error::Schema {
                    path: "populations".into(),
                    message: format!("expected 8 entries, got {}", items.len()),
                });
            }
            let mut entries = Vec::with_capacity(8);
            for (k, item) in items.into_iter().enumerate() {
                entries.push(measured(format!("populations[{k}]"), item)?);
            }
            Some(PopulationTable::try_from(entries)?)
        }
    };
    let signal_amplitude = raw.signal_amplitude.map(|v| measured("signal_amplitude".into(), v)).transpose()?;
    let mermin_value = raw.mermin_value.map(|v| measured("mermin_value".into(), v)).transpose()?;
    let correlations = match raw.correlations {
        None => None,
        Some(items) => Some(
            items
                .into_iter()
                .enumerate()
                .map(|(k, item)| {
                    let c: Correlation = field(format!("correlations[{k}]"), item)?;
                    MeasuredValue::new(c.value, c.sigma)
                        .map_err(|e| Error::Schema { path: format!("correlations[{k}]"), message: e.to_string() })?;
                    Ok(c)
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let record = ExperimentRecord { name: raw.name, populations, signal_amplitude, mermin_value, correlations };
    record.validate()?;
    Ok(record)
}

pub fn read_record(path: impl AsRef<Path>) -> Result<ExperimentRecord> {
    load_record(&std::fs::read_to_string(path)?)
}

pub const BUNDLED_RECORDS: [&str; 3] = ["rauschenbeutel", "pan", "bouwmeester"];

pub fn bundled_document(name: &str) -> Option<&'static str> {
    match name {
        "rauschenbeutel" => Some(include_str!("../../data/rauschenbeutel.json")),
        "pan" => Some(include_str!("../../data/pan.json")),
        "bouwmeester" => Some(include_str!("../../data/bouwmeester.json")),
        _ => None,
    }
}

/// Loads `<name>.json` from `dir` when given, otherwise the bundled copy.
pub fn named_record(name: &str, dir: Option<&Path>) -> Result<ExperimentRecord> {
    match dir {
        Some(dir) => read_record(PathBuf::from(dir).join(format!("{name}.json"))),
        None => {
            let doc = bundled_document(name).ok_or_else(|| Error::argument(format!("no bundled record `{name}`")))?;
            load_record(doc)
        }
    }
}
