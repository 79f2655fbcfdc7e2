//! A two-particle entangled state that mimics three-photon data.
//!
//! `W(α) = α P₋⁽²⁾ ⊗ P_S⁽¹³⁾ + (1−α)/2 (P_{↑↑↓} + P_{↓↓↑})`, with `P₋` the σ_x
//! projector and `P_S` the singlet on particles 1 and 3.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::record::ExperimentRecord;
use crate::error::{Error, Result};
use crate::hilbert::{embed, expectation, pauli, qubit, Axis, BasisIndex, ComplexMatrix, QuantumState};
use crate::witness::MeasuredValue;

pub const FIT_GRID_STEP: f64 = 1e-4;

pub fn build_w_state(alpha: f64) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::validation("alpha must lie in [0, 1]", format!("alpha = {alpha}")));
    }
    let minus = embed(&qubit::x_projector(false), &[2], 3)?;
    let singlet = embed(&qubit::projector(&qubit::singlet()), &[1, 3], 3)?;
    let entangled = &minus * &singlet;
    let p = |label: usize| QuantumState::basis(BasisIndex::from_label(3, label).expect("label in 1..8")).rho().clone();
    let classical = &p(2) + &p(7);
    QuantumState::density(&entangled.scale_re(alpha) + &classical.scale_re((1.0 - alpha) / 2.0))
}

/// `P₊⁽¹⁾ ⊗ P₋⁽²⁾ ⊗ σ_x⁽³⁾`: the xxx interference signal.
pub fn interference_observable() -> ComplexMatrix {
    qubit::x_projector(true).kron(&qubit::x_projector(false)).kron(&pauli(Axis::X))
}

/// `P↑⁽¹⁾ ⊗ P₋⁽²⁾ ⊗ σ_x⁽³⁾`: the control measurement with particle 1 along z.
pub fn control_observable() -> ComplexMatrix {
    qubit::z_projector(true).kron(&qubit::x_projector(false)).kron(&pauli(Axis::X))
}

/// Constraint ids and what they constrain.
pub const INTERFERENCE: &str = "a3";
pub const CONTROL: &str = "a4";

/// The population constraint for basis label `k`, e.g. `a1[2]` or `a2[1]`.
pub fn population_id(label: usize) -> String {
    let group = if label == 2 || label == 7 { "a1" } else { "a2" };
    format!("{group}[{label}]")
}

/// Every quantity the fit compares, predicted from the explicit matrix.
pub fn w_predictions(state: &QuantumState) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    out.insert(INTERFERENCE.to_string(), expectation(state, &interference_observable())?);
    out.insert(CONTROL.to_string(), expectation(state, &control_observable())?);
    for (k, p) in state.populations().iter().enumerate() {
        out.insert(population_id(k + 1), *p);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WFitReport {
    pub alpha: f64,
    /// Constraints whose maximum residual the fit minimizes.
    pub fitted: Vec<String>,
    pub predicted: BTreeMap<String, f64>,
    pub targets: BTreeMap<String, MeasuredValue>,
    /// `predicted − target`.
    pub residuals: BTreeMap<String, f64>,
    /// Constraints off by more than their sigma plus 0.01.
    pub unmet: Vec<String>,
}

/// Targets from a record: correlations `a3`, `a4` and, when present, the
/// population table.
pub fn w_targets(record: &ExperimentRecord) -> Result<BTreeMap<String, MeasuredValue>> {
    let mut out = BTreeMap::new();
    for id in [INTERFERENCE, CONTROL] {
        let c = record
            .correlation(id)
            .ok_or_else(|| Error::argument(format!("record `{}` lacks correlation `{id}`", record.name)))?;
        out.insert(id.to_string(), c.measured());
    }
    if let Some(pops) = &record.populations {
        for label in 1..=8 {
            out.insert(population_id(label), pops.get(label));
        }
    }
    Ok(out)
}

fn max_residual(pred: &BTreeMap<String, f64>, targets: &BTreeMap<String, MeasuredValue>, ids: &[String]) -> f64 {
    ids.iter().map(|id| (pred[id] - targets[id].value).abs()).fold(0.0, f64::max)
}

/// Grid search over α ∈ [0, 1] in steps of [`FIT_GRID_STEP`], minimizing the
/// largest absolute residual on the coherence constraints `a3`, `a4`.
/// Ties keep the smallest α. The population residuals are reported but not
/// fitted: W's populations are fixed by α through `a3`, and pulling them in
/// would trade the interference match for a closer 0.4.
pub fn fit_w_state(targets: &BTreeMap<String, MeasuredValue>) -> Result<WFitReport> {
    let fitted: Vec<String> =
        [INTERFERENCE, CONTROL].iter().filter(|id| targets.contains_key(**id)).map(|id| id.to_string()).collect();
    if fitted.is_empty() {
        return Err(Error::argument("fit needs at least one of a3, a4"));
    }
    // W is affine in α, so grid predictions interpolate the two endpoints;
    // the reported values are recomputed from the matrix at the chosen α.
    let at0 = w_predictions(&build_w_state(0.0)?)?;
    let at1 = w_predictions(&build_w_state(1.0)?)?;
    let steps = (1.0 / FIT_GRID_STEP).round() as usize;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..=steps {
        let alpha = k as f64 / steps as f64;
        let pred: BTreeMap<String, f64> =
            at0.iter().map(|(id, p0)| (id.clone(), p0 + alpha * (at1[id] - p0))).collect();
        let r = max_residual(&pred, targets, &fitted);
        if r < best.1 - 1e-15 {
            best = (alpha, r);
        }
    }
    let alpha = best.0;
    let predicted_all = w_predictions(&build_w_state(alpha)?)?;
    let mut predicted = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    let mut unmet = Vec::new();
    for (id, t) in targets {
        let p = *predicted_all.get(id).ok_or_else(|| Error::argument(format!("unknown constraint `{id}`")))?;
        let r = p - t.value;
        if r.abs() > t.sigma + 0.01 {
            unmet.push(id.clone());
        }
        predicted.insert(id.clone(), p);
        residuals.insert(id.clone(), r);
    }
    Ok(WFitReport { alpha, fitted, predicted, targets: targets.clone(), residuals, unmet })
}

impl WFitReport {
    pub fn render_text(&self) -> String {
        let mut s = format!("alpha                   {:.12}  (quoted 3/8)\n", self.alpha);
        for (id, p) in &self.predicted {
            s += &format!(
                "{id:<8} predicted {p:>16.12}  target {:>8.4}  residual {:>16.12}{}\n",
                self.targets[id].value,
                self.residuals[id],
                if self.unmet.contains(id) { "  (not met)" } else { "" }
            );
        }
        s
    }
}
