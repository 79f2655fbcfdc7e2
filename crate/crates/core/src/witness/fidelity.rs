//! Condition B: fidelity with a GHZ-class target.
//!
//! Any state with at most N−1 entangled particles has fidelity at most ½ with
//! every maximally entangled GHZ-class state, so F > ½ witnesses genuine
//! N-particle entanglement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::condition::ThresholdOutcome;
use super::measured::MeasuredValue;
use crate::error::{Error, Result};
use crate::hilbert::{ghz_class_targets, QuantumState, StateKind, PHYSICAL_TOL};

pub const FIDELITY_THRESHOLD: f64 = 0.5;
/// Strict margin for the state-level check, so exactly ½ does not pass.
pub const CONDITION_B_MARGIN: f64 = 1e-12;

/// `⟨t|ρ|t⟩` for a pure target `t`.
pub fn fidelity(state: &QuantumState, target: &QuantumState) -> Result<f64> {
    if target.kind() != StateKind::Pure {
        return Err(Error::argument("fidelity target must be a pure state"));
    }
    if target.dim() != state.dim() {
        return Err(Error::argument(format!(
            "target has {} parties, state has {}",
            target.n_parties(),
            state.n_parties()
        )));
    }
    let t = target.ket().expect("pure target has a ket");
    let rt = state.rho().apply(t)?;
    let f: Complex64 = t.iter().zip(&rt).map(|(a, b)| a.conj() * b).sum();
    if f.im.abs() > PHYSICAL_TOL {
        return Err(Error::Internal(format!("fidelity has imaginary part {:e}", f.im)));
    }
    Ok(f.re)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionB {
    pub fidelity: f64,
    pub threshold: f64,
    pub met: bool,
}

pub fn condition_b(state: &QuantumState, target: &QuantumState) -> Result<ConditionB> {
    let f = fidelity(state, target)?;
    Ok(ConditionB { fidelity: f, threshold: FIDELITY_THRESHOLD, met: f > FIDELITY_THRESHOLD + CONDITION_B_MARGIN })
}

/// The GHZ-class target of largest fidelity; ties keep the first in
/// [`ghz_class_targets`] order.
pub fn best_ghz_class_fidelity(state: &QuantumState) -> Result<(String, f64)> {
    let mut best: Option<(String, f64)> = None;
    for (name, target) in ghz_class_targets(state.n_parties())? {
        let f = fidelity(state, &target)?;
        if best.as_ref().is_none_or(|(_, b)| f > *b + CONDITION_B_MARGIN) {
            best = Some((name, f));
        }
    }
    Ok(best.expect("at least two targets"))
}

/// Fidelity with `(|↑…↑⟩ + |↓…↓⟩)/√2` assembled from measured pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub p_up: MeasuredValue,
    pub p_down: MeasuredValue,
    /// `Re ρ_{↑…↑,↓…↓}`.
    pub coherence: MeasuredValue,
    pub fidelity: MeasuredValue,
    pub threshold: f64,
    pub condition_b: ThresholdOutcome,
}

/// `F = ½(P↑ + P↓) + Re ρ_{↑…↑,↓…↓}` with quadrature uncertainties.
///
/// Rejects populations outside `[0, 1]`, `P↑ + P↓ > 1`, and coherences larger
/// than `½` in modulus, each beyond the stated uncertainty.
pub fn fidelity_from_components(
    p_up: MeasuredValue,
    p_down: MeasuredValue,
    coherence: MeasuredValue,
) -> Result<FidelityReport> {
    for (name, p) in [("P↑", p_up), ("P↓", p_down)] {
        if p.upper() < 0.0 || p.lower() > 1.0 {
            return Err(Error::validation("population must lie in [0, 1]", format!("{name} = {p}")));
        }
    }
    let total = p_up + p_down;
    if total.lower() > 1.0 + PHYSICAL_TOL {
        return Err(Error::validation("populations must sum to at most 1", format!("P↑ + P↓ = {total}")));
    }
    if coherence.abs().lower() > 0.5 + PHYSICAL_TOL {
        return Err(Error::validation("|Re ρ_{↑↓}| must not exceed 1/2", format!("{coherence}")));
    }
    let fidelity = total * 0.5 + coherence;
    Ok(FidelityReport {
        p_up,
        p_down,
        coherence,
        fidelity,
        threshold: FIDELITY_THRESHOLD,
        condition_b: ThresholdOutcome::compare(&fidelity, FIDELITY_THRESHOLD),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::presets::{bell_signal_mixture, singlet_triplet_mixture};
    use crate::hilbert::{ghz, ghz_class, psi_b, BasisIndex};

    fn mv(v: f64, s: f64) -> MeasuredValue {
        MeasuredValue::new(v, s).unwrap()
    }

    #[test]
    fn ghz_has_unit_fidelity_with_itself() {
        let g = ghz(3).unwrap();
        assert!((fidelity(&g, &g).unwrap() - 1.0).abs() < 1e-12);
        assert!(condition_b(&g, &g).unwrap().met);
    }

    #[test]
    fn pan_style_components() {
        let r = fidelity_from_components(mv(0.40, 0.0), mv(0.40, 0.0), mv(0.35, 0.0)).unwrap();
        assert!((r.fidelity.value - 0.75).abs() < 1e-12);
        assert_eq!(r.condition_b, ThresholdOutcome::Exceeded);
    }

    #[test]
    fn inconsistent_components_are_rejected() {
        let e = fidelity_from_components(mv(1.0, 0.0), mv(1.0, 0.0), mv(0.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::Validation { .. }));
        assert!(fidelity_from_components(mv(-0.2, 0.01), mv(0.3, 0.0), mv(0.0, 0.0)).is_err());
        assert!(fidelity_from_components(mv(0.5, 0.0), mv(0.5, 0.0), mv(0.7, 0.0)).is_err());
        // slightly negative but within sigma is fine
        assert!(fidelity_from_components(mv(-0.005, 0.01), mv(0.3, 0.0), mv(0.0, 0.0)).is_ok());
    }

    #[test]
    fn bell_signal_mixture_reaches_one_half_only() {
        let rho = bell_signal_mixture().unwrap();
        let best = best_ghz_class_fidelity(&rho).unwrap();
        assert!((best.1 - 0.5).abs() < 1e-12);
        assert!(!condition_b(&rho, &psi_b()).unwrap().met);
        let minus = ghz_class(BasisIndex::from_label(3, 2).unwrap(), false);
        assert!((fidelity(&rho, &minus).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity(&rho, &psi_b()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn singlet_triplet_mixture_does_not_pass() {
        let rho = singlet_triplet_mixture().unwrap();
        let (_, f) = best_ghz_class_fidelity(&rho).unwrap();
        assert!(f <= 0.5 + 1e-12);
    }

    #[test]
    fn mixed_target_is_rejected() {
        let g = ghz(3).unwrap();
        assert!(fidelity(&g, &g.to_density()).is_err());
    }
}
