//! No biseparable state exceeds fidelity ½ with any GHZ-class target.

use entwit::hilbert::ghz_class_targets;
use entwit::random::{
    random_biseparable_density, random_biseparable_mixture, random_biseparable_pure, seeded, BIPARTITIONS_OF_THREE,
};
use entwit::witness::{condition_b, fidelity, fidelity_from_components};
use entwit::{BasisIndex, MeasuredValue, QuantumState};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn max_fidelity(state: &QuantumState) -> f64 {
    ghz_class_targets(3).unwrap().iter().map(|(_, t)| fidelity(state, t).unwrap()).fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn biseparable_pure_states_stay_at_or_below_one_half() {
    let mut rng = seeded(201);
    for k in 0..1000 {
        let state = random_biseparable_pure(&mut rng, BIPARTITIONS_OF_THREE[k % 3]);
        assert!(max_fidelity(&state) <= 0.5 + TOL);
    }
}

#[test]
fn biseparable_mixtures_stay_at_or_below_one_half() {
    let mut rng = seeded(202);
    for k in 0..200 {
        let state = random_biseparable_mixture(&mut rng, 2 + k % 5);
        assert!(max_fidelity(&state) <= 0.5 + TOL);
        let targets = ghz_class_targets(3).unwrap();
        assert!(!condition_b(&state, &targets[k % targets.len()].1).unwrap().met);
    }
}

#[test]
fn biseparable_mixed_factors_stay_at_or_below_one_half() {
    let mut rng = seeded(203);
    for k in 0..200 {
        let state = random_biseparable_density(&mut rng, BIPARTITIONS_OF_THREE[k % 3]);
        assert!(max_fidelity(&state) <= 0.5 + TOL);
    }
}

#[test]
fn the_bound_is_tight() {
    // |↑↑↑⟩ reaches exactly ½ with the GHZ state
    let up = QuantumState::basis(BasisIndex::from_label(3, 1).unwrap());
    assert!((max_fidelity(&up) - 0.5).abs() < 1e-12);
}

fn ghz_component_state(p_up: f64, p_down: f64, coherence: f64) -> QuantumState {
    use entwit::ComplexMatrix;
    use num_complex::Complex64;
    let rest = (1.0 - p_up - p_down) / 6.0;
    let mut diag = [rest; 8];
    diag[0] = p_up;
    diag[7] = p_down;
    let mut rho = ComplexMatrix::diagonal(&diag);
    rho.set(0, 7, Complex64::new(coherence, 0.0));
    rho.set(7, 0, Complex64::new(coherence, 0.0));
    QuantumState::density(rho).unwrap()
}

proptest! {
    #[test]
    fn component_formula_agrees_with_direct_fidelity(p_up in 0.0f64..0.5, p_down in 0.0f64..0.5, t in -1.0f64..1.0) {
        let coherence = t * (p_up * p_down).sqrt();
        let state = ghz_component_state(p_up, p_down, coherence);
        let direct = fidelity(&state, &entwit::hilbert::ghz(3).unwrap()).unwrap();
        let from = fidelity_from_components(
            MeasuredValue::exact(p_up),
            MeasuredValue::exact(p_down),
            MeasuredValue::exact(coherence),
        )
        .unwrap();
        prop_assert!((direct - from.fidelity.value).abs() < 1e-12);
    }
}
