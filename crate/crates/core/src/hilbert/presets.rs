//! Two-particle entangled three-qubit mixtures used as counterexamples.

use super::matrix::ComplexMatrix;
use super::state::{embed, qubit, QuantumState};
use crate::error::Result;

fn density_on(parts: &[(&ComplexMatrix, &[usize])], n: usize) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::identity(1 << n);
    for (op, parties) in parts {
        acc = &acc * &embed(op, parties, n)?;
    }
    Ok(acc)
}

/// `½ (P↑⁽¹⁾ ⊗ P_S⁽²³⁾ + P↓⁽¹⁾ ⊗ P_T⁽²³⁾)`: reaches |E(F₃)| = 2√2 but is
/// only two-particle entangled.
pub fn singlet_triplet_mixture() -> Result<QuantumState> {
    let s = qubit::projector(&qubit::singlet());
    let t = qubit::projector(&qubit::triplet());
    let up = qubit::z_projector(true);
    let down = qubit::z_projector(false);
    let a = density_on(&[(&up, &[1]), (&s, &[2, 3])], 3)?;
    let b = density_on(&[(&down, &[1]), (&t, &[2, 3])], 3)?;
    QuantumState::density((&a + &b).scale_re(0.5))
}

/// `½ (P₊⁽²⁾ ⊗ P_S⁽¹³⁾ + P₋⁽²⁾ ⊗ P_T⁽¹³⁾)` with `P±` the σ_x eigenprojectors:
/// a two-particle entangled mixture whose Bell signals mimic a coherent
/// `|↑↑↓⟩, |↓↓↑⟩` superposition.
pub fn bell_signal_mixture() -> Result<QuantumState> {
    let s = qubit::projector(&qubit::singlet());
    let t = qubit::projector(&qubit::triplet());
    let plus = qubit::x_projector(true);
    let minus = qubit::x_projector(false);
    let a = density_on(&[(&plus, &[2]), (&s, &[1, 3])], 3)?;
    let b = density_on(&[(&minus, &[2]), (&t, &[1, 3])], 3)?;
    QuantumState::density((&a + &b).scale_re(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::eigen::hermitian_eigen;
    use crate::hilbert::spin::BasisIndex;
    use crate::hilbert::state::matrix_element;
    use num_complex::Complex64;

    fn l(label: usize) -> BasisIndex {
        BasisIndex::from_label(3, label).unwrap()
    }

    #[test]
    fn singlet_triplet_mixture_is_rank_two_with_unit_trace() {
        let rho = singlet_triplet_mixture().unwrap();
        assert!((rho.rho().trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let eig = hermitian_eigen(rho.rho());
        let nonzero = eig.values.iter().filter(|v| v.abs() > 1e-9).count();
        assert_eq!(nonzero, 2);
        assert!(eig.values.iter().filter(|v| v.abs() > 1e-9).all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn singlet_triplet_mixture_has_no_far_coherence() {
        let rho = singlet_triplet_mixture().unwrap();
        assert!(matrix_element(&rho, l(2), l(7)).unwrap().norm() < 1e-15);
        assert!(matrix_element(&rho, l(1), l(8)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn bell_signal_mixture_populations_and_coherence() {
        let rho = bell_signal_mixture().unwrap();
        assert!((rho.population(l(2)).unwrap() - 0.25).abs() < 1e-12);
        assert!((rho.population(l(7)).unwrap() - 0.25).abs() < 1e-12);
        // |⟨↑↑↓|ρ|↓↓↑⟩| = 1/4; with the singlet (|↑↓⟩ − |↓↑⟩)/√2 the sign is negative
        let e = matrix_element(&rho, l(2), l(7)).unwrap();
        assert!((e - Complex64::new(-0.25, 0.0)).norm() < 1e-12);
    }
}
