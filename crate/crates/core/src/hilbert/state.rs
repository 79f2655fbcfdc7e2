//! Pure and mixed N-qubit states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigen;
use super::matrix::ComplexMatrix;
use super::spin::BasisIndex;
use crate::error::{Error, Result};

/// Tolerance for physical validation (norm, trace, Hermiticity, positivity).
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Weights of a convex mixture must sum to one within this.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

/// An N-qubit state, always carrying its density matrix; pure states also keep
/// the ket.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    n_parties: usize,
    kind: StateKind,
    ket: Option<Vec<Complex64>>,
    rho: ComplexMatrix,
}

/// Outcome of [`validate_density`]. Defects are absolute.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub eigensolver_converged: bool,
    pub accepted: bool,
    pub failures: Vec<String>,
}

pub fn validate_matrix(rho: &ComplexMatrix) -> ValidationReport {
    let mut failures = Vec::new();
    if !rho.is_finite() {
        failures.push("density matrix entries must be finite".to_string());
        return ValidationReport {
            hermiticity_defect: f64::NAN,
            trace_defect: f64::NAN,
            min_eigenvalue: f64::NAN,
            eigensolver_converged: false,
            accepted: false,
            failures,
        };
    }
    let hermiticity_defect = rho.hermiticity_defect();
    let trace = rho.trace();
    let trace_defect = (trace - Complex64::new(1.0, 0.0)).norm();
    // Positivity is judged on the Hermitian part so that a tiny Hermiticity
    // defect does not masquerade as a negative eigenvalue.
    let hermitian_part = (rho + &rho.adjoint()).scale_re(0.5);
    let eig = hermitian_eigen(&hermitian_part);
    let min_eigenvalue = eig.min_value();

    if hermiticity_defect > PHYSICAL_TOL {
        failures.push(format!("density matrix must be Hermitian (max |ρ − ρ†| = {hermiticity_defect:e})"));
    }
    if trace_defect > PHYSICAL_TOL {
        failures.push(format!("density matrix must have unit trace (|Tr ρ − 1| = {trace_defect:e})"));
    }
    if min_eigenvalue < -PHYSICAL_TOL {
        failures.push(format!("density matrix must be positive semidefinite (min eigenvalue {min_eigenvalue:e})"));
    }
    if !eig.converged {
        failures.push("eigensolver did not converge".to_string());
    }
    ValidationReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        eigensolver_converged: eig.converged,
        accepted: failures.is_empty(),
        failures,
    }
}

pub fn validate_density(state: &QuantumState) -> ValidationReport {
    validate_matrix(&state.rho)
}

fn parties_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::validation("dimension must be 2^n for n ≥ 1", format!("got dimension {dim}")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Multiplies by a global phase so that the first amplitude with modulus
/// above `ALGEBRAIC_TOL` is real and positive.
fn fix_global_phase(ket: &mut [Complex64]) {
    if let Some(lead) = ket.iter().find(|z| z.norm() > ALGEBRAIC_TOL).copied() {
        let phase = lead.conj() / lead.norm();
        for z in ket.iter_mut() {
            *z *= phase;
        }
        // exact zero imaginary part on the leading amplitude
        if let Some(z) = ket.iter_mut().find(|z| z.norm() > ALGEBRAIC_TOL) {
            *z = Complex64::new(z.norm(), 0.0);
        }
    }
}

impl QuantumState {
    /// A pure state; the ket must have unit norm within [`PHYSICAL_TOL`]. The
    /// global phase is normalized (first nonzero amplitude real positive).
    pub fn pure(ket: Vec<Complex64>) -> Result<Self> {
        let n_parties = parties_for_dim(ket.len())?;
        if ket.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("ket amplitudes must be finite", "found NaN or Inf"));
        }
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > PHYSICAL_TOL {
            return Err(Error::validation("pure state must have unit norm", format!("‖ψ‖ = {}", norm_sq.sqrt())));
        }
        let mut ket = ket;
        fix_global_phase(&mut ket);
        let rho = ComplexMatrix::outer(&ket);
        Ok(QuantumState { n_parties, kind: StateKind::Pure, ket: Some(ket), rho })
    }

    /// Normalizes `ket` first; fails only on the zero vector.
    pub fn pure_normalized(ket: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= ALGEBRAIC_TOL || !norm.is_finite() {
            return Err(Error::validation("pure state must have unit norm", "cannot normalize a zero vector"));
        }
        Self::pure(ket.into_iter().map(|z| z / norm).collect())
    }

    /// A mixed state; rejected unless it passes [`validate_matrix`].
    pub fn density(rho: ComplexMatrix) -> Result<Self> {
        let n_parties = parties_for_dim(rho.dim())?;
        let report = validate_matrix(&rho);
        if !report.accepted {
            return Err(Error::validation("density matrix invariants", report.failures.join("; ")));
        }
        Ok(QuantumState { n_parties, kind: StateKind::Density, ket: None, rho })
    }

    /// Builds from a pure ket with real amplitudes listed by basis label.
    pub fn from_amplitudes(n_parties: usize, amplitudes: &[(usize, Complex64)]) -> Result<Self> {
        let mut ket = vec![Complex64::new(0.0, 0.0); 1 << n_parties];
        for (label, amp) in amplitudes {
            let idx = BasisIndex::from_label(n_parties, *label)?;
            ket[idx.offset()] += amp;
        }
        Self::pure(ket)
    }

    pub fn basis(index: BasisIndex) -> Self {
        let mut ket = vec![Complex64::new(0.0, 0.0); 1 << index.n_parties()];
        ket[index.offset()] = Complex64::new(1.0, 0.0);
        Self::pure(ket).expect("basis vector is normalized")
    }

    /// Tensor product of single-party (or multi-party) pure kets.
    pub fn product(parts: &[QuantumState]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::argument("product of an empty state list"));
        }
        if parts.iter().all(|p| p.ket.is_some()) {
            let ket = parts[1..].iter().fold(parts[0].ket.clone().unwrap(), |acc, p| {
                let other = p.ket.as_ref().unwrap();
                let mut out = Vec::with_capacity(acc.len() * other.len());
                for a in &acc {
                    for b in other {
                        out.push(a * b);
                    }
                }
                out
            });
            return Self::pure_normalized(ket);
        }
        let rho = parts[1..].iter().fold(parts[0].rho.clone(), |acc, p| acc.kron(&p.rho));
        Self::density(rho)
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn dim(&self) -> usize {
        1 << self.n_parties
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn ket(&self) -> Option<&[Complex64]> {
        self.ket.as_deref()
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn is_pure(&self) -> bool {
        self.kind == StateKind::Pure
    }

    /// The same state viewed as a density matrix.
    pub fn to_density(&self) -> Self {
        QuantumState { n_parties: self.n_parties, kind: StateKind::Density, ket: None, rho: self.rho.clone() }
    }

    /// `⟨index|ρ|index⟩`.
    pub fn population(&self, index: BasisIndex) -> Result<f64> {
        Ok(matrix_element(self, index, index)?.re)
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho.get(i, i).re).collect()
    }
}

/// `(|↑…↑⟩ + |↓…↓⟩)/√2`.
pub fn ghz(n: usize) -> Result<QuantumState> {
    if n < 2 {
        return Err(Error::argument(format!("GHZ state needs at least 2 parties, got {n}")));
    }
    let dim = 1usize << n;
    let mut ket = vec![Complex64::new(0.0, 0.0); dim];
    ket[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    ket[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    QuantumState::pure(ket)
}

/// `(|b⟩ + sign·|b̄⟩)/√2` where `b̄` flips every spin of `b`.
pub fn ghz_class(index: BasisIndex, positive: bool) -> QuantumState {
    let dim = 1usize << index.n_parties();
    let mut ket = vec![Complex64::new(0.0, 0.0); dim];
    let sign = if positive { 1.0 } else { -1.0 };
    ket[index.offset()] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    ket[index.complement().offset()] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
    QuantumState::pure(ket).expect("normalized")
}

/// Every maximally entangled GHZ-class basis state on `n` qubits:
/// `(|b⟩ ± |b̄⟩)/√2` for each `b` whose first spin is up.
pub fn ghz_class_targets(n: usize) -> Result<Vec<(String, QuantumState)>> {
    if n < 2 {
        return Err(Error::argument("GHZ-class targets need at least 2 parties"));
    }
    let mut out = Vec::new();
    for offset in 0..(1usize << (n - 1)) {
        let idx = BasisIndex::from_label(n, offset + 1)?;
        for positive in [true, false] {
            let name = format!("{}{}{}", idx, if positive { "+" } else { "−" }, idx.complement());
            out.push((name, ghz_class(idx, positive)));
        }
    }
    Ok(out)
}

/// `(|↑↑↓⟩ + |↓↓↑⟩)/√2`.
pub fn psi_b() -> QuantumState {
    ghz_class(BasisIndex::from_label(3, 2).expect("label 2 exists"), true)
}

/// Convex combination `Σ p_i ρ_i`.
pub fn mix(weights: &[f64], states: &[QuantumState]) -> Result<QuantumState> {
    if weights.len() != states.len() {
        return Err(Error::argument(format!("{} weights for {} states", weights.len(), states.len())));
    }
    let first = states.first().ok_or_else(|| Error::argument("mixture of an empty state list"))?;
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::validation("mixture weights must be nonnegative", format!("got weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::validation("mixture weights must sum to 1", format!("sum is {total}")));
    }
    if let Some(s) = states.iter().find(|s| s.n_parties != first.n_parties) {
        return Err(Error::argument(format!("cannot mix states on {} and {} parties", first.n_parties, s.n_parties)));
    }
    let mut rho = ComplexMatrix::zeros(first.dim());
    for (w, s) in weights.iter().zip(states) {
        rho = &rho + &s.rho.scale_re(*w);
    }
    QuantumState::density(rho)
}

/// `Tr(ρ · obs)` for a Hermitian observable.
pub fn expectation(state: &QuantumState, obs: &ComplexMatrix) -> Result<f64> {
    if obs.dim() != state.dim() {
        return Err(Error::argument(format!(
            "observable of dimension {} on a {}-party state",
            obs.dim(),
            state.n_parties
        )));
    }
    let defect = obs.hermiticity_defect();
    if defect > PHYSICAL_TOL {
        return Err(Error::validation("observable must be Hermitian", format!("max |O − O†| = {defect:e}")));
    }
    let value = state.rho.trace_product(obs)?;
    if value.im.abs() > PHYSICAL_TOL {
        return Err(Error::Internal(format!("expectation value has imaginary part {:e}", value.im)));
    }
    Ok(value.re)
}

/// `⟨i|ρ|j⟩` in the z product basis.
pub fn matrix_element(state: &QuantumState, i: BasisIndex, j: BasisIndex) -> Result<Complex64> {
    for idx in [i, j] {
        if idx.n_parties() != state.n_parties {
            return Err(Error::argument(format!(
                "basis index {} belongs to {} parties, state has {}",
                idx,
                idx.n_parties(),
                state.n_parties
            )));
        }
    }
    Ok(state.rho.get(i.offset(), j.offset()))
}

/// A relabelling of parties: party `k` (1-based) of the input becomes party
/// `images[k-1]` of the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(Error::argument(format!("{images:?} is not a permutation of 1..={n}")));
            }
            seen[img - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    /// Exchanges parties `a` and `b` (1-based).
    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n).collect();
        if a == 0 || b == 0 || a > n || b > n {
            return Err(Error::argument(format!("swap({a}, {b}) outside 1..={n}")));
        }
        images.swap(a - 1, b - 1);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, party: usize) -> usize {
        self.images[party - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (k, &img) in self.images.iter().enumerate() {
            inv[img - 1] = k + 1;
        }
        Permutation { images: inv }
    }

    /// Maps a basis offset of the input to the offset of the relabelled basis vector.
    fn map_offset(&self, offset: usize) -> usize {
        let n = self.images.len();
        let mut out = 0;
        for k in 0..n {
            let bit = (offset >> (n - 1 - k)) & 1;
            let target = self.images[k] - 1;
            out |= bit << (n - 1 - target);
        }
        out
    }
}

/// Applies the party relabelling to an operator on `perm.len()` qubits.
pub fn permute_operator(op: &ComplexMatrix, perm: &Permutation) -> Result<ComplexMatrix> {
    if op.dim() != 1 << perm.len() {
        return Err(Error::argument(format!(
            "permutation of {} parties on an operator of dimension {}",
            perm.len(),
            op.dim()
        )));
    }
    let dim = op.dim();
    let map: Vec<usize> = (0..dim).map(|i| perm.map_offset(i)).collect();
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out.set(map[i], map[j], op.get(i, j));
        }
    }
    Ok(out)
}

pub fn permute_parties(state: &QuantumState, perm: &Permutation) -> Result<QuantumState> {
    if perm.len() != state.n_parties {
        return Err(Error::argument(format!(
            "permutation of {} parties on a {}-party state",
            perm.len(),
            state.n_parties
        )));
    }
    let rho = permute_operator(&state.rho, perm)?;
    let ket = state.ket.as_ref().map(|ket| {
        let mut out = vec![Complex64::new(0.0, 0.0); ket.len()];
        for (i, a) in ket.iter().enumerate() {
            out[perm.map_offset(i)] = *a;
        }
        out
    });
    Ok(QuantumState { n_parties: state.n_parties, kind: state.kind, ket, rho })
}

/// Places an operator acting on the listed parties (1-based, in the given
/// order) into the full `n`-party space, identity elsewhere.
pub fn embed(op: &ComplexMatrix, parties: &[usize], n: usize) -> Result<ComplexMatrix> {
    let k = parties.len();
    if op.dim() != 1 << k {
        return Err(Error::argument(format!("operator of dimension {} cannot act on {k} parties", op.dim())));
    }
    let mut order: Vec<usize> = parties.to_vec();
    for p in 1..=n {
        if !parties.contains(&p) {
            order.push(p);
        }
    }
    // order[j] is the target party of factor slot j
    let perm = Permutation::new(order)?;
    let padded = op.kron(&ComplexMatrix::identity(1 << (n - k)));
    permute_operator(&padded, &perm)
}

/// Single-qubit kets and projectors used by the state presets.
pub mod qubit {
    use super::*;
    use crate::hilbert::spin::{spin_op, Axis, SpinDirection};

    pub fn up() -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    }

    pub fn down() -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
    }

    /// `(|↑⟩ ± |↓⟩)/√2`, the σ_x eigenvectors.
    pub fn plus_x(positive: bool) -> Vec<Complex64> {
        let s = if positive { 1.0 } else { -1.0 };
        vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(s * FRAC_1_SQRT_2, 0.0)]
    }

    /// `(|↑↓⟩ − |↓↑⟩)/√2`.
    pub fn singlet() -> Vec<Complex64> {
        let h = FRAC_1_SQRT_2;
        [0.0, h, -h, 0.0].iter().map(|x| Complex64::new(*x, 0.0)).collect()
    }

    /// `(|↑↓⟩ + |↓↑⟩)/√2`.
    pub fn triplet() -> Vec<Complex64> {
        let h = FRAC_1_SQRT_2;
        [0.0, h, h, 0.0].iter().map(|x| Complex64::new(*x, 0.0)).collect()
    }

    pub fn projector(ket: &[Complex64]) -> ComplexMatrix {
        ComplexMatrix::outer(ket)
    }

    /// `(1 ± n·σ)/2`.
    pub fn spin_projector(direction: &SpinDirection, positive: bool) -> ComplexMatrix {
        let s = if positive { 0.5 } else { -0.5 };
        &ComplexMatrix::identity(2).scale_re(0.5) + &spin_op(direction).scale_re(s)
    }

    pub fn x_projector(positive: bool) -> ComplexMatrix {
        spin_projector(&SpinDirection::along(Axis::X), positive)
    }

    pub fn z_projector(up: bool) -> ComplexMatrix {
        spin_projector(&SpinDirection::along(Axis::Z), up)
    }
}
