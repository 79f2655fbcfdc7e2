//! Bell-type operators on N qubits.
//!
//! The Bell-Klyshko operator is built by the recursion
//!
//! ```text
//! F_N  = F_{N-1} ⊗ ½(A_N + A'_N) + F'_{N-1} ⊗ ½(A_N − A'_N)
//! F'_N = F'_{N-1} ⊗ ½(A'_N + A_N) + F_{N-1} ⊗ ½(A'_N − A_N)
//! ```
//!
//! starting from the CHSH operator `F_2 = AB + A'B + AB' − A'B'`. `A_N` acts on
//! the highest-numbered party. For three parties this expands to
//! `A'BC + AB'C + ABC' − A'B'C'`. Because `F_N` is symmetric under a
//! simultaneous permutation of parties and their settings, the choice of
//! which party plays "the Nth" does not change any expectation value.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    embed, expectation, pauli, qubit, spin_op, tensor, Axis, ComplexMatrix, QuantumState, SpinDirection, ALGEBRAIC_TOL,
};

/// The pair of measurement directions `(A_j, A'_j)` for one party.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartySetting {
    pub unprimed: SpinDirection,
    pub primed: SpinDirection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartySettings {
    parties: Vec<PartySetting>,
}

impl PartySettings {
    pub fn new(parties: Vec<PartySetting>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::argument("settings for zero parties"));
        }
        Ok(PartySettings { parties })
    }

    pub fn from_pairs(pairs: &[(SpinDirection, SpinDirection)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(unprimed, primed)| PartySetting { unprimed, primed }).collect())
    }

    pub fn n_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn parties(&self) -> &[PartySetting] {
        &self.parties
    }

    pub fn party(&self, k: usize) -> &PartySetting {
        &self.parties[k]
    }

    /// Every `A_j ↔ A'_j` exchanged.
    pub fn swapped(&self) -> Self {
        PartySettings {
            parties: self.parties.iter().map(|p| PartySetting { unprimed: p.primed, primed: p.unprimed }).collect(),
        }
    }

    /// The direction chosen for party `k` when bit `k` of `mask` selects primed.
    /// Bit `k` counts from the least significant end, party 1 is bit 0.
    pub fn directions_for(&self, mask: usize) -> Vec<SpinDirection> {
        self.parties.iter().enumerate().map(|(k, p)| if (mask >> k) & 1 == 1 { p.primed } else { p.unprimed }).collect()
    }

    /// Reorders the parties: entry `k` of the result is party `order[k]` (1-based).
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.parties.len() {
            return Err(Error::argument("reorder length mismatch"));
        }
        let parties = order
            .iter()
            .map(|&k| {
                self.parties
                    .get(k.wrapping_sub(1))
                    .copied()
                    .ok_or_else(|| Error::argument(format!("party {k} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PartySettings { parties })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Xy,
    Xz,
}

impl Plane {
    pub fn direction(self, angle: f64) -> SpinDirection {
        match self {
            Plane::Xy => SpinDirection::in_xy(angle),
            Plane::Xz => SpinDirection::in_xz(angle),
        }
    }
}

/// Settings restricted to a plane, given as angles from the x axis.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSettings {
    pub plane: Plane,
    /// `(unprimed, primed)` angle per party, radians.
    pub angles: Vec<(f64, f64)>,
}

impl PlanarSettings {
    pub fn new(plane: Plane, angles: Vec<(f64, f64)>) -> Self {
        PlanarSettings { plane, angles }
    }

    pub fn to_party_settings(&self) -> Result<PartySettings> {
        PartySettings::new(
            self.angles
                .iter()
                .map(|&(a, ap)| PartySetting { unprimed: self.plane.direction(a), primed: self.plane.direction(ap) })
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    Chsh,
    Klyshko,
    KlyshkoPrimed,
    Mermin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellOperator {
    pub n_parties: usize,
    pub matrix: ComplexMatrix,
    pub kind: BellKind,
}

impl BellOperator {
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        expectation(state, &self.matrix)
    }
}

/// `A⊗B + A'⊗B + A⊗B' − A'⊗B'`.
pub fn chsh_operator(settings: &PartySettings) -> Result<BellOperator> {
    if settings.n_parties() != 2 {
        return Err(Error::argument(format!("CHSH operator needs 2 parties, got {}", settings.n_parties())));
    }
    let (a, ap) = (spin_op(&settings.party(0).unprimed), spin_op(&settings.party(0).primed));
    let (b, bp) = (spin_op(&settings.party(1).unprimed), spin_op(&settings.party(1).primed));
    let matrix = &(&(&a.kron(&b) + &ap.kron(&b)) + &a.kron(&bp)) - &ap.kron(&bp);
    Ok(BellOperator { n_parties: 2, matrix, kind: BellKind::Chsh })
}

/// Returns `(F_N, F'_N)` for the first `settings.n_parties()` parties.
fn klyshko_pair(settings: &PartySettings) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = settings.n_parties();
    let head = PartySettings::new(settings.parties()[..2].to_vec())?;
    let mut f = chsh_operator(&head)?.matrix;
    let mut f_primed = chsh_operator(&head.swapped())?.matrix;
    for k in 2..n {
        let a = spin_op(&settings.party(k).unprimed);
        let ap = spin_op(&settings.party(k).primed);
        let sum = (&a + &ap).scale_re(0.5);
        let diff = (&a - &ap).scale_re(0.5);
        let next = &f.kron(&sum) + &f_primed.kron(&diff);
        let next_primed = &f_primed.kron(&sum) - &f.kron(&diff);
        f = next;
        f_primed = next_primed;
    }
    Ok((f, f_primed))
}

/// The Bell-Klyshko operator `F_N`, or `F'_N` when `primed` is set.
pub fn klyshko_operator(settings: &PartySettings, primed: bool) -> Result<BellOperator> {
    let n = settings.n_parties();
    if n < 2 {
        return Err(Error::argument(format!("Bell-Klyshko operator needs at least 2 parties, got {n}")));
    }
    let (f, f_primed) = klyshko_pair(settings)?;
    let (matrix, kind) = if primed { (f_primed, BellKind::KlyshkoPrimed) } else { (f, BellKind::Klyshko) };
    Ok(BellOperator { n_parties: n, matrix, kind })
}

/// Coefficients of the multilinear expansion `F_N = Σ_s c_s ⊗_j A_j^{(s_j)}`,
/// indexed by the mask `s` (bit `j` set: party `j+1` uses its primed setting).
///
/// Derived from the scalar form of the recursion; independent of the
/// matrix construction in [`klyshko_operator`].
pub fn klyshko_coefficients(n: usize, primed: bool) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::argument(format!("Bell-Klyshko operator needs at least 2 parties, got {n}")));
    }
    // F_2 = AB + A'B + AB' − A'B' ; F'_2 = A'B' + AB' + A'B − AB
    let mut f = vec![1.0, 1.0, 1.0, -1.0];
    let mut fp = vec![-1.0, 1.0, 1.0, 1.0];
    for k in 2..n {
        let half = 1usize << k;
        let mut nf = vec![0.0; half * 2];
        let mut nfp = vec![0.0; half * 2];
        for s in 0..half {
            // unprimed A_k: ½(F + F'), primed A'_k: ½(F − F')
            nf[s] = 0.5 * (f[s] + fp[s]);
            nf[s | half] = 0.5 * (f[s] - fp[s]);
            // F'_N swaps roles: A'_k gets ½(F' + F), A_k gets ½(F' − F)
            nfp[s | half] = 0.5 * (fp[s] + f[s]);
            nfp[s] = 0.5 * (fp[s] - f[s]);
        }
        f = nf;
        fp = nfp;
    }
    Ok(if primed { fp } else { f })
}

/// `σx⊗σy⊗σy + σy⊗σx⊗σy + σy⊗σy⊗σx − σx⊗σx⊗σx`.
pub fn mermin_operator() -> BellOperator {
    let x = pauli(Axis::X);
    let y = pauli(Axis::Y);
    let t = |a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix| a.kron(b).kron(c);
    let matrix = &(&(&t(&x, &y, &y) + &t(&y, &x, &y)) + &t(&y, &y, &x)) - &t(&x, &x, &x);
    BellOperator { n_parties: 3, matrix, kind: BellKind::Mermin }
}

/// Checks the identity `σxσyσy + σyσxσy + σyσyσx − σxσxσx = −4(|↓↓↓⟩⟨↑↑↑| + |↑↑↑⟩⟨↓↓↓|)`.
/// Returns whether it holds within [`ALGEBRAIC_TOL`] and the largest entry defect.
pub fn mermin_projector_identity() -> (bool, f64) {
    let lhs = mermin_operator().matrix;
    let mut rhs = ComplexMatrix::zeros(8);
    rhs.set(0, 7, Complex64::new(-4.0, 0.0));
    rhs.set(7, 0, Complex64::new(-4.0, 0.0));
    let defect = lhs.max_abs_diff(&rhs).expect("both 8×8");
    (defect < ALGEBRAIC_TOL, defect)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `S±(φ) = n_φ·σ ⊗ n_φ·σ ⊗ n_{±φ}·σ` with `n_φ = (cos φ, sin φ, 0)`.
pub fn sackett_observable(sign: Sign, phi: f64) -> ComplexMatrix {
    let n = spin_op(&SpinDirection::in_xy(phi));
    let last = spin_op(&SpinDirection::in_xy(sign.factor() * phi));
    n.kron(&n).kron(&last)
}

/// `σx ⊗ σx ⊗ n_φ·σ`, the difference `B₊(φ) − B₋(φ)` of the two unnormalized
/// Bell signals.
pub fn bell_signal_difference_observable(phi: f64) -> ComplexMatrix {
    let x = pauli(Axis::X);
    x.kron(&x).kron(&spin_op(&SpinDirection::in_xy(phi)))
}

/// `σx ⊗ P± ⊗ n_φ·σ`, the unnormalized Bell signal.
pub fn bell_signal_observable(sign: Sign, phi: f64) -> ComplexMatrix {
    let proj = qubit::x_projector(sign == Sign::Plus);
    pauli(Axis::X).kron(&proj).kron(&spin_op(&SpinDirection::in_xy(phi)))
}

/// Below this the particle-2 projection is treated as impossible.
pub const MIN_CONDITIONING_PROBABILITY: f64 = 1e-12;

/// Particle-1,3 correlation `σx ⊗ n_φ·σ` conditional on particle 2 being
/// found in `|±⟩_x`: `Tr(ρ σx⊗P±⊗n_φ·σ) / Tr(ρ 1⊗P±⊗1)`.
pub fn conditional_bell_signal(state: &QuantumState, sign: Sign, phi: f64) -> Result<f64> {
    if state.n_parties() != 3 {
        return Err(Error::argument("Bell signals are defined for three parties"));
    }
    let proj = qubit::x_projector(sign == Sign::Plus);
    let probability = expectation(state, &embed(&proj, &[2], 3)?)?;
    if probability <= MIN_CONDITIONING_PROBABILITY {
        return Err(Error::argument(format!(
            "conditional Bell signal undefined: projection probability {probability:e}"
        )));
    }
    Ok(expectation(state, &bell_signal_observable(sign, phi))? / probability)
}

/// Correlation tensor `T[i_1…i_N] = Tr(ρ σ_{i_1} ⊗ … ⊗ σ_{i_N})`, i ∈ {x, y, z}.
///
/// Lets product-observable expectations be evaluated as a contraction with
/// the direction vectors instead of a trace over the full space.
#[derive(Clone, Debug)]
pub struct CorrelationTensor {
    n_parties: usize,
    values: Vec<f64>,
}

impl CorrelationTensor {
    pub fn from_state(state: &QuantumState) -> Result<Self> {
        let n = state.n_parties();
        let paulis = [pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z)];
        let count = 3usize.pow(n as u32);
        let mut values = Vec::with_capacity(count);
        for idx in 0..count {
            let ops: Vec<ComplexMatrix> = digits(idx, n).iter().map(|&d| paulis[d].clone()).collect();
            values.push(expectation(state, &tensor(&ops)?)?);
        }
        Ok(CorrelationTensor { n_parties: n, values })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    /// Entries in base-3 order, party 1 most significant.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `⟨n_1·σ ⊗ … ⊗ n_N·σ⟩`.
    pub fn product_expectation(&self, directions: &[SpinDirection]) -> f64 {
        debug_assert_eq!(directions.len(), self.n_parties);
        let comps: Vec<[f64; 3]> = directions.iter().map(|d| d.components()).collect();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, t)| **t != 0.0)
            .map(|(idx, t)| {
                let mut w = *t;
                let mut rest = idx;
                for k in (0..self.n_parties).rev() {
                    w *= comps[k][rest % 3];
                    rest /= 3;
                }
                w
            })
            .sum()
    }

    /// `⟨F_N⟩` via the coefficient expansion.
    pub fn klyshko_expectation(&self, settings: &PartySettings, coefficients: &[f64]) -> f64 {
        coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(mask, c)| c * self.product_expectation(&settings.directions_for(mask)))
            .sum()
    }
}

/// Base-3 digits of `idx`, most significant first (party 1 first).
fn digits(mut idx: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = idx % 3;
        idx /= 3;
    }
    out
}

/// One direction in a settings file: a unit 3-vector or, when the file names
/// a plane, an angle from the x axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionSpec {
    Vector([f64; 3]),
    Angle(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartyDocument {
    pub a: DirectionSpec,
    pub a_prime: DirectionSpec,
}

/// `{"plane": "xy"|"xz"|null, "parties": [{"a": ..., "a_prime": ...}, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingsDocument {
    pub plane: Option<Plane>,
    pub parties: Vec<PartyDocument>,
}

impl SettingsDocument {
    pub fn from_planar(settings: &PlanarSettings) -> Self {
        SettingsDocument {
            plane: Some(settings.plane),
            parties: settings
                .angles
                .iter()
                .map(|&(a, ap)| PartyDocument { a: DirectionSpec::Angle(a), a_prime: DirectionSpec::Angle(ap) })
                .collect(),
        }
    }

    pub fn from_settings(settings: &PartySettings) -> Self {
        SettingsDocument {
            plane: None,
            parties: settings
                .parties()
                .iter()
                .map(|p| PartyDocument {
                    a: DirectionSpec::Vector(p.unprimed.components()),
                    a_prime: DirectionSpec::Vector(p.primed.components()),
                })
                .collect(),
        }
    }

    pub fn into_settings(self) -> Result<PartySettings> {
        let resolve = |spec: &DirectionSpec, path: String| -> Result<SpinDirection> {
            match (spec, self.plane) {
                (DirectionSpec::Vector([x, y, z]), _) => SpinDirection::new(*x, *y, *z),
                (DirectionSpec::Angle(t), Some(plane)) => Ok(plane.direction(*t)),
                (DirectionSpec::Angle(_), None) => {
                    Err(Error::Schema { path, message: "angles are allowed only when \"plane\" is set".into() })
                }
            }
        };
        let parties = self
            .parties
            .iter()
            .enumerate()
            .map(|(k, p)| {
                Ok(PartySetting {
                    unprimed: resolve(&p.a, format!("parties[{k}].a"))?,
                    primed: resolve(&p.a_prime, format!("parties[{k}].a_prime"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PartySettings::new(parties)
    }
}

pub fn read_settings(path: impl AsRef<Path>) -> Result<PartySettings> {
    let doc: SettingsDocument = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    doc.into_settings()
}

/// Angle sets that reach the largest values for the standard states.
pub mod angles {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    use super::{PlanarSettings, Plane};
    use crate::hilbert::{Axis, SpinDirection};

    /// For `½(P↑⊗P_S + P↓⊗P_T)`: `a = a' = z`, then xy angles `β = 0, β' = π/2,
    /// γ = π/4, γ' = −π/4`. Gives |E(F₃)| = 2√2.
    pub fn singlet_triplet_mixture() -> super::PartySettings {
        let z = SpinDirection::along(Axis::Z);
        let xy = |t: f64| SpinDirection::in_xy(t);
        super::PartySettings::from_pairs(&[(z, z), (xy(0.0), xy(FRAC_PI_2)), (xy(FRAC_PI_4), xy(-FRAC_PI_4))])
            .expect("three parties")
    }

    /// For the GHZ state: `α = β = γ = π/2`, `α' = β' = γ' = 0` in the xy plane.
    pub fn ghz_maximal() -> PlanarSettings {
        PlanarSettings::new(Plane::Xy, vec![(FRAC_PI_2, 0.0); 3])
    }

    /// For `(|↑↑↓⟩ + |↓↓↑⟩)/√2`: `α = π/2, α' = 0, β = π/4, β' = −π/4, γ = π/4, γ' = 3π/4`.
    pub fn psi_b_maximal() -> PlanarSettings {
        PlanarSettings::new(Plane::Xy, vec![(FRAC_PI_2, 0.0), (FRAC_PI_4, -FRAC_PI_4), (FRAC_PI_4, 3.0 * FRAC_PI_4)])
    }

    /// `a = z, a' = x`, `b, b'` at ∓π/4 from z in the xz plane: |E(F₂)| = 2√2 on the singlet.
    pub fn chsh_optimal() -> super::PartySettings {
        let z = SpinDirection::along(Axis::Z);
        let x = SpinDirection::along(Axis::X);
        // in_xz measures from x, so z ± π/4 sits at π/2 ∓ π/4
        let b = SpinDirection::in_xz(FRAC_PI_4);
        let bp = SpinDirection::in_xz(3.0 * FRAC_PI_4);
        super::PartySettings::from_pairs(&[(z, x), (b, bp)]).expect("two parties")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{ghz, presets, product_observable, psi_b, QuantumState};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn four_term_expansion(s: &PartySettings) -> ComplexMatrix {
        let d = |k: usize, primed: bool| {
            let p = s.party(k);
            spin_op(if primed { &p.primed } else { &p.unprimed })
        };
        let t = |a: bool, b: bool, c: bool| d(0, a).kron(&d(1, b)).kron(&d(2, c));
        &(&(&t(true, false, false) + &t(false, true, false)) + &t(false, false, true)) - &t(true, true, true)
    }

    #[test]
    fn three_party_recursion_matches_four_term_expansion() {
        let s = angles::psi_b_maximal().to_party_settings().unwrap();
        let k = klyshko_operator(&s, false).unwrap();
        assert!(k.matrix.max_abs_diff(&four_term_expansion(&s)).unwrap() < 1e-12);
    }

    #[test]
    fn klyshko_primed_equals_unprimed_of_swapped_settings() {
        let s = angles::psi_b_maximal().to_party_settings().unwrap();
        let a = klyshko_operator(&s, true).unwrap().matrix;
        let b = klyshko_operator(&s.swapped(), false).unwrap().matrix;
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn klyshko_needs_two_parties_and_chsh_exactly_two() {
        let one = PartySettings::from_pairs(&[(SpinDirection::along(Axis::X), SpinDirection::along(Axis::Z))]).unwrap();
        assert!(klyshko_operator(&one, false).is_err());
        let three = angles::ghz_maximal().to_party_settings().unwrap();
        assert!(chsh_operator(&three).is_err());
        assert!(klyshko_coefficients(1, false).is_err());
    }

    #[test]
    fn coefficient_expansion_matches_operator_for_four_parties() {
        let dirs = [0.3, 1.1, 2.0, -0.7, 0.5, 2.9, -1.3, 0.25];
        let s = PartySettings::from_pairs(
            &(0..4)
                .map(|k| {
                    (SpinDirection::spherical(dirs[2 * k], dirs[k]), SpinDirection::spherical(dirs[k], dirs[2 * k + 1]))
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        for primed in [false, true] {
            let coeffs = klyshko_coefficients(4, primed).unwrap();
            let mut built = ComplexMatrix::zeros(16);
            for (mask, c) in coeffs.iter().enumerate() {
                if *c != 0.0 {
                    built = &built + &product_observable(&s.directions_for(mask)).unwrap().scale_re(*c);
                }
            }
            let op = klyshko_operator(&s, primed).unwrap().matrix;
            assert!(op.max_abs_diff(&built).unwrap() < 1e-12);
        }
    }

    #[test]
    fn chsh_on_singlet_reaches_two_root_two() {
        let singlet = QuantumState::pure(qubit::singlet()).unwrap();
        let e = chsh_operator(&angles::chsh_optimal()).unwrap().expectation(&singlet).unwrap();
        assert!((e.abs() - 2.0 * SQRT_2).abs() < 1e-9, "{e}");
    }

    #[test]
    fn degenerate_chsh_settings_collapse_to_twice_ab() {
        let a = SpinDirection::in_xz(0.4);
        let b = SpinDirection::in_xy(1.2);
        let s = PartySettings::from_pairs(&[(a, a), (b, b)]).unwrap();
        let op = chsh_operator(&s).unwrap().matrix;
        let twice = product_observable(&[a, b]).unwrap().scale_re(2.0);
        assert!(op.max_abs_diff(&twice).unwrap() < 1e-12);
    }

    #[test]
    fn singlet_triplet_mixture_gives_two_root_two() {
        let rho = presets::singlet_triplet_mixture().unwrap();
        let e = klyshko_operator(&angles::singlet_triplet_mixture(), false).unwrap().expectation(&rho).unwrap();
        assert!((e.abs() - 2.0 * SQRT_2).abs() < 1e-9, "{e}");
    }

    #[test]
    fn singlet_triplet_value_survives_reversed_party_assignment() {
        // Treat party 1 as "the Nth": reverse both the state and the settings.
        let rho = presets::singlet_triplet_mixture().unwrap();
        let rev = crate::hilbert::Permutation::new(vec![3, 2, 1]).unwrap();
        let rho_rev = crate::hilbert::permute_parties(&rho, &rev).unwrap();
        let s_rev = angles::singlet_triplet_mixture().reordered(&[3, 2, 1]).unwrap();
        let e = klyshko_operator(&s_rev, false).unwrap().expectation(&rho_rev).unwrap();
        assert!((e.abs() - 2.0 * SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn ghz_and_psi_b_reach_four() {
        let g = klyshko_operator(&angles::ghz_maximal().to_party_settings().unwrap(), false).unwrap();
        assert!((g.expectation(&ghz(3).unwrap()).unwrap().abs() - 4.0).abs() < 1e-9);
        let b = klyshko_operator(&angles::psi_b_maximal().to_party_settings().unwrap(), false).unwrap();
        assert!((b.expectation(&psi_b()).unwrap().abs() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn mermin_identity_is_exact() {
        let (holds, defect) = mermin_projector_identity();
        assert!(holds);
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn mermin_on_ghz_up_and_mixture() {
        let m = mermin_operator();
        assert!((m.expectation(&ghz(3).unwrap()).unwrap() + 4.0).abs() < 1e-12);
        let up = QuantumState::basis(crate::hilbert::BasisIndex::parse("uuu").unwrap());
        assert!(m.expectation(&up).unwrap().abs() < 1e-12);
        let mix = presets::singlet_triplet_mixture().unwrap();
        assert!(m.expectation(&mix).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sackett_plus_on_ghz_is_cos_three_phi() {
        let g = ghz(3).unwrap();
        for phi in [0.0, PI / 6.0, PI / 3.0, 0.77] {
            let e = expectation(&g, &sackett_observable(Sign::Plus, phi)).unwrap();
            assert!((e - (3.0 * phi).cos()).abs() < 1e-12);
        }
        assert!(
            sackett_observable(Sign::Plus, 0.0).max_abs_diff(&crate::hilbert::pauli_string("xxx").unwrap()).unwrap()
                < 1e-15
        );
    }

    #[test]
    fn sackett_minus_on_psi_b_is_cos_three_phi() {
        let b = psi_b();
        for k in 0..12 {
            let phi = k as f64 * 0.5;
            let e = expectation(&b, &sackett_observable(Sign::Minus, phi)).unwrap();
            assert!((e - (3.0 * phi).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_difference_on_psi_b_mixture_and_up() {
        let b = psi_b();
        let mix = presets::bell_signal_mixture().unwrap();
        let up = QuantumState::basis(crate::hilbert::BasisIndex::parse("uuu").unwrap());
        for k in 0..8 {
            let phi = k as f64 * PI / 4.0 + 0.1;
            let obs = bell_signal_difference_observable(phi);
            assert!((expectation(&b, &obs).unwrap() - phi.cos()).abs() < 1e-12);
            assert!((expectation(&mix, &obs).unwrap() + phi.cos()).abs() < 1e-12);
            assert!(expectation(&up, &obs).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_signals_flip_sign_between_projections() {
        let b = psi_b();
        let mix = presets::bell_signal_mixture().unwrap();
        for phi in [0.0, 0.4, FRAC_PI_2, 2.5] {
            assert!((conditional_bell_signal(&b, Sign::Plus, phi).unwrap() - phi.cos()).abs() < 1e-12);
            assert!((conditional_bell_signal(&b, Sign::Minus, phi).unwrap() + phi.cos()).abs() < 1e-12);
            assert!((conditional_bell_signal(&mix, Sign::Plus, phi).unwrap() + phi.cos()).abs() < 1e-12);
        }
        let up = QuantumState::basis(crate::hilbert::BasisIndex::parse("uuu").unwrap());
        assert!(conditional_bell_signal(&up, Sign::Plus, FRAC_PI_4).unwrap().abs() < 1e-12);
    }

    #[test]
    fn conditioning_on_an_impossible_outcome_is_an_error() {
        // particle 2 in |+⟩_x with certainty
        let plus = QuantumState::pure(qubit::plus_x(true)).unwrap();
        let up = QuantumState::pure(qubit::up()).unwrap();
        let s = QuantumState::product(&[up.clone(), plus, up]).unwrap();
        assert!(conditional_bell_signal(&s, Sign::Minus, 0.0).is_err());
    }

    #[test]
    fn correlation_tensor_matches_direct_expectation() {
        let b = psi_b();
        let t = CorrelationTensor::from_state(&b).unwrap();
        let dirs = [SpinDirection::spherical(0.3, 1.0), SpinDirection::spherical(2.0, -0.4), SpinDirection::in_xz(0.9)];
        let direct = expectation(&b, &product_observable(&dirs).unwrap()).unwrap();
        assert!((t.product_expectation(&dirs) - direct).abs() < 1e-12);
    }

    #[test]
    fn settings_file_accepts_vectors_and_planar_angles() {
        let doc: SettingsDocument = serde_json::from_str(
            r#"{"plane": "xy", "parties": [{"a": [0,0,1], "a_prime": [0,0,1]}, {"a": 0.0, "a_prime": 1.5707963267948966}, {"a": 0.7853981633974483, "a_prime": -0.7853981633974483}]}"#,
        )
        .unwrap();
        let s = doc.into_settings().unwrap();
        let reference = angles::singlet_triplet_mixture();
        for k in 0..3 {
            for (x, y) in s.party(k).primed.components().iter().zip(reference.party(k).primed.components()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
        let no_plane: SettingsDocument =
            serde_json::from_str(r#"{"plane": null, "parties": [{"a": 0.1, "a_prime": [1,0,0]}]}"#).unwrap();
        let err = no_plane.into_settings().unwrap_err();
        assert!(err.to_string().contains("parties[0].a"), "{err}");
    }
}
