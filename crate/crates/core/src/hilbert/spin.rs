//! Single-qubit spin operators and the product basis labelling.
//!
//! Conventions: `|↑⟩` and `|↓⟩` are the +1/−1 eigenvectors of σ_z, with `↑`
//! stored as bit 0. σ_y = (0, −i; i, 0). In an N-qubit product basis particle 1
//! is the most significant bit, so basis labels 1..=2^N enumerate
//! `|↑↑↑⟩, |↑↑↓⟩, |↑↓↑⟩, …, |↓↓↓⟩` in that order.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Tolerance on `|n|² − 1` for a spin direction.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn from_char(c: char) -> Option<Axis> {
        match c.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let rows = match axis {
        Axis::X => [[o, one], [one, o]],
        Axis::Y => [[o, -i], [i, o]],
        Axis::Z => [[one, o], [o, -one]],
    };
    ComplexMatrix::from_entries(rows.concat()).expect("2x2")
}

/// A unit vector in R³ selecting the spin observable `n·σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinDirection {
    x: f64,
    y: f64,
    z: f64,
}

impl SpinDirection {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm_sq = x * x + y * y + z * z;
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > UNIT_TOL {
            return Err(Error::validation(
                "spin direction must be a unit vector",
                format!("|({x}, {y}, {z})|² = {norm_sq}"),
            ));
        }
        Ok(SpinDirection { x, y, z })
    }

    pub fn along(axis: Axis) -> Self {
        match axis {
            Axis::X => SpinDirection { x: 1.0, y: 0.0, z: 0.0 },
            Axis::Y => SpinDirection { x: 0.0, y: 1.0, z: 0.0 },
            Axis::Z => SpinDirection { x: 0.0, y: 0.0, z: 1.0 },
        }
    }

    /// `n_φ = (cos φ, sin φ, 0)`.
    pub fn in_xy(phi: f64) -> Self {
        SpinDirection { x: phi.cos(), y: phi.sin(), z: 0.0 }
    }

    /// `(cos θ, 0, sin θ)`: angle measured from the x axis in the xz plane.
    pub fn in_xz(theta: f64) -> Self {
        SpinDirection { x: theta.cos(), y: 0.0, z: theta.sin() }
    }

    /// Polar angle from +z, azimuth from +x.
    pub fn spherical(polar: f64, azimuth: f64) -> Self {
        SpinDirection { x: polar.sin() * azimuth.cos(), y: polar.sin() * azimuth.sin(), z: polar.cos() }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn component(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }
}

/// `n·σ` as a 2×2 matrix.
pub fn spin_op(n: &SpinDirection) -> ComplexMatrix {
    let [x, y, z] = n.components();
    ComplexMatrix::from_entries(vec![
        Complex64::new(z, 0.0),
        Complex64::new(x, -y),
        Complex64::new(x, y),
        Complex64::new(-z, 0.0),
    ])
    .expect("2x2")
}

/// Kronecker product in party order, particle 1 leftmost.
pub fn tensor(ops: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = ops.split_first().ok_or_else(|| Error::argument("tensor product of an empty operator list"))?;
    Ok(rest.iter().fold(first.clone(), |acc, op| acc.kron(op)))
}

/// Product observable `n_1·σ ⊗ … ⊗ n_N·σ`.
pub fn product_observable(directions: &[SpinDirection]) -> Result<ComplexMatrix> {
    let ops: Vec<_> = directions.iter().map(spin_op).collect();
    tensor(&ops)
}

/// Tensor product of Pauli matrices named by a string such as `"xyy"`.
/// `i` or `1` stands for the identity.
pub fn pauli_string(spec: &str) -> Result<ComplexMatrix> {
    let ops = spec
        .chars()
        .map(|c| match c {
            'i' | 'I' | '1' => Ok(ComplexMatrix::identity(2)),
            _ => Axis::from_char(c)
                .map(pauli)
                .ok_or_else(|| Error::argument(format!("unknown Pauli factor '{c}' in \"{spec}\""))),
        })
        .collect::<Result<Vec<_>>>()?;
    tensor(&ops)
}

/// σ_z eigenvalue label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// A product-basis vector, labelled 1..=2^N as in the `|↑↑↑⟩ = 1, …, |↓↓↓⟩ = 2^N`
/// enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    n_parties: usize,
    offset: usize,
}

impl BasisIndex {
    pub fn from_label(n_parties: usize, label: usize) -> Result<Self> {
        let dim = 1usize << n_parties;
        if label == 0 || label > dim {
            return Err(Error::argument(format!("basis label {label} outside 1..={dim} for {n_parties} parties")));
        }
        Ok(BasisIndex { n_parties, offset: label - 1 })
    }

    pub fn from_spins(spins: &[Spin]) -> Self {
        let offset = spins.iter().fold(0, |acc, s| (acc << 1) | s.bit());
        BasisIndex { n_parties: spins.len(), offset }
    }

    /// Parses strings such as `"uud"` or `"↑↑↓"`.
    pub fn parse(text: &str) -> Result<Self> {
        let spins = text
            .chars()
            .map(|c| match c {
                'u' | 'U' | '↑' | '0' => Ok(Spin::Up),
                'd' | 'D' | '↓' | '1' => Ok(Spin::Down),
                _ => Err(Error::argument(format!("bad spin symbol '{c}' in \"{text}\""))),
            })
            .collect::<Result<Vec<_>>>()?;
        if spins.is_empty() {
            return Err(Error::argument("empty basis label"));
        }
        Ok(Self::from_spins(&spins))
    }

    pub fn label(&self) -> usize {
        self.offset + 1
    }

    /// Zero-based position in the state vector.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn spins(&self) -> Vec<Spin> {
        (0..self.n_parties)
            .map(|k| if (self.offset >> (self.n_parties - 1 - k)) & 1 == 0 { Spin::Up } else { Spin::Down })
            .collect()
    }

    /// The basis vector with every spin flipped.
    pub fn complement(&self) -> Self {
        let mask = (1usize << self.n_parties) - 1;
        BasisIndex { n_parties: self.n_parties, offset: !self.offset & mask }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for s in self.spins() {
            f.write_str(if s == Spin::Up { "↑" } else { "↓" })?;
        }
        f.write_str("⟩")
    }
}
