//! Values with a 1σ uncertainty, combined in quadrature.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real value with a nonnegative 1σ uncertainty.
///
/// Sums and differences of independent values add their sigmas in quadrature;
/// scaling by `c` scales the sigma by `|c|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredValue {
    pub value: f64,
    pub sigma: f64,
}

impl MeasuredValue {
    pub fn new(value: f64, sigma: f64) -> Result<Self> {
        if !value.is_finite() || !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::validation(
                "measured value must be finite with sigma ≥ 0",
                format!("{value} ± {sigma}"),
            ));
        }
        Ok(MeasuredValue { value, sigma })
    }

    pub const fn exact(value: f64) -> Self {
        MeasuredValue { value, sigma: 0.0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.sigma
    }

    pub fn upper(&self) -> f64 {
        self.value + self.sigma
    }

    pub fn abs(self) -> Self {
        MeasuredValue { value: self.value.abs(), sigma: self.sigma }
    }

    /// Rounds both parts to `decimals` places, half away from zero.
    pub fn rounded(&self, decimals: u32) -> (f64, f64) {
        (round_to(self.value, decimals), round_to(self.sigma, decimals))
    }
}

pub fn round_to(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    // nudge by a few ulps so values like 0.285 land where a reader expects
    let nudged = x * scale * (1.0 + 4.0 * f64::EPSILON);
    nudged.round() / scale
}

/// Whether a quoted uncertainty agrees with a computed one at `decimals`
/// places: the quote must equal the computed sigma rounded to nearest or
/// rounded up (the usual reporting conventions for uncertainties).
pub fn sigma_matches_quote(computed: f64, quoted: f64, decimals: u32) -> bool {
    let scale = 10f64.powi(decimals as i32);
    let nearest = round_to(computed, decimals);
    let up = (computed * scale * (1.0 - 4.0 * f64::EPSILON)).ceil() / scale;
    let eq = |a: f64, b: f64| (a - b).abs() < 0.5 / scale;
    eq(nearest, quoted) || eq(up, quoted)
}

impl fmt::Display for MeasuredValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*} ± {:.*}", p, self.value, p, self.sigma),
            None => write!(f, "{} ± {}", self.value, self.sigma),
        }
    }
}

impl Add for MeasuredValue {
    type Output = MeasuredValue;
    fn add(self, rhs: MeasuredValue) -> MeasuredValue {
        MeasuredValue { value: self.value + rhs.value, sigma: self.sigma.hypot(rhs.sigma) }
    }
}

impl Sub for MeasuredValue {
    type Output = MeasuredValue;
    fn sub(self, rhs: MeasuredValue) -> MeasuredValue {
        MeasuredValue { value: self.value - rhs.value, sigma: self.sigma.hypot(rhs.sigma) }
    }
}

impl Neg for MeasuredValue {
    type Output = MeasuredValue;
    fn neg(self) -> MeasuredValue {
        MeasuredValue { value: -self.value, sigma: self.sigma }
    }
}

impl Mul<f64> for MeasuredValue {
    type Output = MeasuredValue;
    fn mul(self, c: f64) -> MeasuredValue {
        MeasuredValue { value: self.value * c, sigma: self.sigma * c.abs() }
    }
}

impl Div<f64> for MeasuredValue {
    type Output = MeasuredValue;
    fn div(self, c: f64) -> MeasuredValue {
        self * (1.0 / c)
    }
}

impl std::iter::Sum for MeasuredValue {
    fn sum<I: Iterator<Item = MeasuredValue>>(iter: I) -> MeasuredValue {
        iter.fold(MeasuredValue::exact(0.0), |a, b| a + b)
    }
}

impl MeasuredValue {
    /// Same value, new sigma (no validation; for literals).
    pub const fn with_sigma(self, sigma: f64) -> Self {
        MeasuredValue { value: self.value, sigma }
    }
}
