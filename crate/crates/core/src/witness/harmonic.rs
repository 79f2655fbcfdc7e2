//! Fourier components of phase scans sampled on a uniform grid.

use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::PHYSICAL_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub phi: f64,
    pub value: f64,
}

/// `amplitude · cos(f φ + phase)`; for `f = 0` the constant offset is
/// `amplitude · cos(phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub frequency: usize,
    pub amplitude: f64,
    pub phase: f64,
}

/// `φ_k = 2πk/M`, k = 0..M.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| TAU * k as f64 / m as f64).collect()
}

fn check_uniform(samples: &[Sample]) -> Result<()> {
    let m = samples.len();
    let step = TAU / m as f64;
    let start = samples[0].phi;
    if start < -PHYSICAL_TOL || start > step + PHYSICAL_TOL {
        return Err(Error::validation("scan must start in [0, 2π/M)", format!("φ_0 = {start}")));
    }
    for (k, s) in samples.iter().enumerate() {
        let expected = start + step * k as f64;
        if (s.phi - expected).abs() > PHYSICAL_TOL {
            return Err(Error::validation(
                "scan must be uniform over one period",
                format!("φ_{k} = {}, expected {expected}", s.phi),
            ));
        }
        if !s.value.is_finite() {
            return Err(Error::validation("scan values must be finite", format!("value at φ_{k}")));
        }
    }
    Ok(())
}

/// Component at integer frequency `f` via `c_f = (2/M) Σ v_k e^{−i f φ_k}`
/// (`1/M` for `f = 0`). Exact for band-limited signals when `M > 2 f_max`.
pub fn harmonic_extract(samples: &[Sample], frequency: usize) -> Result<Harmonic> {
    let m = samples.len();
    if m < 2 * frequency + 1 || m == 0 {
        return Err(Error::validation(
            "scan needs at least 2f+1 samples",
            format!("{m} samples for frequency {frequency}"),
        ));
    }
    check_uniform(samples)?;
    let f = frequency as f64;
    let sum: Complex64 = samples.iter().map(|s| Complex64::from_polar(s.value, -f * s.phi)).sum();
    let norm = if frequency == 0 { 1.0 } else { 2.0 };
    let c = sum * (norm / m as f64);
    Ok(Harmonic { frequency, amplitude: c.norm(), phase: c.arg() })
}

/// Samples `offset + Σ a cos(f φ + p)` on [`uniform_grid`].
pub fn synthesize(offset: f64, components: &[Harmonic], m: usize) -> Vec<Sample> {
    uniform_grid(m)
        .into_iter()
        .map(|phi| Sample {
            phi,
            value: offset
                + components.iter().map(|h| h.amplitude * (h.frequency as f64 * phi + h.phase).cos()).sum::<f64>(),
        })
        .collect()
}

/// Evaluates `signal` on [`uniform_grid`].
pub fn scan(m: usize, mut signal: impl FnMut(f64) -> Result<f64>) -> Result<Vec<Sample>> {
    uniform_grid(m).into_iter().map(|phi| Ok(Sample { phi, value: signal(phi)? })).collect()
}

pub fn write_samples(w: impl Write, samples: &[Sample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for s in samples {
        out.serialize(s)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `phi,value` CSV.
pub fn read_samples(r: impl Read) -> Result<Vec<Sample>> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["phi", "value"] {
        return Err(Error::Schema {
            path: "header".into(),
            message: format!("expected `phi,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for row in reader.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn read_samples_file(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    read_samples(std::fs::File::open(path)?)
}
