//! Search for measurement settings that maximize |E(F_N)|.
//!
//! Coordinate ascent: on the first sweep each angle (or each direction, on the
//! sphere) is set to the best point of a coarse grid over its full range and
//! refined by golden-section search within one grid step. Later sweeps repeat
//! the single-angle golden-section refinement until a sweep gains less than
//! [`CONVERGENCE_TOL`]. Everything is deterministic.
//!
//! `⟨F_N⟩` is affine in each single direction, `h + g·n`, so a coordinate
//! step only needs `(h, g)` once and every probe is a dot product.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::Serialize;

use crate::bell::{klyshko_coefficients, CorrelationTensor, PartySetting, PartySettings, Plane};
use crate::error::{Error, Result};
use crate::hilbert::{QuantumState, SpinDirection};
use crate::random::seeded;

pub const ANGLE_GRID: usize = 24;
pub const POLAR_GRID: usize = 12;
pub const CONVERGENCE_TOL: f64 = 1e-10;
pub const MAX_OPTIMIZER_SWEEPS: usize = 200;
pub const RANDOM_STARTS: usize = 6;
const GOLDEN_TOL: f64 = 1e-10;
const PATTERN_DOUBLINGS: usize = 20;
const START_SEED: u64 = 0x5eed_0003;

#[derive(Clone, Debug, Serialize)]
pub struct OptimizedSettings {
    pub value: f64,
    #[serde(skip)]
    pub settings: PartySettings,
    /// Per party `[unprimed, primed]`; an angle from x in a plane, or
    /// `(polar, azimuth)` pairs on the sphere.
    pub parameters: Vec<f64>,
    pub plane: Option<Plane>,
    pub sweeps: usize,
    pub converged: bool,
}

struct Objective {
    /// Nonzero tensor entries with their base-3 digits, party 1 first.
    terms: Vec<(f64, Vec<usize>)>,
    /// Nonzero coefficients with per-party primed flags.
    masks: Vec<(f64, Vec<usize>)>,
    n: usize,
    plane: Option<Plane>,
}

/// `h + g·n` for one direction slot.
#[derive(Clone, Copy)]
struct Affine {
    h: f64,
    g: [f64; 3],
}

impl Affine {
    fn at(&self, d: [f64; 3]) -> f64 {
        (self.h + self.g[0] * d[0] + self.g[1] * d[1] + self.g[2] * d[2]).abs()
    }
}

impl Objective {
    fn new(tensor: &CorrelationTensor, coefficients: &[f64], plane: Option<Plane>) -> Self {
        let n = tensor.n_parties();
        let terms = tensor
            .values()
            .iter()
            .enumerate()
            .filter(|(_, t)| t.abs() > 1e-15)
            .map(|(idx, t)| {
                let mut digits = vec![0; n];
                let mut rest = idx;
                for k in (0..n).rev() {
                    digits[k] = rest % 3;
                    rest /= 3;
                }
                (*t, digits)
            })
            .collect();
        let masks = coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(mask, c)| (*c, (0..n).map(|k| (mask >> k) & 1).collect()))
            .collect();
        Objective { terms, masks, n, plane }
    }

    /// Parameters per direction.
    fn width(&self) -> usize {
        match self.plane {
            Some(_) => 1,
            None => 2,
        }
    }

    fn components(&self, p: &[f64]) -> [f64; 3] {
        match self.plane {
            Some(Plane::Xy) => [p[0].cos(), p[0].sin(), 0.0],
            Some(Plane::Xz) => [p[0].cos(), 0.0, p[0].sin()],
            None => {
                let (st, ct) = p[0].sin_cos();
                let (sp, cp) = p[1].sin_cos();
                [st * cp, st * sp, ct]
            }
        }
    }

    fn directions(&self, params: &[f64]) -> Vec<[f64; 3]> {
        let w = self.width();
        (0..2 * self.n).map(|s| self.components(&params[s * w..(s + 1) * w])).collect()
    }

    fn settings(&self, params: &[f64]) -> PartySettings {
        let w = self.width();
        let direction = |p: &[f64]| match self.plane {
            Some(plane) => plane.direction(p[0]),
            None => SpinDirection::spherical(p[0], p[1]),
        };
        let parties = (0..self.n)
            .map(|k| PartySetting {
                unprimed: direction(&params[2 * k * w..(2 * k + 1) * w]),
                primed: direction(&params[(2 * k + 1) * w..(2 * k + 2) * w]),
            })
            .collect();
        PartySettings::new(parties).expect("n ≥ 1 parties")
    }

    /// Signed `⟨F_N⟩`; slot `2k` is party k+1 unprimed, `2k+1` primed.
    fn signed(&self, dirs: &[[f64; 3]]) -> f64 {
        let mut total = 0.0;
        for (c, primed) in &self.masks {
            let mut acc = 0.0;
            for (t, digits) in &self.terms {
                let mut prod = *t;
                for k in 0..self.n {
                    prod *= dirs[2 * k + primed[k]][digits[k]];
                }
                acc += prod;
            }
            total += c * acc;
        }
        total
    }

    fn eval(&self, params: &[f64]) -> f64 {
        self.signed(&self.directions(params)).abs()
    }

    fn affine(&self, params: &[f64], slot: usize) -> Affine {
        let mut dirs = self.directions(params);
        dirs[slot] = [0.0; 3];
        let h = self.signed(&dirs);
        let mut g = [0.0; 3];
        for (axis, gi) in g.iter_mut().enumerate() {
            let mut e = [0.0; 3];
            e[axis] = 1.0;
            dirs[slot] = e;
            *gi = self.signed(&dirs) - h;
        }
        Affine { h, g }
    }
}

/// Maximizes `f` on `[lo, hi]` assuming unimodality there.
fn golden_max(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Takes `candidate` only on a strict improvement, so ties keep the earlier point.
fn improve<T>(best: &mut (T, f64), candidate: (T, f64)) {
    if candidate.1 > best.1 + 1e-15 {
        *best = candidate;
    }
}

/// Step used to bracket the golden-section search of parameter `i`.
fn step_for(obj: &Objective, i: usize) -> f64 {
    if obj.plane.is_none() && i & 1 == 0 {
        PI / POLAR_GRID as f64
    } else {
        TAU / ANGLE_GRID as f64
    }
}

/// Golden-section search on parameter `i` within one grid step of its
/// current value, other parameters fixed.
fn refine(obj: &Objective, params: &mut [f64], i: usize) {
    let w = obj.width();
    let slot = i / w;
    let aff = obj.affine(params, slot);
    let base = params[slot * w..(slot + 1) * w].to_vec();
    let at = |t: f64| {
        let mut p = base.clone();
        p[i % w] = t;
        aff.at(obj.components(&p))
    };
    let mut best = (params[i], at(params[i]));
    let step = step_for(obj, i);
    let refined = golden_max(best.0 - step, best.0 + step, at);
    improve(&mut best, refined);
    params[i] = best.0;
}

/// Sets slot `slot` to the best point of the coarse grid, then refines each
/// of its angles.
fn grid_then_refine(obj: &Objective, params: &mut [f64], slot: usize) {
    let w = obj.width();
    let aff = obj.affine(params, slot);
    let current = params[slot * w..(slot + 1) * w].to_vec();
    let mut best = (current.clone(), aff.at(obj.components(&current)));
    if w == 1 {
        for k in 0..ANGLE_GRID {
            let t = vec![TAU * k as f64 / ANGLE_GRID as f64];
            let v = aff.at(obj.components(&t));
            improve(&mut best, (t, v));
        }
    } else {
        for a in 0..=POLAR_GRID {
            for b in 0..ANGLE_GRID {
                let t = vec![PI * a as f64 / POLAR_GRID as f64, TAU * b as f64 / ANGLE_GRID as f64];
                let v = aff.at(obj.components(&t));
                improve(&mut best, (t, v));
            }
        }
    }
    params[slot * w..(slot + 1) * w].copy_from_slice(&best.0);
    for i in slot * w..(slot + 1) * w {
        refine(obj, params, i);
    }
}

/// Extrapolates along the displacement of the last sweep, doubling the step
/// while the value keeps improving. Coordinate ascent alone creeps along
/// curved ridges.
fn pattern_move(obj: &Objective, previous: &[f64], params: &mut Vec<f64>) {
    let step: Vec<f64> = params
        .iter()
        .zip(previous)
        .map(|(p, q)| {
            // shortest signed angular difference
            let d = (p - q).rem_euclid(TAU);
            if d > PI {
                d - TAU
            } else {
                d
            }
        })
        .collect();
    let mut best = obj.eval(params);
    let base = params.clone();
    let mut scale = 1.0;
    for _ in 0..PATTERN_DOUBLINGS {
        let trial: Vec<f64> = base.iter().zip(&step).map(|(b, d)| b + scale * d).collect();
        let v = obj.eval(&trial);
        if v > best + 1e-15 {
            best = v;
            *params = trial;
            scale *= 2.0;
        } else {
            break;
        }
    }
}

fn ascend(obj: &Objective, mut params: Vec<f64>) -> OptimizedSettings {
    let slots = 2 * obj.n;
    let mut value = obj.eval(&params);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < MAX_OPTIMIZER_SWEEPS {
        sweeps += 1;
        let previous = params.clone();
        if sweeps == 1 {
            for slot in 0..slots {
                grid_then_refine(obj, &mut params, slot);
            }
        } else {
            for i in 0..params.len() {
                refine(obj, &mut params, i);
            }
        }
        pattern_move(obj, &previous, &mut params);
        let next = obj.eval(&params);
        let gain = next - value;
        value = next.max(value);
        if gain < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    for p in params.iter_mut() {
        *p = p.rem_euclid(TAU);
    }
    if obj.plane.is_none() {
        // fold polar angles back into [0, π]
        for k in 0..slots {
            let (polar, azimuth) = (params[2 * k], params[2 * k + 1]);
            if polar > PI {
                params[2 * k] = TAU - polar;
                params[2 * k + 1] = (azimuth + PI).rem_euclid(TAU);
            }
        }
    }
    OptimizedSettings {
        value: obj.eval(&params),
        settings: obj.settings(&params),
        parameters: params,
        plane: obj.plane,
        sweeps,
        converged,
    }
}

/// The all-equal start, a start with primed settings a quarter turn from the
/// unprimed ones, then seeded random starts. Single-coordinate moves cannot
/// leave the all-equal configuration on states like GHZ, hence the restarts.
fn starting_points(obj: &Objective) -> Vec<Vec<f64>> {
    let w = obj.width();
    let len = 2 * obj.n * w;
    let mut starts = Vec::with_capacity(2 + RANDOM_STARTS);
    let mut base = vec![0.0; len];
    if obj.plane.is_none() {
        // start on the equator so azimuths are not degenerate
        for k in 0..2 * obj.n {
            base[k * w] = PI / 2.0;
        }
    }
    starts.push(base.clone());
    let mut quarter = base;
    for k in 0..obj.n {
        quarter[(2 * k + 1) * w + w - 1] += PI / 2.0;
    }
    starts.push(quarter);
    let mut rng = seeded(START_SEED);
    for _ in 0..RANDOM_STARTS {
        let params = (0..len)
            .map(|i| {
                let u: f64 = rng.random();
                if w == 2 && i % 2 == 0 {
                    (2.0 * u - 1.0).acos()
                } else {
                    TAU * u
                }
            })
            .collect();
        starts.push(params);
    }
    starts
}

/// Maximizes `|⟨F_N⟩|` over settings for `state`, restricted to `plane` when
/// given, otherwise over the full sphere for every direction.
pub fn optimize_settings(state: &QuantumState, plane: Option<Plane>) -> Result<OptimizedSettings> {
    let n = state.n_parties();
    if n < 2 {
        return Err(Error::argument("settings optimization needs at least 2 parties"));
    }
    let obj = Objective::new(&CorrelationTensor::from_state(state)?, &klyshko_coefficients(n, false)?, plane);
    let mut best: Option<OptimizedSettings> = None;
    for start in starting_points(&obj) {
        let run = ascend(&obj, start);
        if best.as_ref().is_none_or(|b| run.value > b.value + CONVERGENCE_TOL) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one start"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::klyshko_operator;
    use crate::hilbert::{ghz, psi_b};

    #[test]
    fn golden_section_finds_cosine_peak() {
        let (t, v) = golden_max(-1.0, 1.5, |t| (t - 0.3).cos());
        assert!((t - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_reaches_four_in_the_xy_plane() {
        let out = optimize_settings(&ghz(3).unwrap(), Some(Plane::Xy)).unwrap();
        assert!((out.value - 4.0).abs() < 1e-6, "{}", out.value);
        let direct = klyshko_operator(&out.settings, false).unwrap().expectation(&ghz(3).unwrap()).unwrap();
        assert!((direct.abs() - out.value).abs() < 1e-9);
    }

    #[test]
    fn psi_b_reaches_four() {
        let out = optimize_settings(&psi_b(), Some(Plane::Xy)).unwrap();
        assert!((out.value - 4.0).abs() < 1e-6, "{}", out.value);
    }

    #[test]
    fn deterministic() {
        let a = optimize_settings(&psi_b(), Some(Plane::Xy)).unwrap();
        let b = optimize_settings(&psi_b(), Some(Plane::Xy)).unwrap();
        assert_eq!(a.parameters, b.parameters);
    }
}
