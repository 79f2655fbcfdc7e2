//! Entanglement witnesses: Bell-Klyshko thresholds, GHZ-class fidelity,
//! settings search and harmonic analysis of phase scans.

mod condition;
mod fidelity;
mod harmonic;
mod measured;
mod optimize;

pub use condition::{
    condition_a, condition_a_from_data, Classification, ThresholdOutcome, Thresholds, WitnessVerdict, THRESHOLD_MARGIN,
};
pub use fidelity::{
    best_ghz_class_fidelity, condition_b, fidelity, fidelity_from_components, ConditionB, FidelityReport,
    CONDITION_B_MARGIN, FIDELITY_THRESHOLD,
};
pub use harmonic::{
    harmonic_extract, read_samples, read_samples_file, scan, synthesize, uniform_grid, write_samples, Harmonic, Sample,
};
pub use measured::{round_to, sigma_matches_quote, MeasuredValue};
pub use optimize::{
    optimize_settings, OptimizedSettings, ANGLE_GRID, CONVERGENCE_TOL, MAX_OPTIMIZER_SWEEPS, POLAR_GRID,
};
