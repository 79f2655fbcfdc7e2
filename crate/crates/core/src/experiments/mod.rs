//! Re-analysis of three-photon and atom-cavity experiments.

mod contamination;
mod pan;
mod record;
mod wstate;

pub use contamination::{
    analyze_rauschenbeutel, demonstrate_rho_mix, difference_signal_harmonic, phase_matched_target,
    worst_case_amplitude, worst_case_state, RauschenbeutelReport, RhoMixReport, WorstCaseReport, QUOTED_CONTAMINATION,
    QUOTED_CONTAMINATION_ALT_SIGMA, QUOTED_CORRECTED_FIDELITY, QUOTED_CORRECTED_OFFDIAG, QUOTED_NAIVE_FIDELITY,
    SCAN_POINTS,
};
pub use pan::{analyze_pan, coherence_from_mermin, synthetic_pan_record, PanReport, DEFAULT_BRANCH_POPULATION};
pub use record::{
    bundled_document, load_record, named_record, read_record, Correlation, ExperimentRecord, PopulationTable,
    BUNDLED_RECORDS, POPULATION_SUM_SLACK,
};
pub use wstate::{
    build_w_state, control_observable, fit_w_state, interference_observable, population_id, w_predictions, w_targets,
    WFitReport, CONTROL, FIT_GRID_STEP, INTERFERENCE,
};
