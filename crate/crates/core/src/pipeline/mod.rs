//! Experiment orchestration: data loading, seeded prediction sweeps, decay
//! and estimator-validation studies, and stable result files.

mod dataset;
mod experiment;
mod persist;
mod studies;

pub use dataset::{load_dataset, DatasetKind, DATA_DIR_ENV, N_PREDICTORS};
pub use experiment::{
    run_prediction_experiment, run_prediction_experiment_on, train_test_split, ExperimentConfig,
    ExperimentMetadata, ExperimentResult, ExperimentRow, LinearSampler, DIABETES_SIGMA2_GRID,
    PROSTATE_SIGMA2_GRID,
};
pub use persist::{
    format_f64, format_opt_f64, load_json, persist, to_csv, to_stable_json, Format, Tabular,
};
pub use studies::{
    run_decay_study, run_mc_validation, DecayFamily, DecayResult, DecayRow, DecayStudy,
    McValidationConfig, McValidationResult, McValidationRow, ValidationFamily,
};
