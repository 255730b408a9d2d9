//! Monte Carlo campaigns and the analyses run on their output.
//!
//! A campaign samples one Poisson configuration on `[0, N]²` per
//! `(N, trial)` pair, records the last-passage value `d(0, (N, N))`, the
//! spread of the maximal-point set around the diagonal and the cylinder
//! events, and persists everything as CSV plus a JSON manifest.

mod campaign;
mod estimators;
mod io;
mod lemmas;

pub use campaign::{run_campaign, run_trial, ExperimentConfig, TrialRecord};
pub use estimators::{
    estimate_chi, estimate_xi, fit_log_log, ks_lattice, lattice_ceiling, probability_a, quantile,
    self_sampled_lengths, tw_comparison, wilson_interval, ProbabilityEstimate, ScalingFit,
    MIN_TRIALS_PER_N, MIN_TW_TRIALS,
};
pub use io::{
    gamma_column, manifest_path, persist_campaign, read_campaign_csv, write_campaign_csv,
    FitSummary, Manifest,
};
pub use lemmas::{
    cell_count_maxima, cell_tail_report, check_cell_tail, check_lemma_2_3, check_lemma_3_2,
    lemma_3_2_profile, subsample_indices, CellTailReport, TailRow, CELL_TAIL_CONSTANT,
    CELL_TAIL_DEPTHS, MAX_GRID_EVALUATIONS,
};
