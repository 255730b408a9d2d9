use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::{analyze_chains, transversal_summary};
use crate::error::{LabError, Result};
use crate::point_process::{derive_seed, sample_poisson, CylinderSpec, Point, Rect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_values: Vec<f64>,
    pub trials_per_n: usize,
    pub gamma_values: Vec<f64>,
    pub master_seed: u64,
    #[serde(default = "default_intensity")]
    pub intensity: f64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

fn default_intensity() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn new(
        n_values: Vec<f64>,
        trials_per_n: usize,
        gamma_values: Vec<f64>,
        master_seed: u64,
    ) -> Self {
        ExperimentConfig {
            n_values,
            trials_per_n,
            gamma_values,
            master_seed,
            intensity: 1.0,
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(LabError::invalid("at least one N value is required"));
        }
        if self.n_values.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
            return Err(LabError::invalid("N values must be positive and finite"));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::invalid("N values must be strictly ascending"));
        }
        if self.trials_per_n == 0 {
            return Err(LabError::invalid("trials_per_n must be at least 1"));
        }
        if self.gamma_values.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return Err(LabError::invalid("gamma values must lie in (0, 1)"));
        }
        if !(self.intensity.is_finite() && self.intensity > 0.0) {
            return Err(LabError::invalid("intensity must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: f64,
    pub seed: u64,
    pub d: u64,
    pub max_deviation: f64,
    pub num_maximal_points: u64,
    /// `(γ, A_N^γ)` in the campaign's γ order.
    pub event_a: Vec<(f64, bool)>,
}

impl TrialRecord {
    pub fn event(&self, gamma: f64) -> Option<bool> {
        self.event_a
            .iter()
            .find(|(g, _)| *g == gamma)
            .map(|&(_, a)| a)
    }
}

/// One trial: sample on `[0, N]²`, analyze chains from `0` to `(N, N)`.
pub fn run_trial(n: f64, seed: u64, intensity: f64, gammas: &[f64]) -> Result<TrialRecord> {
    let config = sample_poisson(Rect::square(n)?, intensity, seed)?;
    let analysis = analyze_chains(&config, Point { x: 0.0, y: 0.0 }, Point { x: n, y: n })?;
    let summary = transversal_summary(&analysis, &config)?;
    let event_a = gammas
        .iter()
        .map(|&g| Ok((g, summary.within(&CylinderSpec::new(g, n)?))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialRecord {
        n,
        seed,
        d: analysis.d as u64,
        max_deviation: summary.max_deviation,
        num_maximal_points: summary.num_maximal_points as u64,
        event_a,
    })
}

/// Runs every `(N, trial)` task and returns records ordered by `N`, then
/// trial index.
///
/// Seeds are `derive_seed(master_seed, bits(N), trial)`, so a record depends
/// only on its key; the output does not depend on thread scheduling.
pub fn run_campaign(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let tasks: Vec<(f64, u64)> = config
        .n_values
        .iter()
        .flat_map(|&n| {
            (0..config.trials_per_n as u64)
                .map(move |t| (n, derive_seed(config.master_seed, n.to_bits(), t)))
        })
        .collect();
    tasks
        .into_par_iter()
        .map(|(n, seed)| run_trial(n, seed, config.intensity, &config.gamma_values))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::new(vec![10.0, 20.0], 2, vec![0.5], 1);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.n_values = vec![20.0, 10.0];
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.trials_per_n = 0;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.gamma_values = vec![1.0];
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.intensity = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn records_are_ordered_by_key() {
        let cfg = ExperimentConfig::new(vec![5.0, 10.0], 3, vec![0.5, 0.9], 11);
        let recs = run_campaign(&cfg).unwrap();
        assert_eq!(recs.len(), 6);
        assert!(recs[..3].iter().all(|r| r.n == 5.0));
        assert!(recs[3..].iter().all(|r| r.n == 10.0));
        assert_eq!(recs[4].seed, derive_seed(11, 10f64.to_bits(), 1));
        for r in &recs {
            assert_eq!(r.event_a.len(), 2);
            assert!(r.event(0.5).unwrap() <= r.event(0.9).unwrap());
        }
    }
}
