//! Campaign configuration: the parameter grid, replication, and master seed.
//!
//! Configs load from flat JSON; any omitted key falls back to the default
//! campaign grid below, and CLI flags override loaded keys.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::samplers::{SampleMethod, DEFAULT_TELEPORT};

use super::PipelineError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Nodes per generated network.
    pub n: usize,
    /// Edges per incoming node.
    pub m: usize,
    /// Homophily grid.
    pub h_values: Vec<f64>,
    /// Minority-fraction grid.
    pub f_values: Vec<f64>,
    pub methods: Vec<SampleMethod>,
    /// Random-walk teleport probability.
    pub teleport: f64,
    /// Sample sizes as fractions of `n`.
    pub sample_fractions: Vec<f64>,
    /// Top-k cutoffs to evaluate.
    pub k_values: Vec<usize>,
    /// Networks generated per (h, f) cell.
    pub networks_per_cell: usize,
    /// Samples drawn per network per (method, fraction) pair.
    pub samples_per_network: usize,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    /// Default campaign grid: 5 homophily levels x 5 group mixes x 4 methods
    /// x 4 sample sizes x 4 cutoffs with 6 x 2 replication, i.e. 4,800
    /// observations per sampling method.
    ///
    /// The k list deliberately mixes very short cutoffs (10, 25), where
    /// degree-proportional samplers capture the head of the ranking almost
    /// exactly, with k = 100; sample fractions reach down to 0.05, where
    /// uniform node and snowball samples lose minority hubs badly. That
    /// spread is what separates the sampler families in the regression
    /// models.
    fn default() -> Self {
        Self {
            n: 10_000,
            m: 10,
            h_values: vec![0.1, 0.25, 0.5, 0.75, 0.9],
            f_values: vec![0.05, 0.1, 0.2, 0.35, 0.5],
            methods: SampleMethod::ALL.to_vec(),
            teleport: DEFAULT_TELEPORT,
            sample_fractions: vec![0.05, 0.1, 0.25, 0.5],
            k_values: vec![10, 25, 50, 100],
            networks_per_cell: 6,
            samples_per_network: 2,
            master_seed: 20170403,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::Config(msg));
        if self.n < 3 || self.m < 1 {
            return fail(format!("need n >= 3 and m >= 1, got n = {}, m = {}", self.n, self.m));
        }
        if self.h_values.is_empty() || self.f_values.is_empty() {
            return fail("h_values and f_values must be non-empty".into());
        }
        if self.methods.is_empty() || self.sample_fractions.is_empty() || self.k_values.is_empty() {
            return fail("methods, sample_fractions, and k_values must be non-empty".into());
        }
        for &h in &self.h_values {
            if !(0.0..=1.0).contains(&h) {
                return fail(format!("homophily {h} outside [0, 1]"));
            }
        }
        for &f in &self.f_values {
            if !(f > 0.0 && f <= 0.5) {
                return fail(format!("minority fraction {f} outside (0, 0.5]"));
            }
        }
        for &s in &self.sample_fractions {
            if !(s > 0.0 && s <= 1.0) {
                return fail(format!("sample fraction {s} outside (0, 1]"));
            }
        }
        if self.k_values.iter().any(|&k| k == 0) {
            return fail("top-k values must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.teleport) {
            return fail(format!("teleport {} outside [0, 1)", self.teleport));
        }
        if self.networks_per_cell == 0 || self.samples_per_network == 0 {
            return fail("replication counts must be >= 1".into());
        }
        Ok(())
    }

    /// Rows the campaign will emit if no cell is skipped.
    pub fn expected_records(&self) -> usize {
        self.h_values.len()
            * self.f_values.len()
            * self.networks_per_cell
            * self.methods.len()
            * self.sample_fractions.len()
            * self.samples_per_network
            * self.k_values.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_large_enough_for_regression() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let per_method = c.expected_records() / c.methods.len();
        assert!(per_method >= 3_200, "default grid gives {per_method} rows per model");
    }

    #[test]
    fn json_round_trip_and_partial_files() {
        let c = ExperimentConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);

        // Partial JSON picks up defaults for the rest.
        let partial: ExperimentConfig =
            serde_json::from_str(r#"{"n": 500, "master_seed": 7}"#).unwrap();
        assert_eq!(partial.n, 500);
        assert_eq!(partial.master_seed, 7);
        assert_eq!(partial.m, ExperimentConfig::default().m);

        // Unknown keys are rejected rather than silently ignored.
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"n_nodes": 500}"#).is_err());
    }

    #[test]
    fn validation_catches_domain_errors() {
        let mut c = ExperimentConfig::default();
        c.h_values = vec![1.2];
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::default();
        c.f_values = vec![0.6];
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::default();
        c.sample_fractions = vec![0.0];
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::default();
        c.networks_per_cell = 0;
        assert!(c.validate().is_err());
    }
}
