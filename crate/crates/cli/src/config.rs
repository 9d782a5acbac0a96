use std::path::PathBuf;

use dpimpute::mechanisms::DEFAULT_COEFFICIENT_BOUND;
use dpimpute::{SimConfig, Strategy};
use serde::Deserialize;

use crate::{CliError, CliResult};

/// JSON config for `simulate`. Every field is optional; omitted fields take
/// the library defaults. Unknown keys are an error.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub n: usize,
    pub d: usize,
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub epsilon: f64,
    pub split: f64,
    pub runs: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub intercept: bool,
    pub coefficient_bound: f64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
}

impl Default for CliConfig {
    fn default() -> Self {
        let s = SimConfig::default();
        Self {
            n: s.n,
            d: s.d,
            beta: s.beta,
            sigma2: s.sigma2,
            epsilon: s.epsilon,
            split: s.split,
            runs: s.runs,
            seed: s.seed,
            strategies: s.strategies,
            intercept: s.intercept,
            coefficient_bound: DEFAULT_COEFFICIENT_BOUND,
            output_dir: PathBuf::from("dpimpute-out"),
            emit_svg: true,
        }
    }
}

impl CliConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))
    }

    pub fn sim_config(&self) -> CliResult<SimConfig> {
        let cfg = SimConfig {
            n: self.n,
            d: self.d,
            beta: self.beta.clone(),
            sigma2: self.sigma2,
            epsilon: self.epsilon,
            split: self.split,
            runs: self.runs,
            seed: self.seed,
            strategies: self.strategies.clone(),
            intercept: self.intercept,
            coefficient_bound: self.coefficient_bound,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
