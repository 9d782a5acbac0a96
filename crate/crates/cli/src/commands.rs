use std::fs::File;
use std::io::BufReader;

use dpimpute::io::{read_dataset_csv, write_dataset_csv};
use dpimpute::simulation::{runs_csv, summary_csv};
use dpimpute::{
    fit_imputation_model, group_privacy_factor, impute, inflated_sensitivity, mean_global_sensitivity,
    monte_carlo_with_threads, run_strategy, Dataset, FitOptions, ImputationModel, Interval, OlsFit, PipelineOptions,
    Privacy, QueryResult, RandomSource, Strategy, Universe,
};
use serde::{Deserialize, Serialize};

use crate::args::{BoundsArgs, DataArgs, ImputeArgs, QueryArgs, SimulateArgs};
use crate::config::CliConfig;
use crate::output::{create_dir, read_to_string, write_atomic};
use crate::svg::boxplot_svg;
use crate::{CliError, CliResult};

/// Files written by `simulate`, for reporting.
#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub output_dir: String,
    pub files: Vec<String>,
    pub runs: usize,
    pub failures: usize,
}

pub fn simulate(args: &SimulateArgs, threads: usize) -> CliResult<SimulateReport> {
    let cfg = CliConfig::parse(&read_to_string(&args.config)?)?;
    let sim = cfg.sim_config()?;
    let dir = args.output_dir.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let out = monte_carlo_with_threads(&sim, threads)?;
    if out.records.is_empty() {
        let first = out.failures.first().map_or(String::new(), |f| format!("; first error: {}", f.error));
        return Err(CliError::NoResult(format!("all {} runs failed{first}", sim.runs)));
    }
    create_dir(&dir)?;
    let mut files = vec!["runs.csv".to_string(), "summary.csv".to_string()];
    write_atomic(&dir.join("runs.csv"), runs_csv(&out.records).as_bytes())?;
    write_atomic(&dir.join("summary.csv"), summary_csv(&out.summary).as_bytes())?;
    if cfg.emit_svg {
        write_atomic(&dir.join("boxplot.svg"), boxplot_svg(&out.summary).as_bytes())?;
        files.push("boxplot.svg".into());
    }
    Ok(SimulateReport {
        output_dir: dir.display().to_string(),
        files,
        runs: sim.runs,
        failures: out.failures.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub base_sensitivity: f64,
    pub inflated_sensitivity: f64,
    pub group_privacy_factor: f64,
    /// `e^{nε}`: the guarantee if every record could change.
    pub uniform_worst_case: f64,
}

pub fn bounds(args: &BoundsArgs) -> CliResult<BoundsReport> {
    if !(args.epsilon.is_finite() && args.epsilon > 0.0) {
        return Err(CliError::Invalid(format!("epsilon must be positive, got {}", args.epsilon)));
    }
    if args.n_mis >= args.n {
        return Err(CliError::Invalid(format!("n-mis ({}) must be below n ({})", args.n_mis, args.n)));
    }
    let universe = Universe::new(Interval::new(args.lo, args.hi)?, vec![])?;
    let delta = mean_global_sensitivity(&universe, args.n)?;
    Ok(BoundsReport {
        base_sensitivity: delta,
        inflated_sensitivity: inflated_sensitivity(delta, args.n_mis).inflated_sensitivity,
        group_privacy_factor: group_privacy_factor(args.epsilon, args.n_mis + 1),
        uniform_worst_case: group_privacy_factor(args.epsilon, args.n),
    })
}

fn load_dataset(args: &DataArgs) -> CliResult<Dataset> {
    let response = Interval::new(args.lo, args.hi)?;
    let file = File::open(&args.data).map_err(|e| CliError::Io(format!("{}: {e}", args.data.display())))?;
    let d = read_dataset_csv(BufReader::new(file), |dim| {
        Universe::new(response, vec![Interval::unit(); dim])
    })?;
    if let Err(violations) = d.validate() {
        let shown: Vec<String> = violations.iter().take(5).map(|v| v.to_string()).collect();
        return Err(CliError::Invalid(format!(
            "{}: {} value(s) outside the universe: {}",
            args.data.display(),
            violations.len(),
            shown.join("; ")
        )));
    }
    Ok(d)
}

/// Serialized imputation model. The constant coefficient, if any, is last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub beta: Vec<f64>,
    pub private: bool,
    pub epsilon_spent: f64,
}

impl ModelFile {
    fn into_model(self, d: &Dataset, stochastic: bool) -> CliResult<ImputationModel> {
        let dim = d.dim();
        let intercept = match self.beta.len() {
            l if l == dim => false,
            l if l == dim + 1 => true,
            l => {
                return Err(CliError::Invalid(format!(
                    "model has {l} coefficients, data has {dim} covariates"
                )))
            }
        };
        if stochastic {
            return Err(CliError::Invalid(
                "stochastic imputation needs a residual variance, which a model file does not carry".into(),
            ));
        }
        if self.private != (self.epsilon_spent > 0.0) {
            return Err(CliError::Invalid("model: epsilon_spent must be positive exactly when private".into()));
        }
        let fit = OlsFit {
            beta: self.beta,
            sigma2_hat: 0.0,
            n_used: 0,
            intercept,
            private: self.private,
            epsilon_spent: self.epsilon_spent,
        };
        Ok(ImputationModel::new(fit, false, d.universe().clone())?)
    }
}

#[derive(Debug, Serialize)]
pub struct ImputeReport {
    pub rows: usize,
    pub imputed: usize,
    pub epsilon_spent: f64,
}

pub fn impute_cmd(args: &ImputeArgs) -> CliResult<ImputeReport> {
    let d = load_dataset(&args.data)?;
    if let Some(eps) = args.epsilon {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(CliError::Invalid(format!("epsilon must be positive, got {eps}")));
        }
    }
    let mut rng = RandomSource::new(args.data.seed);
    let needs_fit = d.n_mis() > 0 || args.model_out.is_some();
    let model = match (&args.model, needs_fit) {
        (Some(path), _) => {
            let m: ModelFile = serde_json::from_str(&read_to_string(path)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            Some(m.into_model(&d, args.stochastic)?)
        }
        (None, true) => {
            let privacy = args.epsilon.map_or(Privacy::None, |epsilon| Privacy::Dp { epsilon });
            let options = FitOptions {
                stochastic: args.stochastic,
                intercept: args.data.intercept,
                ..Default::default()
            };
            Some(fit_imputation_model(&d, privacy, &mut rng, options)?)
        }
        (None, false) => None,
    };
    let completed = match &model {
        Some(m) if d.n_mis() > 0 => impute(&d, m, &mut rng)?,
        _ => d.clone(),
    };
    let mut buf = Vec::new();
    write_dataset_csv(&mut buf, &completed)?;
    let fitted_here = args.model.is_none();
    if let (Some(path), Some(m)) = (&args.model_out, &model) {
        let file = ModelFile {
            beta: m.fit.beta.clone(),
            private: m.fit.private,
            epsilon_spent: m.fit.epsilon_spent,
        };
        let json = serde_json::to_string_pretty(&file).expect("model serializes");
        write_atomic(path, format!("{json}\n").as_bytes())?;
    }
    write_atomic(&args.out, &buf)?;
    Ok(ImputeReport {
        rows: d.len(),
        imputed: d.n_mis(),
        epsilon_spent: match &model {
            Some(m) if fitted_here => m.fit.epsilon_spent,
            _ => 0.0,
        },
    })
}

pub fn query(args: &QueryArgs) -> CliResult<QueryResult> {
    let d = load_dataset(&args.data)?;
    let strategy: Strategy = args.strategy.into();
    let mut rng = RandomSource::with_stream(args.data.seed, strategy.stream_tag());
    let options = PipelineOptions {
        fit: FitOptions {
            intercept: args.data.intercept,
            ..Default::default()
        },
    };
    Ok(run_strategy(strategy, &d, args.epsilon, args.split, &mut rng, options)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    format!("{}\n", serde_json::to_string_pretty(value).expect("report serializes"))
}
