//! Regression imputation of the partially observed response.
//!
//! The model is fitted on complete cases only, which is valid when the
//! missingness is ignorable. Each missing response is then predicted from its
//! own record's covariates and clipped into the response bounds, so the
//! completed dataset stays inside the universe and observed values are never
//! touched.

use nalgebra::DMatrix;

use crate::data::{hamming_distance, Dataset, Universe};
use crate::error::{Error, Result};
use crate::mechanisms::{
    functional_mechanism_ols, ols_fit, FunctionalMechanismConfig, OlsFit, DEFAULT_COEFFICIENT_BOUND,
};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Privacy {
    None,
    Dp { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Add `N(0, σ̂²)` noise to predictions. Only allowed for non-private fits.
    pub stochastic: bool,
    pub intercept: bool,
    pub coefficient_bound: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            stochastic: false,
            intercept: false,
            coefficient_bound: DEFAULT_COEFFICIENT_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImputationModel {
    pub fit: OlsFit,
    pub stochastic: bool,
    pub universe: Universe,
}

impl ImputationModel {
    pub fn new(fit: OlsFit, stochastic: bool, universe: Universe) -> Result<Self> {
        if stochastic && !fit.sigma2_usable() {
            return Err(Error::InvalidArgument(
                "stochastic imputation needs a usable residual variance; private fits have none".into(),
            ));
        }
        if fit.dim() != universe.dim() {
            return Err(Error::InvalidArgument(format!(
                "model has {} covariates, universe has {}",
                fit.dim(),
                universe.dim()
            )));
        }
        Ok(Self {
            fit,
            stochastic,
            universe,
        })
    }

    /// Clipped point prediction for one record's covariates.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.universe.response.clamp(self.fit.predict(x))
    }
}

/// Covariates and responses of the complete cases.
pub fn complete_cases(d: &Dataset) -> (DMatrix<f64>, Vec<f64>) {
    let rows: Vec<usize> = (0..d.len()).filter(|&i| !d.is_missing(i)).collect();
    let x = DMatrix::from_fn(rows.len(), d.dim(), |r, c| d.row(rows[r])[c]);
    let y = rows.iter().map(|&i| d.response(i).expect("complete case")).collect();
    (x, y)
}

pub fn fit_imputation_model(
    d: &Dataset,
    privacy: Privacy,
    rng: &mut RandomSource,
    options: FitOptions,
) -> Result<ImputationModel> {
    let p = d.dim() + usize::from(options.intercept);
    let available = d.n_obs();
    if available < p + 1 {
        return Err(Error::TooFewCompleteCases {
            needed: p + 1,
            available,
        });
    }
    let (x, y) = complete_cases(d);
    let fit = match privacy {
        Privacy::None => ols_fit(&x, &y, options.intercept)?,
        Privacy::Dp { epsilon } => {
            if options.stochastic {
                return Err(Error::InvalidArgument(
                    "stochastic imputation is not available with a private fit".into(),
                ));
            }
            let cfg = FunctionalMechanismConfig {
                intercept: options.intercept,
                coefficient_bound: options.coefficient_bound,
            };
            functional_mechanism_ols(&x, &y, d.universe().response, epsilon, rng, cfg)?
        }
    };
    ImputationModel::new(fit, options.stochastic, d.universe().clone())
}

/// Completes every missing response. In stochastic mode record `i` draws its
/// noise from sub-stream `i` of a seed taken from `rng`, so the result does not
/// depend on processing order.
pub fn impute(d: &Dataset, model: &ImputationModel, rng: &mut RandomSource) -> Result<Dataset> {
    if model.fit.dim() != d.dim() {
        return Err(Error::Incomparable(format!(
            "model has {} covariates, dataset has {}",
            model.fit.dim(),
            d.dim()
        )));
    }
    let base = model.stochastic.then(|| rng.next_u64());
    let sd = model.fit.sigma2_hat.sqrt();
    let bounds = d.universe().response;
    let fills: Vec<(usize, f64)> = (0..d.len())
        .filter(|&i| d.is_missing(i))
        .map(|i| {
            let mut v = model.fit.predict(d.row(i));
            if let Some(seed) = base {
                v += sd * RandomSource::with_stream(seed, i as u64).standard_normal();
            }
            (i, bounds.clamp(v))
        })
        .collect();
    let out = d.with_filled(&fills);
    debug_assert!(out.validate().is_ok() || d.validate().is_err());
    Ok(out)
}

/// A complete imputation rule `D ↦ ι(D)`.
pub trait Imputer {
    fn impute(&self, d: &Dataset) -> Result<Dataset>;
}

/// Applies one fitted model to every dataset.
#[derive(Debug, Clone)]
pub struct SharedModelImputer {
    pub model: ImputationModel,
    pub seed: u64,
}

impl Imputer for SharedModelImputer {
    fn impute(&self, d: &Dataset) -> Result<Dataset> {
        impute(d, &self.model, &mut RandomSource::new(self.seed))
    }
}

/// Fills every missing response with the mean of the observed ones, or the
/// midpoint of the response bounds when nothing is observed.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanImputer;

impl Imputer for MeanImputer {
    fn impute(&self, d: &Dataset) -> Result<Dataset> {
        let n_obs = d.n_obs();
        let fill = if n_obs == 0 {
            let b = d.universe().response;
            0.5 * (b.lo + b.hi)
        } else {
            d.observed_responses().sum::<f64>() / n_obs as f64
        };
        let fills: Vec<(usize, f64)> = (0..d.len()).filter(|&i| d.is_missing(i)).map(|i| (i, fill)).collect();
        Ok(d.with_filled(&fills))
    }
}

/// Refits a deterministic, non-private regression model on each dataset.
#[derive(Debug, Clone, Copy, Default)]
pub struct RegressionImputer {
    pub intercept: bool,
}

impl Imputer for RegressionImputer {
    fn impute(&self, d: &Dataset) -> Result<Dataset> {
        if d.n_mis() == 0 {
            return Ok(d.clone());
        }
        let opts = FitOptions {
            intercept: self.intercept,
            ..Default::default()
        };
        let mut rng = RandomSource::new(0);
        let model = fit_imputation_model(d, Privacy::None, &mut rng, opts)?;
        impute(d, &model, &mut rng)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContractViolation {
    NotNeighbors { distance: usize },
    ImputerFailed(String),
    /// Output still has missing values or leaves the universe.
    OutsideUniverse { which: Side, detail: String },
    /// An observed value was changed.
    ObservedChanged { which: Side, row: usize },
    HammingBound { distance: usize, bound: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Original,
    Neighbor,
}

fn check_one(input: &Dataset, output: &Dataset, which: Side, out: &mut Vec<ContractViolation>) {
    if output.len() != input.len() || output.dim() != input.dim() {
        out.push(ContractViolation::OutsideUniverse {
            which,
            detail: "shape changed".into(),
        });
        return;
    }
    if output.n_mis() != 0 {
        out.push(ContractViolation::OutsideUniverse {
            which,
            detail: format!("{} values still missing", output.n_mis()),
        });
    }
    if let Err(v) = output.validate() {
        out.push(ContractViolation::OutsideUniverse {
            which,
            detail: v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        });
    }
    for i in 0..input.len() {
        let same_x = input
            .row(i)
            .iter()
            .zip(output.row(i))
            .all(|(a, b)| a.to_bits() == b.to_bits());
        let same_y = match input.response(i) {
            Some(y) => output.response(i).map(f64::to_bits) == Some(y.to_bits()),
            None => true,
        };
        if !(same_x && same_y) {
            out.push(ContractViolation::ObservedChanged { which, row: i });
        }
    }
}

/// Checks both imputation-scheme assumptions on a neighbor pair and the
/// resulting Hamming bound `d(ι(D), ι(D')) ≤ n_mis(D) + 1`.
pub fn check_imputer_contract(
    imputer: &dyn Imputer,
    d: &Dataset,
    d_neighbor: &Dataset,
) -> std::result::Result<(), Vec<ContractViolation>> {
    let mut violations = Vec::new();
    match hamming_distance(d, d_neighbor) {
        Ok(1) => {}
        Ok(distance) => violations.push(ContractViolation::NotNeighbors { distance }),
        Err(e) => return Err(vec![ContractViolation::ImputerFailed(e.to_string())]),
    }
    let (a, b) = match (imputer.impute(d), imputer.impute(d_neighbor)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            violations.push(ContractViolation::ImputerFailed(e.to_string()));
            return Err(violations);
        }
    };
    check_one(d, &a, Side::Original, &mut violations);
    check_one(d_neighbor, &b, Side::Neighbor, &mut violations);
    if let Ok(distance) = hamming_distance(&a, &b) {
        let bound = d.n_mis() + 1;
        if distance > bound {
            violations.push(ContractViolation::HammingBound { distance, bound });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Record;
    use proptest::prelude::*;

    fn model(beta: Vec<f64>) -> ImputationModel {
        let fit = OlsFit {
            beta,
            sigma2_hat: 0.0,
            n_used: 10,
            intercept: false,
            private: false,
            epsilon_spent: 0.0,
        };
        ImputationModel::new(fit, false, Universe::unit(2)).unwrap()
    }

    fn ds(rows: &[([f64; 2], Option<f64>)]) -> Dataset {
        let recs: Vec<Record> = rows.iter().map(|(x, y)| Record { x: x.to_vec(), y: *y }).collect();
        Dataset::from_records(&recs, Universe::unit(2)).unwrap()
    }

    #[test]
    fn complete_data_is_unchanged() {
        let d = ds(&[([0.1, 0.2], Some(0.3)), ([0.4, 0.5], Some(0.6))]);
        let out = impute(&d, &model(vec![0.5, 0.5]), &mut RandomSource::new(1)).unwrap();
        assert_eq!(hamming_distance(&d, &out).unwrap(), 0);
    }

    #[test]
    fn direct_prediction() {
        let d = ds(&[([1.0, 1.0], None), ([0.2, 0.2], Some(0.1))]);
        let out = impute(&d, &model(vec![0.5, 0.5]), &mut RandomSource::new(1)).unwrap();
        assert_eq!(out.response(0), Some(1.0));
        assert_eq!(out.response(1), Some(0.1));
        assert_eq!(out.n_mis(), 0);
    }

    #[test]
    fn prediction_is_clipped() {
        let d = ds(&[([1.0, 1.0], None)]);
        let out = impute(&d, &model(vec![10.0, 10.0]), &mut RandomSource::new(1)).unwrap();
        assert_eq!(out.response(0), Some(1.0));
        let out = impute(&d, &model(vec![-10.0, -10.0]), &mut RandomSource::new(1)).unwrap();
        assert_eq!(out.response(0), Some(0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let d = Dataset::from_records(&[Record { x: vec![0.5], y: None }], Universe::unit(1)).unwrap();
        assert!(impute(&d, &model(vec![0.5, 0.5]), &mut RandomSource::new(1)).is_err());
    }

    #[test]
    fn all_missing_cannot_fit() {
        let d = ds(&[([0.1, 0.2], None), ([0.4, 0.5], None), ([0.3, 0.3], None)]);
        let err = fit_imputation_model(&d, Privacy::None, &mut RandomSource::new(1), FitOptions::default());
        assert!(matches!(err, Err(Error::TooFewCompleteCases { available: 0, .. })));
    }

    #[test]
    fn stochastic_requires_non_private_fit() {
        let d = ds(&[([0.1, 0.2], Some(0.1)), ([0.4, 0.5], Some(0.5)), ([0.9, 0.3], Some(0.6)), ([0.3, 0.3], None)]);
        let opts = FitOptions { stochastic: true, ..Default::default() };
        let mut rng = RandomSource::new(1);
        assert!(fit_imputation_model(&d, Privacy::Dp { epsilon: 1.0 }, &mut rng, opts).is_err());
        assert!(fit_imputation_model(&d, Privacy::None, &mut rng, opts).is_ok());
    }

    #[test]
    fn stochastic_output_is_order_independent_and_in_bounds() {
        let mut rng = RandomSource::new(4);
        let rows: Vec<([f64; 2], Option<f64>)> = (0..200)
            .map(|i| {
                let x = [rng.uniform(), rng.uniform()];
                let y = (0.5 * x[0] + 0.5 * x[1] + 0.3 * rng.standard_normal()).clamp(0.0, 1.0);
                (x, if i % 3 == 0 { None } else { Some(y) })
            })
            .collect();
        let d = ds(&rows);
        let opts = FitOptions { stochastic: true, ..Default::default() };
        let m = fit_imputation_model(&d, Privacy::None, &mut rng, opts).unwrap();
        assert!(m.fit.sigma2_hat > 0.0);
        let a = impute(&d, &m, &mut RandomSource::new(8)).unwrap();
        let b = impute(&d, &m, &mut RandomSource::new(8)).unwrap();
        assert_eq!(hamming_distance(&a, &b).unwrap(), 0);
        assert!(a.validate().is_ok());
        // Record 0's draw depends only on its own sub-stream.
        let single = d.with_mask((0..200).map(|i| i == 0).collect()).unwrap();
        let c = impute(&single, &m, &mut RandomSource::new(8)).unwrap();
        assert_eq!(c.response(0), a.response(0));
    }

    #[test]
    fn broken_imputer_is_caught() {
        struct Tamper;
        impl Imputer for Tamper {
            fn impute(&self, d: &Dataset) -> Result<Dataset> {
                let out = MeanImputer.impute(d)?;
                Ok(out.with_filled(&[(0, 0.0)]))
            }
        }
        let d = ds(&[([0.1, 0.2], Some(0.7)), ([0.4, 0.5], None), ([0.3, 0.3], Some(0.4))]);
        let nb = d.with_record(2, &Record { x: vec![0.3, 0.3], y: Some(0.9) }).unwrap();
        let v = check_imputer_contract(&Tamper, &d, &nb).unwrap_err();
        assert!(v.iter().any(|v| matches!(v, ContractViolation::ObservedChanged { row: 0, .. })));
        assert!(check_imputer_contract(&MeanImputer, &d, &nb).is_ok());
    }

    #[test]
    fn complete_pair_distance_at_most_one() {
        let d = ds(&[([0.1, 0.2], Some(0.7)), ([0.4, 0.5], Some(0.2))]);
        let nb = d.with_record(0, &Record { x: vec![0.9, 0.9], y: Some(0.1) }).unwrap();
        assert!(check_imputer_contract(&MeanImputer, &d, &nb).is_ok());
        assert!(check_imputer_contract(&RegressionImputer::default(), &d, &nb).is_ok());
    }

    fn arb_rows(n: usize) -> impl Strategy<Value = Vec<([f64; 2], Option<f64>)>> {
        prop::collection::vec(
            ((0.0..=1.0f64, 0.0..=1.0f64), prop::option::weighted(0.6, 0.0..=1.0f64)),
            n,
        )
        .prop_map(|v| v.into_iter().map(|((a, b), y)| ([a, b], y)).collect())
    }

    proptest! {
        #[test]
        fn refit_imputers_respect_contract(
            rows in arb_rows(8),
            idx in 0usize..8,
            x in (0.0..=1.0f64, 0.0..=1.0f64),
            y in prop::option::of(0.0..=1.0f64),
        ) {
            let d = ds(&rows);
            let nb = d.with_record(idx, &Record { x: vec![x.0, x.1], y }).unwrap();
            prop_assume!(hamming_distance(&d, &nb).unwrap() == 1);
            prop_assert!(check_imputer_contract(&MeanImputer, &d, &nb).is_ok());
            let shared = SharedModelImputer { model: model(vec![0.4, 0.7]), seed: 0 };
            prop_assert!(check_imputer_contract(&shared, &d, &nb).is_ok());
            match check_imputer_contract(&RegressionImputer::default(), &d, &nb) {
                Ok(()) => {}
                Err(v) => prop_assert!(v.iter().all(|v| matches!(v, ContractViolation::ImputerFailed(_))), "{:?}", v),
            }
        }

        #[test]
        fn impute_is_idempotent_and_local(rows in arb_rows(10), j in 0usize..10, x in (0.0..=1.0f64, 0.0..=1.0f64)) {
            let d = ds(&rows);
            let m = model(vec![0.6, 0.3]);
            let once = impute(&d, &m, &mut RandomSource::new(0)).unwrap();
            let twice = impute(&once, &m, &mut RandomSource::new(0)).unwrap();
            prop_assert_eq!(hamming_distance(&once, &twice).unwrap(), 0);
            let moved = d.with_record(j, &Record { x: vec![x.0, x.1], y: d.response(j) }).unwrap();
            let other = impute(&moved, &m, &mut RandomSource::new(0)).unwrap();
            for i in (0..10).filter(|&i| i != j) {
                prop_assert_eq!(once.response(i), other.response(i));
            }
        }
    }
}
