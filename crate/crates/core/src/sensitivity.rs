//! Sensitivity of bounded means before and after imputation.
//!
//! For a query `q` with global sensitivity `Δ(q)` on complete data, running `q`
//! on imputed data can move by up to `(n_mis + 1)·Δ(q)` between neighbors,
//! because imputation may rewrite every missing value in addition to the one
//! changed record. The same count gives the group-privacy factor `e^{kε}`.
//! [`brute_force_imputed_sensitivity`] enumerates small universes to check
//! these bounds instance by instance.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Interval, Record, Universe};
use crate::error::{Error, Result};
use crate::imputation::Imputer;

/// Evaluation cap for the enumeration oracle.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub base_sensitivity: f64,
    pub inflated_sensitivity: f64,
    pub n_mis_used: usize,
    /// Set only when an oracle witness attains the inflated bound.
    pub bound_tight: bool,
}

/// `(b − a)/n`: sensitivity of the mean under replace-one neighbors.
pub fn mean_global_sensitivity(universe: &Universe, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("mean sensitivity needs n >= 1".into()));
    }
    Ok(universe.response.width() / n as f64)
}

pub fn inflated_sensitivity(delta: f64, n_mis: usize) -> SensitivityReport {
    SensitivityReport {
        base_sensitivity: delta,
        inflated_sensitivity: (n_mis as f64 + 1.0) * delta,
        n_mis_used: n_mis,
        bound_tight: false,
    }
}

/// `e^{kε}`.
pub fn group_privacy_factor(epsilon: f64, k: usize) -> f64 {
    (k as f64 * epsilon).exp()
}

/// `(a + (n−1)b)/n − a = (n−1)(b−a)/n`, the gap reached by a regression
/// imputer that extrapolates every missing value from `a` to `b`.
pub fn tightness_gap(a: f64, b: f64, n: usize) -> Result<f64> {
    Interval::new(a, b)?;
    if n < 2 {
        return Err(Error::InvalidArgument("tightness gap needs n >= 2".into()));
    }
    let n = n as f64;
    Ok((n - 1.0) * (b - a) / n)
}

/// A query on a completed dataset's response vector.
pub trait Query {
    fn evaluate(&self, responses: &[f64]) -> f64;
    /// Global sensitivity on complete datasets of size `n`.
    fn sensitivity(&self, universe: &Universe, n: usize) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeanQuery;

impl Query for MeanQuery {
    fn evaluate(&self, responses: &[f64]) -> f64 {
        responses.iter().sum::<f64>() / responses.len() as f64
    }

    fn sensitivity(&self, universe: &Universe, n: usize) -> Result<f64> {
        mean_global_sensitivity(universe, n)
    }
}

/// Evaluates a query on a dataset that must be fully observed.
pub fn evaluate_complete(query: &dyn Query, d: &Dataset) -> Result<f64> {
    if d.n_mis() != 0 {
        return Err(Error::InvalidArgument(format!(
            "query needs a complete dataset, {} values missing",
            d.n_mis()
        )));
    }
    Ok(query.evaluate(d.response_buffer()))
}

#[derive(Debug, Clone)]
pub struct OracleSpec {
    /// Values used for both covariates and responses.
    pub grid: Vec<f64>,
    pub n: usize,
    pub universe: Universe,
    /// Whether responses may be missing.
    pub allow_missing: bool,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub max_gap: f64,
    /// Lexicographically first maximizing pair `(D, D')`.
    pub witness: (Dataset, Dataset),
    pub base_sensitivity: f64,
    /// Pairs with `|q(ι(D)) − q(ι(D'))| > (n_mis(D)+1)·Δ(q)` beyond rounding.
    pub violations: usize,
    pub pairs_checked: u64,
    /// Pairs skipped because the imputer rejected one side.
    pub pairs_skipped: u64,
    /// Largest `gap / ((n_mis(D)+1)·Δ)` seen.
    pub max_bound_ratio: f64,
}

impl OracleResult {
    /// Report for the witness, with `bound_tight` set when the witness attains
    /// the inflated bound for its own `n_mis`.
    pub fn witness_report(&self) -> SensitivityReport {
        let n_mis = self.witness.0.n_mis();
        let mut r = inflated_sensitivity(self.base_sensitivity, n_mis);
        r.bound_tight = (self.max_gap - r.inflated_sensitivity).abs() <= 1e-12 * r.inflated_sensitivity.max(1.0);
        r
    }
}

fn record_options(grid: &[f64], d: usize, allow_missing: bool) -> Vec<Record> {
    let mut ys: Vec<Option<f64>> = grid.iter().copied().map(Some).collect();
    if allow_missing {
        ys.push(None);
    }
    let mut xs: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..d {
        xs = xs
            .into_iter()
            .flat_map(|p| {
                grid.iter().map(move |&g| {
                    let mut q = p.clone();
                    q.push(g);
                    q
                })
            })
            .collect();
    }
    xs.into_iter()
        .flat_map(|x| ys.iter().map(move |&y| Record { x: x.clone(), y }))
        .collect()
}

/// Exhaustively enumerates every dataset of `spec.n` records over the grid and
/// every single-record replacement, returning the largest query gap after
/// imputation. Enumeration order is lexicographic in record-option index.
pub fn brute_force_imputed_sensitivity(
    spec: &OracleSpec,
    imputer: &dyn Imputer,
    query: &dyn Query,
) -> Result<OracleResult> {
    if spec.grid.is_empty() || spec.n == 0 {
        return Err(Error::InvalidArgument("oracle needs a nonempty grid and n >= 1".into()));
    }
    if let Some(g) = spec.grid.iter().find(|&&g| !spec.universe.response.contains(g)) {
        return Err(Error::InvalidArgument(format!("grid value {g} outside response bounds")));
    }
    let options = record_options(&spec.grid, spec.universe.dim(), spec.allow_missing);
    let r = options.len() as u128;
    let required = r
        .checked_pow(spec.n as u32)
        .and_then(|c| c.checked_mul(spec.n as u128 * r))
        .unwrap_or(u128::MAX);
    if required > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            required,
            limit: ENUMERATION_LIMIT,
        });
    }
    let delta = query.sensitivity(&spec.universe, spec.n)?;
    let n = spec.n;
    let total = options.len().pow(n as u32);

    // Cache ι(D) and q(ι(D)) for every dataset index.
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut digits = vec![0; n];
        for pos in (0..n).rev() {
            digits[pos] = idx % options.len();
            idx /= options.len();
        }
        digits
    };
    let mut values: Vec<Option<f64>> = Vec::with_capacity(total);
    for idx in 0..total {
        let recs: Vec<Record> = decode(idx).into_iter().map(|k| options[k].clone()).collect();
        let d = Dataset::from_records(&recs, spec.universe.clone())?;
        let v = imputer
            .impute(&d)
            .ok()
            .and_then(|c| evaluate_complete(query, &c).ok());
        values.push(v);
    }

    let build = |idx: usize| -> Result<Dataset> {
        let recs: Vec<Record> = decode(idx).into_iter().map(|k| options[k].clone()).collect();
        Dataset::from_records(&recs, spec.universe.clone())
    };

    let mut best: Option<(f64, usize, usize)> = None;
    let mut violations = 0;
    let mut checked = 0u64;
    let mut skipped = 0u64;
    let mut max_ratio = 0.0f64;
    let stride: Vec<usize> = (0..n).map(|pos| options.len().pow((n - 1 - pos) as u32)).collect();
    for idx in 0..total {
        let digits = decode(idx);
        let n_mis = digits.iter().filter(|&&k| options[k].y.is_none()).count();
        let bound = (n_mis as f64 + 1.0) * delta;
        for pos in 0..n {
            for k in 0..options.len() {
                if k == digits[pos] {
                    continue;
                }
                let nb = idx - digits[pos] * stride[pos] + k * stride[pos];
                let (Some(a), Some(b)) = (values[idx], values[nb]) else {
                    skipped += 1;
                    continue;
                };
                checked += 1;
                let gap = (a - b).abs();
                if gap > bound * (1.0 + 1e-12) + 1e-15 {
                    violations += 1;
                }
                max_ratio = max_ratio.max(gap / bound);
                if best.is_none_or(|(g, _, _)| gap > g) {
                    best = Some((gap, idx, nb));
                }
            }
        }
    }
    let (max_gap, wi, wj) = best.ok_or_else(|| Error::InvalidArgument("no neighbor pair could be imputed".into()))?;
    Ok(OracleResult {
        max_gap,
        witness: (build(wi)?, build(wj)?),
        base_sensitivity: delta,
        violations,
        pairs_checked: checked,
        pairs_skipped: skipped,
        max_bound_ratio: max_ratio,
    })
}

/// The regression-extrapolation witness pair on `n ≥ 3` records with one
/// covariate in `[0, 1]` and response bounds `[a, b]`, `a ≥ 0`.
///
/// Two complete cases sit at `x = 1/2` with response `a`; the remaining `n − 2`
/// records sit at `x = 1` with the response missing. The neighbor changes the
/// second complete response to `b`. A no-intercept regression through the
/// complete cases then predicts `a` (resp. at least `b`) for every missing record.
pub fn tightness_witness(a: f64, b: f64, n: usize) -> Result<(Dataset, Dataset)> {
    let bounds = Interval::new(a, b)?;
    if n < 3 {
        return Err(Error::InvalidArgument("witness needs n >= 3".into()));
    }
    if a < 0.0 {
        return Err(Error::InvalidArgument("witness construction assumes a >= 0".into()));
    }
    let universe = Universe::new(bounds, vec![Interval::unit()])?;
    let mut recs = vec![Record { x: vec![0.5], y: Some(a) }, Record { x: vec![0.5], y: Some(a) }];
    recs.extend((2..n).map(|_| Record { x: vec![1.0], y: None }));
    let d = Dataset::from_records(&recs, universe)?;
    let d_prime = d.with_record(1, &Record { x: vec![0.5], y: Some(b) })?;
    Ok((d, d_prime))
}
