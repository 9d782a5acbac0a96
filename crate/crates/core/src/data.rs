//! Dataset, universe, and neighbor primitives.
//!
//! A dataset holds `n` records of `d` fully observed covariates and one
//! response that may be missing. The mask is authoritative: the stored value
//! under a masked response is unspecified and never read.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed real interval `[lo, hi]` with `lo < hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "interval bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "interval requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

/// Per-column value domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Universe {
    pub response: Interval,
    pub covariates: Vec<Interval>,
}

impl Universe {
    pub fn new(response: Interval, covariates: Vec<Interval>) -> Result<Self> {
        for iv in std::iter::once(&response).chain(covariates.iter()) {
            Interval::new(iv.lo, iv.hi)?;
        }
        Ok(Self {
            response,
            covariates,
        })
    }

    /// `[0,1]` response and `d` covariates in `[0,1]`.
    pub fn unit(d: usize) -> Self {
        Self {
            response: Interval::unit(),
            covariates: vec![Interval::unit(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.covariates.len()
    }
}

/// A single row: covariates plus an optional response (`None` = missing).
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub x: Vec<f64>,
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    CovariateOutOfBounds { row: usize, col: usize },
    ResponseOutOfBounds { row: usize },
    NonFinite { row: usize, col: Option<usize> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::CovariateOutOfBounds { row, col } => {
                write!(f, "row {row}: covariate x{} out of bounds", col + 1)
            }
            Violation::ResponseOutOfBounds { row } => write!(f, "row {row}: response out of bounds"),
            Violation::NonFinite { row, col: Some(c) } => {
                write!(f, "row {row}: covariate x{} is not finite", c + 1)
            }
            Violation::NonFinite { row, col: None } => write!(f, "row {row}: response is not finite"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    covariates: Vec<f64>,
    response: Vec<f64>,
    mask: Vec<bool>,
    universe: Universe,
}

impl Dataset {
    /// Builds a dataset from row-major covariates. Only shapes are checked here;
    /// call [`Dataset::validate`] for the bound invariants.
    pub fn new(
        covariates: Vec<f64>,
        response: Vec<f64>,
        mask: Vec<bool>,
        universe: Universe,
    ) -> Result<Self> {
        let n = response.len();
        let d = universe.dim();
        if mask.len() != n {
            return Err(Error::InvalidArgument(format!(
                "mask length {} does not match response length {n}",
                mask.len()
            )));
        }
        if covariates.len() != n * d {
            return Err(Error::InvalidArgument(format!(
                "covariate buffer has {} values, expected {n} x {d}",
                covariates.len()
            )));
        }
        let response = response
            .into_iter()
            .zip(&mask)
            .map(|(y, &m)| if m { f64::NAN } else { y })
            .collect();
        Ok(Self {
            covariates,
            response,
            mask,
            universe,
        })
    }

    pub fn from_records(records: &[Record], universe: Universe) -> Result<Self> {
        let d = universe.dim();
        let mut x = Vec::with_capacity(records.len() * d);
        let mut y = Vec::with_capacity(records.len());
        let mut mask = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.x.len() != d {
                return Err(Error::InvalidArgument(format!(
                    "record {i} has {} covariates, universe has {d}",
                    r.x.len()
                )));
            }
            x.extend_from_slice(&r.x);
            y.push(r.y.unwrap_or(f64::NAN));
            mask.push(r.y.is_none());
        }
        Self::new(x, y, mask, universe)
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.universe.dim()
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn covariates(&self) -> &[f64] {
        &self.covariates
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.covariates[i * d..(i + 1) * d]
    }

    pub fn is_missing(&self, i: usize) -> bool {
        self.mask[i]
    }

    /// Response of record `i`, or `None` when masked.
    pub fn response(&self, i: usize) -> Option<f64> {
        (!self.mask[i]).then(|| self.response[i])
    }

    pub fn record(&self, i: usize) -> Record {
        Record {
            x: self.row(i).to_vec(),
            y: self.response(i),
        }
    }

    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        (0..self.len()).map(|i| self.record(i))
    }

    /// Observed responses in record order.
    pub fn observed_responses(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).filter_map(|i| self.response(i))
    }

    /// Raw response buffer. Only meaningful for fully observed datasets.
    pub(crate) fn response_buffer(&self) -> &[f64] {
        &self.response
    }

    /// Returns a copy with record `i` replaced.
    pub fn with_record(&self, i: usize, record: &Record) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "record index {i} out of range for n = {}",
                self.len()
            )));
        }
        let d = self.dim();
        if record.x.len() != d {
            return Err(Error::InvalidArgument(format!(
                "replacement record has {} covariates, expected {d}",
                record.x.len()
            )));
        }
        let mut out = self.clone();
        out.covariates[i * d..(i + 1) * d].copy_from_slice(&record.x);
        out.response[i] = record.y.unwrap_or(f64::NAN);
        out.mask[i] = record.y.is_none();
        Ok(out)
    }

    /// Returns a copy with the given responses filled in and the mask cleared
    /// at those positions.
    pub(crate) fn with_filled(&self, fills: &[(usize, f64)]) -> Self {
        let mut out = self.clone();
        for &(i, v) in fills {
            out.response[i] = v;
            out.mask[i] = false;
        }
        out
    }

    /// Returns a copy with the given records masked.
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "mask length {} does not match n = {}",
                mask.len(),
                self.len()
            )));
        }
        let mut out = self.clone();
        for (i, &m) in mask.iter().enumerate() {
            if m {
                out.response[i] = f64::NAN;
            }
        }
        out.mask = mask;
        Ok(out)
    }

    /// Checks every bound invariant. Masked responses are skipped.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        let d = self.dim();
        for i in 0..self.len() {
            for (j, iv) in self.universe.covariates.iter().enumerate() {
                let v = self.covariates[i * d + j];
                if !v.is_finite() {
                    violations.push(Violation::NonFinite { row: i, col: Some(j) });
                } else if !iv.contains(v) {
                    violations.push(Violation::CovariateOutOfBounds { row: i, col: j });
                }
            }
            if let Some(y) = self.response(i) {
                if !y.is_finite() {
                    violations.push(Violation::NonFinite { row: i, col: None });
                } else if !self.universe.response.contains(y) {
                    violations.push(Violation::ResponseOutOfBounds { row: i });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Number of records whose response is missing.
    pub fn n_mis(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn n_obs(&self) -> usize {
        self.len() - self.n_mis()
    }

    fn same_record(&self, other: &Dataset, i: usize) -> bool {
        self.row(i) == other.row(i) && self.response(i) == other.response(i)
    }
}

/// Number of record positions at which the two datasets differ. A record
/// differs if any covariate, its observed response, or its mask bit differs.
pub fn hamming_distance(a: &Dataset, b: &Dataset) -> Result<usize> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::Incomparable(format!(
            "shapes {}x{} and {}x{}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    Ok((0..a.len()).filter(|&i| !a.same_record(b, i)).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(rows: &[(f64, Option<f64>)]) -> Dataset {
        let recs: Vec<Record> = rows.iter().map(|&(x, y)| Record { x: vec![x], y }).collect();
        Dataset::from_records(&recs, Universe::unit(1)).unwrap()
    }

    #[test]
    fn n_mis_counts_mask() {
        assert_eq!(ds(&[(0.1, Some(0.2)), (0.3, Some(0.4))]).n_mis(), 0);
        assert_eq!(ds(&[(0.1, None), (0.3, Some(0.4)), (0.5, None)]).n_mis(), 2);
    }

    #[test]
    fn hamming_basic() {
        let a = ds(&[(0.1, Some(0.2)), (0.3, Some(0.4)), (0.5, None)]);
        assert_eq!(hamming_distance(&a, &a).unwrap(), 0);
        let b = a.with_record(1, &Record { x: vec![0.3], y: Some(0.9) }).unwrap();
        assert_eq!(hamming_distance(&a, &b).unwrap(), 1);
        let c = a.with_record(1, &Record { x: vec![0.3], y: None }).unwrap();
        assert_eq!(hamming_distance(&a, &c).unwrap(), 1);
    }

    #[test]
    fn hamming_rejects_shape_mismatch() {
        let a = ds(&[(0.1, Some(0.2))]);
        let b = ds(&[(0.1, Some(0.2)), (0.1, Some(0.2))]);
        assert!(matches!(hamming_distance(&a, &b), Err(Error::Incomparable(_))));
    }

    #[test]
    fn validate_flags_out_of_bounds_response() {
        let d = ds(&[(0.1, Some(0.2)), (0.3, Some(1.5))]);
        let v = d.validate().unwrap_err();
        assert_eq!(v, vec![Violation::ResponseOutOfBounds { row: 1 }]);
        assert!(ds(&[(0.0, Some(1.0)), (1.0, Some(0.0))]).validate().is_ok());
    }

    #[test]
    fn validate_ignores_masked_sentinel() {
        // Overwrite the masked slot with an in-bounds number and with garbage.
        for sentinel in [0.5, 99.0, f64::NAN] {
            let d = Dataset::new(vec![0.2, 0.4], vec![0.3, sentinel], vec![false, true], Universe::unit(1))
                .unwrap();
            assert!(d.validate().is_ok());
            assert_eq!(d.response(1), None);
        }
    }

    #[test]
    fn validate_flags_covariates_with_indices() {
        let d = Dataset::new(vec![0.2, -0.1, 0.4, 2.0], vec![0.3, 0.3], vec![false, false], Universe::unit(2))
            .unwrap();
        assert_eq!(
            d.validate().unwrap_err(),
            vec![
                Violation::CovariateOutOfBounds { row: 0, col: 1 },
                Violation::CovariateOutOfBounds { row: 1, col: 1 }
            ]
        );
    }

    #[test]
    fn interval_rejects_bad_bounds() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(2.0, 5.0).is_ok());
    }

    fn arb_record() -> impl Strategy<Value = Record> {
        (0u8..3, prop::option::of(0u8..3)).prop_map(|(x, y)| Record {
            x: vec![f64::from(x) / 2.0],
            y: y.map(|v| f64::from(v) / 2.0),
        })
    }

    fn arb_dataset(n: usize) -> impl Strategy<Value = Dataset> {
        prop::collection::vec(arb_record(), n)
            .prop_map(|recs| Dataset::from_records(&recs, Universe::unit(1)).unwrap())
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(a in arb_dataset(6), b in arb_dataset(6), c in arb_dataset(6)) {
            let ab = hamming_distance(&a, &b).unwrap();
            let ba = hamming_distance(&b, &a).unwrap();
            let bc = hamming_distance(&b, &c).unwrap();
            let ac = hamming_distance(&a, &c).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ac <= ab + bc);
            let equal = a.records().zip(b.records()).all(|(r, s)| r == s);
            prop_assert_eq!(ab == 0, equal);
        }

        #[test]
        fn n_mis_permutation_invariant(a in arb_dataset(8), perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
            let recs: Vec<Record> = perm.iter().map(|&i| a.record(i)).collect();
            let b = Dataset::from_records(&recs, Universe::unit(1)).unwrap();
            prop_assert_eq!(a.n_mis(), b.n_mis());
        }
    }
}
