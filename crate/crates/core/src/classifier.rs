//! The weighted nearest-neighbor decision rule.
//!
//! A query always carries weight 1, so the rule only divides by the
//! prototype's weight: `h(q) = label(argmin_p d(q, p) / w(p))`.
//! Ties go to the prototype listed first.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{Dataset, Label, LabeledPoint};
use crate::error::{Error, Result};
use crate::metric::{check_weight, Metric};

/// Sample indices with one positive weight each.
///
/// Indices not in the set implicitly weigh 1. The order of `indices` is
/// significant: it decides ties in [`WnnClassifier::classify`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CondensedSet {
    indices: Vec<usize>,
    weights: Vec<f64>,
}

impl CondensedSet {
    pub fn new(ds: &Dataset, indices: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyCondensedSet);
        }
        if indices.len() != weights.len() {
            return Err(Error::WeightCountMismatch {
                indices: indices.len(),
                weights: weights.len(),
            });
        }
        let mut seen = vec![false; ds.len()];
        for &i in &indices {
            if i >= ds.len() {
                return Err(Error::IndexOutOfRange { index: i, len: ds.len() });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        for &w in &weights {
            check_weight(w)?;
        }
        Ok(CondensedSet { indices, weights })
    }

    /// All weights equal to 1 (the plain nearest-neighbor rule).
    pub fn unweighted(ds: &Dataset, indices: Vec<usize>) -> Result<Self> {
        let weights = vec![1.0; indices.len()];
        Self::new(ds, indices, weights)
    }

    /// The whole sample with unit weights.
    pub fn full(ds: &Dataset) -> Self {
        CondensedSet {
            indices: (0..ds.len()).collect(),
            weights: vec![1.0; ds.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.weights.iter().copied())
    }

    /// Weight of sample `i`; 1 for samples outside the set.
    pub fn weight_of(&self, i: usize) -> f64 {
        self.indices
            .iter()
            .position(|&j| j == i)
            .map_or(1.0, |k| self.weights[k])
    }

    /// Same set with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_weight(factor)?;
        Ok(CondensedSet {
            indices: self.indices.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        })
    }
}

/// A self-contained WNN classifier: prototype points with their weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WnnClassifier {
    metric: Metric,
    prototypes: Vec<LabeledPoint>,
    weights: Vec<f64>,
}

impl WnnClassifier {
    pub fn new(metric: Metric, prototypes: Vec<LabeledPoint>, weights: Vec<f64>) -> Result<Self> {
        if prototypes.is_empty() {
            return Err(Error::EmptyCondensedSet);
        }
        if prototypes.len() != weights.len() {
            return Err(Error::WeightCountMismatch {
                indices: prototypes.len(),
                weights: weights.len(),
            });
        }
        let dim = prototypes[0].point.dim();
        if let Some(p) = prototypes.iter().find(|p| p.point.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: p.point.dim(),
            });
        }
        for &w in &weights {
            check_weight(w)?;
        }
        Ok(WnnClassifier {
            metric,
            prototypes,
            weights,
        })
    }

    pub fn from_condensed(ds: &Dataset, set: &CondensedSet) -> Self {
        WnnClassifier {
            metric: ds.metric(),
            prototypes: set.indices.iter().map(|&i| ds.point(i).clone()).collect(),
            weights: set.weights.clone(),
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn prototypes(&self) -> &[LabeledPoint] {
        &self.prototypes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.prototypes[0].point.dim()
    }

    /// Position of the winning prototype and its weighted distance to `q`.
    pub fn nearest(&self, q: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (k, (p, &w)) in self.prototypes.iter().zip(&self.weights).enumerate() {
            let wd = self.metric.dist(q, p.coords()) / w;
            if wd < best.1 || k == 0 {
                best = (k, wd);
            }
        }
        best
    }

    pub fn classify(&self, q: &[f64]) -> Label {
        self.prototypes[self.nearest(q).0].label
    }

    pub fn try_classify(&self, q: &[f64]) -> Result<Label> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: q.len(),
            });
        }
        Ok(self.classify(q))
    }

    /// Fraction of `ds` points whose label disagrees with the classifier.
    pub fn error_rate(&self, ds: &Dataset) -> f64 {
        let wrong = (0..ds.len())
            .into_par_iter()
            .filter(|&i| self.classify(ds.coords(i)) != ds.label(i))
            .count();
        wrong as f64 / ds.len() as f64
    }
}

pub fn classify(ds: &Dataset, set: &CondensedSet, q: &[f64]) -> Result<Label> {
    WnnClassifier::from_condensed(ds, set).try_classify(q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub consistent: bool,
    /// `(sample index, predicted label)` for every misclassified sample.
    pub violations: Vec<(usize, Label)>,
}

/// Classifies every sample point with the condensed set.
pub fn consistency_check(ds: &Dataset, set: &CondensedSet) -> ConsistencyReport {
    let clf = WnnClassifier::from_condensed(ds, set);
    let violations: Vec<(usize, Label)> = (0..ds.len())
        .into_par_iter()
        .filter_map(|i| {
            let predicted = clf.classify(ds.coords(i));
            (predicted != ds.label(i)).then_some((i, predicted))
        })
        .collect();
    ConsistencyReport {
        consistent: violations.is_empty(),
        violations,
    }
}

/// Compression-based bound on the error of a sample-consistent classifier
/// built from `m` of `n` samples, holding with probability `1 - delta`.
///
/// With an ordered reconstruction the bound is
/// `2/(n-m) * (m ln(2n) + ln(n/delta))`; with a permutation-invariant one,
/// `2/(n-m) * (m ln(2en/m) + ln(n/delta))`.
pub fn generalization_bound(n: usize, m: usize, delta: f64, permutation_invariant: bool) -> Result<f64> {
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "bound needs 1 <= m < n, got m={m}, n={n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must be in (0,1), got {delta}")));
    }
    let (nf, mf) = (n as f64, m as f64);
    let per_point = if permutation_invariant {
        (2.0 * std::f64::consts::E * nf / mf).ln()
    } else {
        (2.0 * nf).ln()
    };
    Ok(2.0 / (nf - mf) * (mf * per_point + (nf / delta).ln()))
}
