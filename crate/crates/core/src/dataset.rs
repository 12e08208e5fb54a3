use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Metric, Point};

pub type Label = u32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub point: Point,
    pub label: Label,
}

impl LabeledPoint {
    pub fn new(coords: Vec<f64>, label: Label) -> Result<Self> {
        Ok(LabeledPoint {
            point: Point::new(coords)?,
            label,
        })
    }

    pub fn coords(&self) -> &[f64] {
        self.point.coords()
    }
}

/// An immutable labeled sample in a metric space.
///
/// Construction rejects empty samples, mixed dimensions, and pairs of
/// coincident points with different labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    points: Vec<LabeledPoint>,
    metric: Metric,
}

impl Dataset {
    pub fn new(points: Vec<LabeledPoint>, metric: Metric) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let dim = first.point.dim();
        for p in &points {
            if p.point.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.point.dim(),
                });
            }
        }
        check_coincident(&points)?;
        Ok(Dataset { points, metric })
    }

    pub fn euclidean(points: Vec<LabeledPoint>) -> Result<Self> {
        Self::new(points, Metric::Euclidean)
    }

    /// Builds a dataset from raw `(coords, label)` pairs.
    pub fn from_rows<I>(rows: I, metric: Metric) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, Label)>,
    {
        let points = rows
            .into_iter()
            .map(|(c, l)| LabeledPoint::new(c, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, metric)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].point.dim()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &LabeledPoint {
        &self.points[i]
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        self.points[i].coords()
    }

    pub fn label(&self, i: usize) -> Label {
        self.points[i].label
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.points.iter().map(|p| p.label)
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<Label> {
        let mut c: Vec<Label> = self.labels().collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn is_single_class(&self) -> bool {
        let l0 = self.points[0].label;
        self.points.iter().all(|p| p.label == l0)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.metric.dist(self.coords(i), self.coords(j))
    }

    #[inline]
    pub fn dist_to(&self, i: usize, q: &[f64]) -> f64 {
        self.metric.dist(self.coords(i), q)
    }

    /// New dataset made of the given sample indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange { index: i, len: self.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(points, self.metric)
    }

    pub fn into_points(self) -> Vec<LabeledPoint> {
        self.points
    }
}

// Sorting lexicographically puts coincident points next to each other.
fn check_coincident(points: &[LabeledPoint]) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .coords()
            .partial_cmp(points[b].coords())
            .expect("finite coordinates")
            .then(a.cmp(&b))
    });
    for w in order.windows(2) {
        let (a, b) = (&points[w[0]], &points[w[1]]);
        if a.coords() == b.coords() && a.label != b.label {
            let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::InconsistentSample {
                first,
                second,
                first_label: points[first].label,
                second_label: points[second].label,
            });
        }
    }
    Ok(())
}

/// Distance from sample `i` to its closest differently-labeled sample, or
/// `None` when every sample shares its label.
pub fn nearest_enemy_distance(ds: &Dataset, i: usize) -> Option<f64> {
    nearest_enemy(ds, i).map(|(_, d)| d)
}

/// Index and distance of the nearest enemy of `i`; ties go to the lowest index.
pub fn nearest_enemy(ds: &Dataset, i: usize) -> Option<(usize, f64)> {
    let li = ds.label(i);
    let mut best: Option<(usize, f64)> = None;
    for j in 0..ds.len() {
        if ds.label(j) == li {
            continue;
        }
        let d = ds.dist(i, j);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best
}

/// Nearest-enemy distance for every sample, `+inf` where there is no enemy.
pub fn enemy_distances(ds: &Dataset) -> Vec<f64> {
    use rayon::prelude::*;
    (0..ds.len())
        .into_par_iter()
        .map(|i| nearest_enemy_distance(ds, i).unwrap_or(f64::INFINITY))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate::two_lines;

    fn ds(rows: &[(&[f64], Label)]) -> Result<Dataset> {
        Dataset::from_rows(rows.iter().map(|(c, l)| (c.to_vec(), *l)), Metric::Euclidean)
    }

    #[test]
    fn rejects_conflicting_duplicates() {
        let err = ds(&[(&[0.0, 1.0], 0), (&[2.0, 2.0], 0), (&[0.0, 1.0], 1)]).unwrap_err();
        assert!(matches!(
            err,
            Error::InconsistentSample { first: 0, second: 2, .. }
        ));
        // same-label duplicates are allowed
        assert!(ds(&[(&[0.0, 1.0], 0), (&[0.0, 1.0], 0), (&[3.0, 1.0], 1)]).is_ok());
        // signed zero is the same location
        assert!(ds(&[(&[0.0], 0), (&[-0.0], 1)]).is_err());
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(matches!(ds(&[]), Err(Error::EmptyDataset)));
        assert!(matches!(
            ds(&[(&[0.0], 0), (&[0.0, 1.0], 1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nearest_enemy_examples() {
        let d = ds(&[(&[0.0, 0.0], 0), (&[3.0, 4.0], 1)]).unwrap();
        assert_eq!(nearest_enemy_distance(&d, 0), Some(5.0));

        let single = ds(&[(&[0.0], 2), (&[1.0], 2), (&[5.0], 2)]).unwrap();
        assert_eq!(nearest_enemy_distance(&single, 1), None);
        assert!(enemy_distances(&single).iter().all(|d| d.is_infinite()));

        let lines = two_lines(4).unwrap();
        assert!(enemy_distances(&lines).iter().all(|&d| d == 1.0));
    }

    #[test]
    fn nearest_enemy_ties_go_to_lowest_index() {
        let d = ds(&[(&[0.0], 0), (&[1.0], 1), (&[-1.0], 1)]).unwrap();
        assert_eq!(nearest_enemy(&d, 0), Some((1, 1.0)));
    }
}
