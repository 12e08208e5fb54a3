//! Points, base metrics and the weighted distance.
//!
//! The weighted distance between `a` and `b` is `d(a, b) / (w(a) * w(b))`.
//! It is not a metric: the triangle inequality can fail.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if let Some((position, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { position, value });
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Base metric on coordinate vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev];

    /// Distance between two equal-length coordinate slices.
    ///
    /// The accumulation order is fixed, so `dist(a, b)` and `dist(b, a)` are
    /// bit-identical.
    #[inline]
    pub fn dist(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::Manhattan => diffs.sum(),
            Metric::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "manhattan" | "l1" => Ok(Metric::Manhattan),
            "chebyshev" | "linf" => Ok(Metric::Chebyshev),
            other => Err(Error::InvalidParameter(format!("unknown metric `{other}`"))),
        }
    }
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_weight(w: f64) -> Result<()> {
    // +inf is allowed; NaN and non-positive values are not.
    if w > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(w))
    }
}

pub fn distance(a: &Point, b: &Point, metric: Metric) -> Result<f64> {
    check_dims(a.coords(), b.coords())?;
    Ok(metric.dist(a.coords(), b.coords()))
}

/// `d(a, b) / (wa * wb)`. An infinite weight yields 0.
pub fn weighted_distance(a: &Point, b: &Point, wa: f64, wb: f64, metric: Metric) -> Result<f64> {
    check_weight(wa)?;
    check_weight(wb)?;
    let d = distance(a, b, metric)?;
    if wa.is_infinite() || wb.is_infinite() {
        return Ok(0.0);
    }
    Ok(d / (wa * wb))
}

/// Decision boundary between two weighted points in the Euclidean plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Boundary {
    /// Points `x` with `normal . x = offset`.
    Line { normal: [f64; 2], offset: f64 },
    Circle(Circle),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Locus of points equidistant from `p1` and `p2` under the weighted
/// Euclidean distance: the perpendicular bisector for equal weights, an
/// Apollonius circle otherwise.
pub fn decision_boundary(p1: &Point, w1: f64, p2: &Point, w2: f64) -> Result<Boundary> {
    if p1.dim() != 2 || p2.dim() != 2 {
        return Err(Error::NotPlanar);
    }
    check_weight(w1)?;
    check_weight(w2)?;
    if !w1.is_finite() || !w2.is_finite() {
        return Err(Error::InvalidParameter(
            "decision boundary needs finite weights".into(),
        ));
    }
    let (a, b) = (p1.coords(), p2.coords());
    if a == b {
        return Err(Error::CoincidentPoints);
    }
    if w1 == w2 {
        let normal = [b[0] - a[0], b[1] - a[1]];
        let offset = 0.5 * ((b[0] * b[0] + b[1] * b[1]) - (a[0] * a[0] + a[1] * a[1]));
        return Ok(Boundary::Line { normal, offset });
    }
    let (s1, s2) = (w1 * w1, w2 * w2);
    let denom = s2 - s1;
    let center = [
        (s2 * a[0] - s1 * b[0]) / denom,
        (s2 * a[1] - s1 * b[1]) / denom,
    ];
    let radius = w1 * w2 * Metric::Euclidean.dist(a, b) / denom.abs();
    Ok(Boundary::Circle(Circle { center, radius }))
}
