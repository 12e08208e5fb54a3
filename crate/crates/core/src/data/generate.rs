//! Synthetic datasets.
//!
//! `two_lines` and `bc_friendly` are the extremal constructions separating
//! the plain and weighted rules; `circle`, `blobs` and `sine` are random
//! families for benchmarks. Label 0 is "red"/inner, label 1 "blue"/outer.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::metric::Metric;

/// Red points `(i, 1/2)` and blue points `(i, -1/2)` for `i = 1..=gamma`.
///
/// Two points condense this set under the plain rule, while every
/// nearest-enemy ball holds only its own center.
pub fn two_lines(gamma: usize) -> Result<Dataset> {
    if gamma == 0 {
        return Err(Error::InvalidParameter("two_lines needs gamma >= 1".into()));
    }
    let red = (1..=gamma).map(|i| (vec![i as f64, 0.5], 0));
    let blue = (1..=gamma).map(|i| (vec![i as f64, -0.5], 1));
    Dataset::from_rows(red.chain(blue), Metric::Euclidean)
}

/// Red column `(0, 2i)`, blue column `(1, 2i+1)`, and two far outliers
/// `r = (-t, gamma+1)` (red) and `b = (2t, gamma+1)` (blue) with
/// `t = (gamma+1)^2 / 2`. Sample order: reds, blues, `r`, `b`.
///
/// The outliers' nearest-enemy balls cover their whole class, while the
/// plain rule needs all but two points.
pub fn bc_friendly(gamma: usize) -> Result<Dataset> {
    if gamma < 3 || gamma.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "bc_friendly needs odd gamma >= 3, got {gamma}"
        )));
    }
    let g = gamma as f64;
    let t = (g + 1.0).powi(2) / 2.0;
    let red = (1..=gamma).map(|i| (vec![0.0, 2.0 * i as f64], 0));
    let blue = (1..gamma).map(|i| (vec![1.0, 2.0 * i as f64 + 1.0], 1));
    let outliers = [(vec![-t, g + 1.0], 0), (vec![2.0 * t, g + 1.0], 1)];
    Dataset::from_rows(red.chain(blue).chain(outliers), Metric::Euclidean)
}

pub const CIRCLE_INNER_RADIUS: f64 = 1.0;
pub const CIRCLE_OUTER_RANGE: (f64, f64) = (1.5, 3.0);

/// `n/2` inner points uniform in the unit disc (label 0) and the rest
/// uniform in the annulus `1.5 <= r <= 3` (label 1).
pub fn circle(n: usize, seed: u64) -> Result<Dataset> {
    if n < 10 {
        return Err(Error::InvalidParameter("circle needs n >= 10".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = n / 2;
    let (lo, hi) = CIRCLE_OUTER_RANGE;
    let rows: Vec<(Vec<f64>, Label)> = (0..n)
        .map(|k| {
            let theta = rng.gen_range(0.0..TAU);
            let u: f64 = rng.gen();
            // area-uniform radius
            let (r, label) = if k < inner {
                (CIRCLE_INNER_RADIUS * u.sqrt(), 0)
            } else {
                ((lo * lo + u * (hi * hi - lo * lo)).sqrt(), 1)
            };
            (vec![r * theta.cos(), r * theta.sin()], label)
        })
        .collect();
    Dataset::from_rows(rows, Metric::Euclidean)
}

/// `classes` isotropic Gaussian blobs in the plane, centers evenly spaced on
/// a circle of radius `spread`, standard deviation `noise`.
pub fn blobs(n: usize, classes: u32, spread: f64, noise: f64, seed: u64) -> Result<Dataset> {
    if classes == 0 || n < classes as usize {
        return Err(Error::InvalidParameter("blobs needs n >= classes >= 1".into()));
    }
    let normal = Normal::new(0.0, noise)
        .map_err(|e| Error::InvalidParameter(format!("blob noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<(Vec<f64>, Label)> = (0..n)
        .map(|k| {
            let c = (k % classes as usize) as u32;
            let angle = TAU * c as f64 / classes as f64;
            let x = spread * angle.cos() + normal.sample(&mut rng);
            let y = spread * angle.sin() + normal.sample(&mut rng);
            (vec![x, y], c)
        })
        .collect();
    Dataset::from_rows(rows, Metric::Euclidean)
}

/// Uniform points in `[-1, 1]^2` labeled by the side of the curve
/// `y = 0.5 sin(pi x)`: a smooth boundary with no label noise.
pub fn sine(n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidParameter("sine needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<(Vec<f64>, Label)> = (0..n)
        .map(|_| {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            let label = Label::from(y > 0.5 * (PI * x).sin());
            (vec![x, y], label)
        })
        .collect();
    Dataset::from_rows(rows, Metric::Euclidean)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    TwoLines,
    BcFriendly,
    Circle,
    Blobs,
    Sine,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "two-lines" => Ok(Family::TwoLines),
            "bc-friendly" => Ok(Family::BcFriendly),
            "circle" => Ok(Family::Circle),
            "blobs" => Ok(Family::Blobs),
            "sine" => Ok(Family::Sine),
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }
}

/// Everything needed to regenerate a synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Sample size for the random families.
    pub n: usize,
    /// Size parameter of the two constructions.
    pub gamma: usize,
    pub seed: u64,
    pub classes: u32,
    pub spread: f64,
    pub noise: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family) -> Self {
        GeneratorSpec {
            family,
            n: 200,
            gamma: 4,
            seed: 0,
            classes: 2,
            spread: 2.0,
            noise: 1.0,
        }
    }

    pub fn generate(&self) -> Result<Dataset> {
        match self.family {
            Family::TwoLines => two_lines(self.gamma),
            Family::BcFriendly => bc_friendly(self.gamma),
            Family::Circle => circle(self.n, self.seed),
            Family::Blobs => blobs(self.n, self.classes, self.spread, self.noise, self.seed),
            Family::Sine => sine(self.n, self.seed),
        }
    }
}
