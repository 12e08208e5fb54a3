//! Condensing heuristics: the greedy nearest-enemy ball cover for the
//! weighted rule, and the Hart / MSS / RSS baselines for the plain rule.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{consistency_check, CondensedSet};
use crate::dataset::{enemy_distances, Dataset};
use crate::error::{Error, Result};

/// Largest sample for which [`greedy_wnn`] stores ball membership as a bit
/// matrix instead of recomputing distances.
pub const COVERAGE_MATRIX_LIMIT: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreedyPick {
    pub index: usize,
    pub radius: f64,
    pub newly_covered: usize,
}

/// One entry per iteration of the greedy loop.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub picks: Vec<GreedyPick>,
}

impl GreedyTrace {
    pub fn total_covered(&self) -> usize {
        self.picks.iter().map(|p| p.newly_covered).sum()
    }
}

/// Open nearest-enemy balls `B(x, d_enemy(x))` restricted to the sample.
enum Balls<'a> {
    Matrix(Vec<FixedBitSet>),
    OnTheFly { ds: &'a Dataset, radii: &'a [f64] },
}

impl<'a> Balls<'a> {
    fn new(ds: &'a Dataset, radii: &'a [f64], matrix_limit: usize) -> Self {
        if ds.len() > matrix_limit {
            return Balls::OnTheFly { ds, radii };
        }
        let n = ds.len();
        let rows = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut row = FixedBitSet::with_capacity(n);
                for y in 0..n {
                    if ds.dist(x, y) < radii[x] {
                        row.insert(y);
                    }
                }
                row
            })
            .collect();
        Balls::Matrix(rows)
    }

    #[inline]
    fn contains(&self, x: usize, y: usize) -> bool {
        match self {
            Balls::Matrix(rows) => rows[x].contains(y),
            Balls::OnTheFly { ds, radii } => ds.dist(x, y) < radii[x],
        }
    }

    fn size(&self, x: usize, n: usize) -> usize {
        match self {
            Balls::Matrix(rows) => rows[x].count_ones(..),
            Balls::OnTheFly { .. } => (0..n).filter(|&y| self.contains(x, y)).count(),
        }
    }
}

/// Greedy weighted condensing with the default coverage-matrix threshold.
pub fn greedy_wnn(ds: &Dataset) -> Result<(CondensedSet, GreedyTrace)> {
    greedy_wnn_with(ds, COVERAGE_MATRIX_LIMIT)
}

/// Repeatedly picks the sample point whose open nearest-enemy ball holds
/// the most uncovered points, weights it by its nearest-enemy distance, and
/// marks those points covered. Ties go to the lowest index.
///
/// Samples above `matrix_limit` points recompute ball membership instead of
/// storing an `n x n` bit matrix; both paths produce identical output.
pub fn greedy_wnn_with(ds: &Dataset, matrix_limit: usize) -> Result<(CondensedSet, GreedyTrace)> {
    let n = ds.len();
    if ds.is_single_class() {
        let set = CondensedSet::new(ds, vec![0], vec![f64::INFINITY])?;
        let trace = GreedyTrace {
            picks: vec![GreedyPick {
                index: 0,
                radius: f64::INFINITY,
                newly_covered: n,
            }],
        };
        return Ok((set, trace));
    }

    let radii = enemy_distances(ds);
    let balls = Balls::new(ds, &radii, matrix_limit);
    let mut gain: Vec<usize> = (0..n).into_par_iter().map(|x| balls.size(x, n)).collect();
    let mut covered = vec![false; n];
    let mut remaining = n;
    let mut trace = GreedyTrace::default();
    let (mut indices, mut weights) = (Vec::new(), Vec::new());

    while remaining > 0 {
        let mut best = 0;
        for x in 1..n {
            if gain[x] > gain[best] {
                best = x;
            }
        }
        let newly: Vec<usize> = (0..n)
            .filter(|&y| !covered[y] && balls.contains(best, y))
            .collect();
        debug_assert_eq!(newly.len(), gain[best]);
        debug_assert!(!newly.is_empty());
        for &y in &newly {
            covered[y] = true;
        }
        // every ball that held a newly covered point loses it
        let lost: Vec<usize> = (0..n)
            .into_par_iter()
            .map(|z| newly.iter().filter(|&&y| balls.contains(z, y)).count())
            .collect();
        for (g, l) in gain.iter_mut().zip(lost) {
            *g -= l;
        }
        remaining -= newly.len();
        trace.picks.push(GreedyPick {
            index: best,
            radius: radii[best],
            newly_covered: newly.len(),
        });
        indices.push(best);
        weights.push(radii[best]);
    }

    let set = CondensedSet::new(ds, indices, weights)?;
    verify(ds, &set)?;
    Ok((set, trace))
}

pub(crate) fn verify(ds: &Dataset, set: &CondensedSet) -> Result<()> {
    let report = consistency_check(ds, set);
    if report.consistent {
        Ok(())
    } else {
        Err(Error::VerificationFailed {
            violations: report.violations.len(),
        })
    }
}

/// Hart's condensed nearest neighbor: scan the sample in a seeded random
/// order, absorbing every point the current subset misclassifies, until a
/// full pass adds nothing.
pub fn hart_cnn(ds: &Dataset, seed: u64) -> Result<CondensedSet> {
    let n = ds.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    // nearest[i] = (distance, label) of i's nearest selected point; strict
    // improvement keeps the earliest-selected point on ties, like the classifier.
    let mut nearest: Vec<(f64, u32)> = vec![(f64::INFINITY, u32::MAX); n];
    let mut selected = vec![false; n];
    let mut picks = Vec::new();
    let mut add = |p: usize, nearest: &mut Vec<(f64, u32)>, picks: &mut Vec<usize>| {
        selected[p] = true;
        picks.push(p);
        let lp = ds.label(p);
        nearest.par_iter_mut().enumerate().for_each(|(i, slot)| {
            let d = ds.dist(i, p);
            if d < slot.0 {
                *slot = (d, lp);
            }
        });
    };

    add(order[0], &mut nearest, &mut picks);
    loop {
        let mut added = false;
        for &i in &order {
            if nearest[i].1 != ds.label(i) {
                add(i, &mut nearest, &mut picks);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    let set = CondensedSet::unweighted(ds, picks)?;
    verify(ds, &set)?;
    Ok(set)
}

/// Modified selective subset: in ascending nearest-enemy order, every point
/// not yet covered is selected and covers each `x` with
/// `d(x, p) < d_enemy(x)`.
pub fn mss(ds: &Dataset) -> Result<CondensedSet> {
    let n = ds.len();
    let radii = enemy_distances(ds);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let mut covered = vec![false; n];
    let mut picks = Vec::new();
    for &p in &order {
        if covered[p] {
            continue;
        }
        picks.push(p);
        covered
            .par_iter_mut()
            .enumerate()
            .filter(|(x, _)| ds.dist(*x, p) < radii[*x])
            .for_each(|(_, c)| *c = true);
    }
    let set = CondensedSet::unweighted(ds, picks)?;
    verify(ds, &set)?;
    Ok(set)
}

/// Reduced selective subset: in descending nearest-enemy order, a point is
/// selected unless an already-selected same-label point lies strictly
/// inside its nearest-enemy radius.
pub fn rss(ds: &Dataset) -> Result<CondensedSet> {
    let n = ds.len();
    let radii = enemy_distances(ds);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]));
    let mut picks: Vec<usize> = Vec::new();
    for &p in &order {
        let covered = picks
            .iter()
            .any(|&s| ds.label(s) == ds.label(p) && ds.dist(p, s) < radii[p]);
        if !covered {
            picks.push(p);
        }
    }
    let set = CondensedSet::unweighted(ds, picks)?;
    verify(ds, &set)?;
    Ok(set)
}
