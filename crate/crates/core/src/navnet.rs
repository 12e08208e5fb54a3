//! Navigating nets for approximate weighted nearest-neighbor queries.
//!
//! Distances are measured in units of the minimum inter-point distance, so
//! level `i` of the hierarchy is a `2^i`-net of level `i - 1`. Level 0 holds
//! every point and the top level a single root. Every tree node records the
//! heaviest point of its subtree; the query inspects that point alongside
//! the node's own point, which is what makes the descent work for weights.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{check_weight, Metric};

#[derive(Clone, Debug, PartialEq)]
pub struct NavNode {
    pub level: usize,
    pub point: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Heaviest point in the subtree (lowest index among equal weights).
    pub heaviest: usize,
}

/// Nested nets plus the parent tree over them.
#[derive(Clone, Debug)]
pub struct NavigatingNet {
    metric: Metric,
    coords: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// Minimum inter-point distance: the length of one unit.
    unit: f64,
    /// `levels[i]` lists node ids of level `i` in input order.
    levels: Vec<Vec<usize>>,
    nodes: Vec<NavNode>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QueryResult {
    pub index: usize,
    pub wdist: f64,
    pub nodes_visited: usize,
    /// Largest candidate list held at any level.
    pub max_list_len: usize,
}

impl NavigatingNet {
    pub fn build(points: Vec<Vec<f64>>, weights: Vec<f64>, metric: Metric) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if weights.len() != n {
            return Err(Error::WeightCountMismatch {
                indices: n,
                weights: weights.len(),
            });
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: p.len() });
            }
            if let Some((position, &value)) = p.iter().enumerate().find(|(_, c)| !c.is_finite()) {
                return Err(Error::NonFinite { position, value });
            }
        }
        for &w in &weights {
            check_weight(w)?;
        }

        let (mut unit, mut diam) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            for j in i + 1..n {
                let d = metric.dist(&points[i], &points[j]);
                if d == 0.0 {
                    return Err(Error::DuplicatePoint { first: i, second: j });
                }
                unit = unit.min(d);
                diam = diam.max(d);
            }
        }
        if n == 1 {
            unit = 1.0;
        }
        // Level 0 keeps every point, so a multi-point net needs at least one
        // level above it to reach a single root.
        let mut top = usize::from(n > 1);
        while radius(unit, top) < diam {
            top += 1;
        }

        let mut net = NavigatingNet {
            metric,
            coords: points,
            weights,
            unit,
            levels: Vec::with_capacity(top + 1),
            nodes: Vec::new(),
        };

        // Nets, bottom-up: greedy in input order.
        let mut members: Vec<Vec<usize>> = vec![(0..n).collect()];
        for i in 1..=top {
            let r = radius(unit, i);
            let mut accepted: Vec<usize> = Vec::new();
            for &p in &members[i - 1] {
                if accepted.iter().all(|&a| net.dist(a, p) > r) {
                    accepted.push(p);
                }
            }
            members.push(accepted);
        }
        debug_assert_eq!(members[top].len(), 1);

        for (level, pts) in members.iter().enumerate() {
            let ids = pts
                .iter()
                .map(|&p| {
                    net.nodes.push(NavNode {
                        level,
                        point: p,
                        parent: None,
                        children: Vec::new(),
                        heaviest: p,
                    });
                    net.nodes.len() - 1
                })
                .collect();
            net.levels.push(ids);
        }

        // Parent: lowest-index point of the next level within 2^(i+1).
        for level in 0..top {
            let r = radius(unit, level + 1);
            for k in 0..net.levels[level].len() {
                let id = net.levels[level][k];
                let p = net.nodes[id].point;
                let parent = net.levels[level + 1]
                    .iter()
                    .copied()
                    .filter(|&pid| net.dist(net.nodes[pid].point, p) <= r)
                    .min_by_key(|&pid| net.nodes[pid].point)
                    .expect("covering property guarantees a parent");
                net.nodes[id].parent = Some(parent);
                net.nodes[parent].children.push(id);
            }
        }

        for level in 1..=top {
            for k in 0..net.levels[level].len() {
                let id = net.levels[level][k];
                let mut best = net.nodes[id].heaviest;
                for &c in &net.nodes[id].children {
                    best = heavier(&net.weights, best, net.nodes[c].heaviest);
                }
                net.nodes[id].heaviest = best;
            }
        }
        Ok(net)
    }

    #[inline]
    fn dist(&self, a: usize, b: usize) -> f64 {
        self.metric.dist(&self.coords[a], &self.coords[b])
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Index of the top level.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn unit(&self) -> f64 {
        self.unit
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> &[NavNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NavNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.levels[self.top()][0]
    }

    /// Points of level `i`, in input order.
    pub fn level_points(&self, i: usize) -> Vec<usize> {
        self.levels[i].iter().map(|&id| self.nodes[id].point).collect()
    }

    /// Net radius of level `i` in original distance units.
    pub fn level_radius(&self, i: usize) -> f64 {
        radius(self.unit, i)
    }

    fn wdist(&self, q: &[f64], p: usize) -> f64 {
        self.metric.dist(q, &self.coords[p]) / self.weights[p]
    }

    /// Approximate weighted nearest neighbor of `q`.
    ///
    /// Descends from the root keeping, at step `i`, the children within
    /// `2 * 2^i / eps` of `q`. The answer is within a factor `1 + 8 eps` of
    /// the optimal weighted distance; see [`Self::query_within`] for a
    /// `1 + eps` guarantee.
    pub fn query(&self, q: &[f64], eps: f64) -> Result<QueryResult> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps must be in (0,1), got {eps}")));
        }
        if q.len() != self.coords[0].len() {
            return Err(Error::DimensionMismatch {
                left: self.coords[0].len(),
                right: q.len(),
            });
        }
        if let Some((position, &value)) = q.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { position, value });
        }

        let root = self.root();
        let mut best = (self.nodes[root].point, self.wdist(q, self.nodes[root].point));
        let consider = |p: usize, best: &mut (usize, f64)| {
            let wd = self.wdist(q, p);
            if wd < best.1 || (wd == best.1 && p < best.0) {
                *best = (p, wd);
            }
        };
        consider(self.nodes[root].heaviest, &mut best);

        let mut visited = 1;
        let mut max_list_len = 1;
        let mut list = vec![root];
        for i in (1..=self.top()).rev() {
            let limit = 2.0 * radius(self.unit, i) / eps;
            let mut next = Vec::new();
            for &v in &list {
                for &w in &self.nodes[v].children {
                    visited += 1;
                    let node = &self.nodes[w];
                    if self.metric.dist(q, &self.coords[node.point]) <= limit {
                        next.push(w);
                        consider(node.point, &mut best);
                        consider(node.heaviest, &mut best);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            max_list_len = max_list_len.max(next.len());
            list = next;
        }
        Ok(QueryResult {
            index: best.0,
            wdist: best.1,
            nodes_visited: visited,
            max_list_len,
        })
    }

    /// `(1 + eps)`-approximate query: runs [`Self::query`] with `eps / 8`.
    pub fn query_within(&self, q: &[f64], eps: f64) -> Result<QueryResult> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps must be in (0,1), got {eps}")));
        }
        self.query(q, eps / 8.0)
    }

    /// One `level point parent_point` line per node, top level first.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for level in (0..self.levels.len()).rev() {
            for &id in &self.levels[level] {
                let node = &self.nodes[id];
                let parent = node
                    .parent
                    .map_or_else(|| "-".to_string(), |p| self.nodes[p].point.to_string());
                let _ = writeln!(out, "{level} {} {parent}", node.point);
            }
        }
        out
    }
}

fn radius(unit: f64, level: usize) -> f64 {
    unit * (1u64 << level) as f64
}

fn heavier(weights: &[f64], a: usize, b: usize) -> usize {
    if weights[b] > weights[a] || (weights[b] == weights[a] && b < a) {
        b
    } else {
        a
    }
}

/// Exact weighted nearest neighbor by linear scan; ties go to the lowest index.
pub fn brute_force_wnn(points: &[Vec<f64>], weights: &[f64], q: &[f64], metric: Metric) -> QueryResult {
    let mut best = (0, f64::INFINITY);
    for (i, (p, &w)) in points.iter().zip(weights).enumerate() {
        let wd = metric.dist(q, p) / w;
        if wd < best.1 || i == 0 {
            best = (i, wd);
        }
    }
    QueryResult {
        index: best.0,
        wdist: best.1,
        nodes_visited: points.len(),
        max_list_len: points.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let w = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        (pts, w)
    }

    fn check_invariants(net: &NavigatingNet) {
        let top = net.top();
        assert_eq!(net.level_points(0), (0..net.len()).collect::<Vec<_>>());
        assert_eq!(net.level_points(top).len(), 1);
        for i in 1..=top {
            let r = net.level_radius(i);
            let lvl = net.level_points(i);
            let below = net.level_points(i - 1);
            for (k, &a) in lvl.iter().enumerate() {
                assert!(below.contains(&a), "nesting");
                for &b in &lvl[k + 1..] {
                    assert!(net.dist(a, b) > r, "packing at level {i}");
                }
            }
            for &p in &below {
                assert!(lvl.iter().any(|&a| net.dist(a, p) <= r), "covering at level {i}");
            }
        }
        for node in net.nodes() {
            if let Some(parent) = node.parent {
                let pn = net.node(parent);
                assert_eq!(pn.level, node.level + 1);
                assert!(net.dist(pn.point, node.point) <= net.level_radius(node.level + 1));
            } else {
                assert_eq!(node.level, top);
            }
        }
    }

    fn subtree_heaviest(net: &NavigatingNet, id: usize) -> usize {
        let mut best = net.node(id).point;
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            best = heavier(net.weights(), best, net.node(v).point);
            stack.extend(net.node(v).children.iter().copied());
        }
        best
    }

    #[test]
    fn single_point_net() {
        let net = NavigatingNet::build(vec![vec![1.0, 2.0]], vec![3.0], Metric::Euclidean).unwrap();
        assert_eq!(net.top(), 0);
        check_invariants(&net);
        let r = net.query(&[5.0, 5.0], 0.1).unwrap();
        assert_eq!(r.index, 0);
        assert_eq!(r.wdist, 5.0 / 3.0);
    }

    #[test]
    fn points_on_a_line() {
        let pts = [0.0, 1.0, 2.0, 4.0].iter().map(|&x| vec![x]).collect();
        let net = NavigatingNet::build(pts, vec![1.0; 4], Metric::Euclidean).unwrap();
        assert_eq!(net.unit(), 1.0);
        assert_eq!(net.top(), 2);
        assert_eq!(net.level_points(1), vec![0, 3]);
        assert_eq!(net.level_points(2), vec![0]);
        check_invariants(&net);
    }

    #[test]
    fn duplicate_points_rejected() {
        let pts = vec![vec![0.0], vec![0.0]];
        assert!(NavigatingNet::build(pts, vec![1.0, 1.0], Metric::Euclidean).is_err());
    }

    #[test]
    fn random_cube_invariants_and_heaviest() {
        let (pts, w) = cube(1, 500);
        let net = NavigatingNet::build(pts.clone(), w.clone(), Metric::Euclidean).unwrap();
        check_invariants(&net);
        let again = NavigatingNet::build(pts, w, Metric::Euclidean).unwrap();
        assert_eq!(net.dump(), again.dump());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let id = rng.gen_range(0..net.nodes().len());
            assert_eq!(net.node(id).heaviest, subtree_heaviest(&net, id));
            assert!(net.weights()[net.node(id).heaviest] >= net.weights()[net.node(id).point]);
        }
    }

    #[test]
    fn approximation_guarantee() {
        let (pts, w) = cube(3, 500);
        let net = NavigatingNet::build(pts.clone(), w.clone(), Metric::Euclidean).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for eps in [0.05, 0.1, 0.5] {
            for _ in 0..300 {
                let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.2..1.2)).collect();
                let got = net.query(&q, eps).unwrap();
                let exact = brute_force_wnn(&pts, &w, &q, Metric::Euclidean);
                assert!(got.wdist <= (1.0 + 8.0 * eps) * exact.wdist);
                let tight = net.query_within(&q, eps).unwrap();
                assert!(tight.wdist <= (1.0 + eps) * exact.wdist);
            }
        }
    }

    #[test]
    fn equal_weights_reduce_to_plain_search() {
        let (pts, _) = cube(5, 200);
        let w = vec![1.0; 200];
        let net = NavigatingNet::build(pts.clone(), w.clone(), Metric::Manhattan).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
            let nearest = pts
                .iter()
                .map(|p| Metric::Manhattan.dist(&q, p))
                .fold(f64::INFINITY, f64::min);
            assert!(net.query(&q, 0.1).unwrap().wdist <= 1.8 * nearest);
        }
    }

    #[test]
    fn query_rejects_bad_eps() {
        let net = NavigatingNet::build(vec![vec![0.0], vec![1.0]], vec![1.0, 1.0], Metric::Euclidean).unwrap();
        assert!(net.query(&[0.5], 0.0).is_err());
        assert!(net.query(&[0.5], 1.0).is_err());
        assert!(net.query(&[0.5, 1.0], 0.5).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let pts = vec![vec![0.0, 0.0], vec![10.0, 0.0]];
        let r = brute_force_wnn(&pts, &[1.0, 1000.0], &[0.0, 0.0], Metric::Euclidean);
        // 0/1 = 0 beats 10/1000
        assert_eq!((r.index, r.wdist), (0, 0.0));
        let r = brute_force_wnn(&pts, &[1.0, 1000.0], &[1.0, 0.0], Metric::Euclidean);
        assert_eq!((r.index, r.wdist), (1, 9.0 / 1000.0));
        let single = brute_force_wnn(&pts[..1], &[2.0], &[4.0, 3.0], Metric::Euclidean);
        assert_eq!((single.index, single.wdist), (0, 2.5));
    }

    #[test]
    fn brute_force_agrees_with_sorting_oracle() {
        let (pts, w) = cube(8, 60);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..2.0)).collect();
            let mut all: Vec<(f64, usize)> = pts
                .iter()
                .zip(&w)
                .enumerate()
                .map(|(i, (p, wi))| (Metric::Euclidean.dist(&q, p) / wi, i))
                .collect();
            all.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let r = brute_force_wnn(&pts, &w, &q, Metric::Euclidean);
            assert_eq!((r.wdist, r.index), all[0]);
        }
    }
}
