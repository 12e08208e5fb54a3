use fixedbitset::FixedBitSet;

use super::{ExactSolution, SolveStatus};
use crate::classifier::CondensedSet;
use crate::condense::{greedy_wnn, verify};
use crate::dataset::{enemy_distances, Dataset};
use crate::error::Result;

/// Set system over the sample: `sets[x]` holds the samples strictly inside
/// the open ball around `x` whose radius is `x`'s nearest-enemy distance.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverInstance {
    pub sets: Vec<FixedBitSet>,
    pub radii: Vec<f64>,
}

impl CoverInstance {
    pub fn universe_size(&self) -> usize {
        self.sets.len()
    }

    /// Whether the sets indexed by `chosen` cover every sample.
    pub fn covers(&self, chosen: &[usize]) -> bool {
        let mut union = FixedBitSet::with_capacity(self.universe_size());
        for &s in chosen {
            union.union_with(&self.sets[s]);
        }
        union.count_ones(..) == self.universe_size()
    }
}

pub fn build_wnn_cover(ds: &Dataset) -> CoverInstance {
    let n = ds.len();
    let radii = enemy_distances(ds);
    let sets = (0..n)
        .map(|x| {
            let mut s = FixedBitSet::with_capacity(n);
            for y in 0..n {
                if ds.dist(x, y) < radii[x] {
                    s.insert(y);
                }
            }
            s
        })
        .collect();
    CoverInstance { sets, radii }
}

/// Minimum-cardinality nearest-enemy-weighted condensed set.
pub fn exact_wnn_condense(ds: &Dataset, node_budget: u64) -> Result<ExactSolution> {
    let (greedy, _) = greedy_wnn(ds)?;
    if ds.is_single_class() {
        return Ok(ExactSolution {
            set: greedy,
            status: SolveStatus::Optimal,
            nodes: 0,
        });
    }
    let inst = build_wnn_cover(ds);
    let mut solver = CoverSolver::new(&inst, greedy.indices().to_vec(), node_budget);
    let mut uncovered = FixedBitSet::with_capacity(ds.len());
    uncovered.insert_range(..);
    let excluded = FixedBitSet::with_capacity(ds.len());
    solver.search(&uncovered, excluded, &mut Vec::new());

    let mut best = solver.best;
    best.sort_unstable();
    let weights = best.iter().map(|&i| inst.radii[i]).collect();
    let set = CondensedSet::new(ds, best, weights)?;
    verify(ds, &set)?;
    Ok(ExactSolution {
        set,
        status: if solver.exhausted {
            SolveStatus::BudgetExhausted
        } else {
            SolveStatus::Optimal
        },
        nodes: solver.nodes,
    })
}

struct CoverSolver<'a> {
    inst: &'a CoverInstance,
    // covered_by[e] = sets containing element e
    covered_by: Vec<Vec<usize>>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> CoverSolver<'a> {
    fn new(inst: &'a CoverInstance, incumbent: Vec<usize>, budget: u64) -> Self {
        let n = inst.universe_size();
        let mut covered_by = vec![Vec::new(); n];
        for (s, set) in inst.sets.iter().enumerate() {
            for e in set.ones() {
                covered_by[e].push(s);
            }
        }
        CoverSolver {
            inst,
            covered_by,
            best: incumbent,
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    fn available(&self, e: usize, excluded: &FixedBitSet) -> Vec<usize> {
        self.covered_by[e]
            .iter()
            .copied()
            .filter(|&s| !excluded.contains(s))
            .collect()
    }

    fn search(&mut self, uncovered: &FixedBitSet, mut excluded: FixedBitSet, chosen: &mut Vec<usize>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if uncovered.is_clear() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }

        // Elements ordered by how few usable sets can still cover them.
        let mut elems: Vec<(usize, Vec<usize>)> = uncovered
            .ones()
            .map(|e| (e, self.available(e, &excluded)))
            .collect();
        if elems.iter().any(|(_, a)| a.is_empty()) {
            return;
        }
        elems.sort_by_key(|(e, a)| (a.len(), *e));

        // Lower bound: elements no single usable set covers together.
        let mut used = FixedBitSet::with_capacity(self.inst.universe_size());
        let mut bound = 0;
        for (_, avail) in &elems {
            if avail.iter().all(|&s| !used.contains(s)) {
                bound += 1;
                for &s in avail {
                    used.insert(s);
                }
            }
        }
        if chosen.len() + bound >= self.best.len() {
            return;
        }

        let mut branches = elems.swap_remove(0).1;
        branches.sort_by_key(|&s| {
            let gain = self.inst.sets[s].intersection(uncovered).count();
            (std::cmp::Reverse(gain), s)
        });
        for s in branches {
            let mut rest = uncovered.clone();
            rest.difference_with(&self.inst.sets[s]);
            chosen.push(s);
            self.search(&rest, excluded.clone(), chosen);
            chosen.pop();
            excluded.insert(s);
            if self.exhausted {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condense::greedy_wnn;
    use crate::data::generate::{bc_friendly, two_lines};
    use crate::metric::Metric;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Smallest subset of sets covering the universe, by enumeration.
    fn brute_min_cover(inst: &CoverInstance) -> usize {
        let n = inst.universe_size();
        let full = (1u32 << n) - 1;
        let masks: Vec<u32> = inst
            .sets
            .iter()
            .map(|s| s.ones().fold(0u32, |m, e| m | (1 << e)))
            .collect();
        (1u32..=full)
            .filter(|sub| {
                let union = (0..n).filter(|i| sub >> i & 1 == 1).fold(0, |u, i| u | masks[i]);
                union == full
            })
            .map(|sub| sub.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn two_lines_sets_are_singletons() {
        let ds = two_lines(4).unwrap();
        let inst = build_wnn_cover(&ds);
        for (x, s) in inst.sets.iter().enumerate() {
            assert_eq!(s.ones().collect::<Vec<_>>(), vec![x]);
        }
        assert_eq!(exact_wnn_condense(&ds, 1000).unwrap().set.len(), 8);
    }

    #[test]
    fn bc_friendly_outlier_balls_hold_their_class() {
        let ds = bc_friendly(5).unwrap();
        let inst = build_wnn_cover(&ds);
        for i in 0..ds.len() {
            let owner = if ds.label(i) == 0 { 9 } else { 10 };
            assert!(inst.sets[owner].contains(i));
        }
        let sol = exact_wnn_condense(&ds, 1000).unwrap();
        assert!(sol.is_optimal());
        assert_eq!(sol.set.len(), 2);
    }

    #[test]
    fn two_point_instance() {
        let ds = Dataset::from_rows(vec![(vec![0.0], 0), (vec![1.0], 1)], Metric::Euclidean).unwrap();
        let inst = build_wnn_cover(&ds);
        assert_eq!(inst.sets[0].ones().collect::<Vec<_>>(), vec![0]);
        assert_eq!(inst.sets[1].ones().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn matches_enumeration_and_never_beats_greedy_upwards() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let n = rng.gen_range(4..=13);
            let ds = Dataset::from_rows(
                (0..n).map(|i| (vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)], (i % 2) as u32)),
                Metric::Euclidean,
            )
            .unwrap();
            let sol = exact_wnn_condense(&ds, u64::MAX).unwrap();
            assert!(sol.is_optimal());
            assert_eq!(sol.set.len(), brute_min_cover(&build_wnn_cover(&ds)));
            assert!(sol.set.len() <= greedy_wnn(&ds).unwrap().0.len());
        }
    }

    #[test]
    fn budget_exhaustion_keeps_incumbent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ds = Dataset::from_rows(
            (0..40).map(|_| {
                (
                    vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)],
                    rng.gen_range(0..2),
                )
            }),
            Metric::Euclidean,
        )
        .unwrap();
        let sol = exact_wnn_condense(&ds, 1).unwrap();
        assert_eq!(sol.status, SolveStatus::BudgetExhausted);
        assert_eq!(sol.set.len(), greedy_wnn(&ds).unwrap().0.len());
    }
}
