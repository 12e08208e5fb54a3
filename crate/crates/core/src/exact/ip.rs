use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use super::{ExactSolution, SolveStatus};
use crate::classifier::{consistency_check, CondensedSet};
use crate::condense::{mss, rss};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};

/// `v(trigger) <= sum of v(s) for s in supporters`.
///
/// If `trigger` is selected, some supporter (a point with `point`'s label
/// strictly closer to `point` than `trigger` is, or `point` itself) must be
/// selected too.
#[derive(Clone, Debug, PartialEq)]
pub struct IpConstraint {
    pub point: usize,
    pub trigger: usize,
    pub supporters: FixedBitSet,
}

/// 0-1 program for minimum nearest-neighbor condensing: one binary variable
/// per sample, one [`IpConstraint`] per ordered pair of differently-labeled
/// samples, plus `sum v >= 1`. The objective is `min sum v`.
#[derive(Clone, Debug, PartialEq)]
pub struct IpInstance {
    pub labels: Vec<Label>,
    pub constraints: Vec<IpConstraint>,
}

impl IpInstance {
    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn is_feasible(&self, selected: &[usize]) -> bool {
        if selected.is_empty() {
            return false;
        }
        let mut bits = FixedBitSet::with_capacity(self.num_vars());
        bits.extend(selected.iter().copied());
        self.constraints
            .iter()
            .all(|c| !bits.contains(c.trigger) || !c.supporters.is_disjoint(&bits))
    }

    /// CPLEX LP text for cross-checking with an external MIP solver.
    pub fn to_lp(&self) -> String {
        let n = self.num_vars();
        let vars: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut out = String::from("\\ nearest-neighbor condensing\nMinimize\n obj: ");
        out.push_str(&vars.join(" + "));
        out.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{k}: v{}", c.trigger);
            for s in c.supporters.ones() {
                let _ = write!(out, " - v{s}");
            }
            out.push_str(" <= 0\n");
        }
        let _ = writeln!(out, " nonempty: {} >= 1", vars.join(" + "));
        out.push_str("Binary\n ");
        out.push_str(&vars.join(" "));
        out.push_str("\nEnd\n");
        out
    }
}

pub fn build_nn_ip(ds: &Dataset) -> IpInstance {
    let n = ds.len();
    let mut constraints = Vec::new();
    for x in 0..n {
        let lx = ds.label(x);
        for t in (0..n).filter(|&t| ds.label(t) != lx) {
            let limit = ds.dist(x, t);
            let mut supporters = FixedBitSet::with_capacity(n);
            supporters.insert(x);
            for s in (0..n).filter(|&s| ds.label(s) == lx) {
                if ds.dist(x, s) < limit {
                    supporters.insert(s);
                }
            }
            constraints.push(IpConstraint {
                point: x,
                trigger: t,
                supporters,
            });
        }
    }
    IpInstance {
        labels: ds.labels().collect(),
        constraints,
    }
}

/// Minimum subset that classifies the whole sample correctly under the
/// plain nearest-neighbor rule.
///
/// The branch-and-bound result is re-checked with the classifier; a
/// mismatch (only possible through exact distance ties) is an error.
pub fn exact_nn_condense(ds: &Dataset, node_budget: u64) -> Result<ExactSolution> {
    let inst = build_nn_ip(ds);
    let mut solver = IpSolver::new(&inst, node_budget);
    for seed in [mss(ds)?, rss(ds)?] {
        let mut idx = seed.indices().to_vec();
        idx.sort_unstable();
        if inst.is_feasible(&idx) && solver.best.as_ref().is_none_or(|b| idx.len() < b.len()) {
            solver.best = Some(idx);
        }
    }
    let mut sel_bits = FixedBitSet::with_capacity(ds.len());
    solver.search(&mut Vec::new(), &mut sel_bits, FixedBitSet::with_capacity(ds.len()));

    let mut best = solver
        .best
        .expect("a baseline seed or the search always yields a feasible subset");
    best.sort_unstable();
    let set = CondensedSet::unweighted(ds, best)?;
    let report = consistency_check(ds, &set);
    if !report.consistent {
        return Err(Error::VerificationFailed {
            violations: report.violations.len(),
        });
    }
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

struct IpSolver<'a> {
    inst: &'a IpInstance,
    by_trigger: Vec<Vec<usize>>,
    // Every class must be represented in a feasible subset: with one class
    // this is the non-emptiness row, with several it follows from the
    // pair constraints.
    classes: Vec<FixedBitSet>,
    best: Option<Vec<usize>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> IpSolver<'a> {
    fn new(inst: &'a IpInstance, budget: u64) -> Self {
        let n = inst.num_vars();
        let mut by_trigger = vec![Vec::new(); n];
        for (k, c) in inst.constraints.iter().enumerate() {
            by_trigger[c.trigger].push(k);
        }
        let mut labels = inst.labels.clone();
        labels.sort_unstable();
        labels.dedup();
        let classes = labels
            .iter()
            .map(|&l| {
                let mut b = FixedBitSet::with_capacity(n);
                b.extend((0..n).filter(|&i| inst.labels[i] == l));
                b
            })
            .collect();
        IpSolver {
            inst,
            by_trigger,
            classes,
            best: None,
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    /// Candidate sets of which at least one member must still be selected.
    /// `None` means the node is infeasible.
    fn requirements(&self, selected: &[usize], sel_bits: &FixedBitSet, excluded: &FixedBitSet) -> Option<Vec<FixedBitSet>> {
        let mut reqs: Vec<FixedBitSet> = Vec::new();
        for class in &self.classes {
            if class.is_disjoint(sel_bits) {
                let mut avail = class.clone();
                avail.difference_with(excluded);
                reqs.push(avail);
            }
        }
        // Supporter sets of one point are nested, so keep the smallest.
        let n = self.inst.num_vars();
        let mut per_point: Vec<Option<FixedBitSet>> = vec![None; n];
        for &t in selected {
            for &k in &self.by_trigger[t] {
                let c = &self.inst.constraints[k];
                if !c.supporters.is_disjoint(sel_bits) {
                    continue;
                }
                let slot = &mut per_point[c.point];
                let tighter = slot
                    .as_ref()
                    .is_none_or(|s| c.supporters.count_ones(..) < s.count_ones(..));
                if tighter {
                    *slot = Some(c.supporters.clone());
                }
            }
        }
        for mut avail in per_point.into_iter().flatten() {
            avail.difference_with(excluded);
            reqs.push(avail);
        }
        if reqs.iter().any(|r| r.is_clear()) {
            return None;
        }
        Some(reqs)
    }

    fn search(&mut self, selected: &mut Vec<usize>, sel_bits: &mut FixedBitSet, mut excluded: FixedBitSet) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let Some(mut reqs) = self.requirements(selected, sel_bits, &excluded) else {
            return;
        };
        if reqs.is_empty() {
            if self.best.as_ref().is_none_or(|b| selected.len() < b.len()) {
                self.best = Some(selected.clone());
            }
            return;
        }

        let sizes: Vec<usize> = reqs.iter().map(|r| r.count_ones(..)).collect();
        let mut order: Vec<usize> = (0..reqs.len()).collect();
        order.sort_by_key(|&k| (sizes[k], reqs[k].minimum()));

        // Requirements with pairwise disjoint candidates each need their own point.
        let mut used = FixedBitSet::with_capacity(self.inst.num_vars());
        let mut bound = 0;
        for &k in &order {
            if reqs[k].is_disjoint(&used) {
                bound += 1;
                used.union_with(&reqs[k]);
            }
        }
        if let Some(best) = &self.best {
            if selected.len() + bound >= best.len() {
                return;
            }
        }

        let mut freq = vec![0usize; self.inst.num_vars()];
        for r in &reqs {
            for p in r.ones() {
                freq[p] += 1;
            }
        }
        let branch = std::mem::take(&mut reqs[order[0]]);
        let mut candidates: Vec<usize> = branch.ones().collect();
        candidates.sort_by_key(|&p| (std::cmp::Reverse(freq[p]), p));
        drop(reqs);

        for p in candidates {
            selected.push(p);
            sel_bits.insert(p);
            self.search(selected, sel_bits, excluded.clone());
            sel_bits.set(p, false);
            selected.pop();
            excluded.insert(p);
            if self.exhausted {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate::{bc_friendly, two_lines};
    use crate::metric::Metric;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(rows: &[(f64, Label)]) -> Dataset {
        Dataset::from_rows(rows.iter().map(|&(x, l)| (vec![x], l)), Metric::Euclidean).unwrap()
    }

    /// Smallest subset that classifies every sample correctly, by enumeration.
    fn brute_min_consistent(ds: &Dataset) -> usize {
        let n = ds.len();
        (1u32..(1 << n))
            .filter(|mask| {
                let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                consistency_check(ds, &CondensedSet::unweighted(ds, idx).unwrap()).consistent
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn two_point_instance_needs_both() {
        let ds = line(&[(0.0, 0), (1.0, 1)]);
        let ip = build_nn_ip(&ds);
        assert_eq!(ip.constraints.len(), 2);
        assert!(!ip.is_feasible(&[0]));
        assert!(ip.is_feasible(&[0, 1]));
        assert_eq!(exact_nn_condense(&ds, 100).unwrap().set.len(), 2);
    }

    #[test]
    fn constraint_count_is_twice_cross_pairs() {
        let ds = bc_friendly(5).unwrap();
        let reds = ds.labels().filter(|&l| l == 0).count();
        let blues = ds.len() - reds;
        assert_eq!(build_nn_ip(&ds).constraints.len(), 2 * reds * blues);
    }

    #[test]
    fn supporters_are_strictly_closer() {
        // x=0 (label 0); enemy at 2; same-label at 2 (tie) and 1
        let ds = line(&[(0.0, 0), (2.0, 1), (-2.0, 0), (1.0, 0)]);
        let ip = build_nn_ip(&ds);
        let c = ip.constraints.iter().find(|c| c.point == 0 && c.trigger == 1).unwrap();
        assert_eq!(c.supporters.ones().collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    fn two_lines_condenses_to_two() {
        let ds = two_lines(4).unwrap();
        assert!(build_nn_ip(&ds).is_feasible(&[0, 4]));
        let sol = exact_nn_condense(&ds, 10_000).unwrap();
        assert!(sol.is_optimal());
        assert_eq!(sol.set.len(), 2);
    }

    #[test]
    fn bc_friendly_needs_almost_everything() {
        let ds = bc_friendly(5).unwrap();
        let sol = exact_nn_condense(&ds, 1_000_000).unwrap();
        assert!(sol.is_optimal());
        assert!(sol.set.len() >= ds.len() - 2);
    }

    #[test]
    fn single_class_is_one_point() {
        let ds = line(&[(0.0, 1), (1.0, 1), (3.0, 1)]);
        let sol = exact_nn_condense(&ds, 100).unwrap();
        assert_eq!(sol.set.len(), 1);
    }

    #[test]
    fn matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(3..=12);
            let ds = Dataset::from_rows(
                (0..n).map(|i| (vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)], (i % 2) as u32)),
                Metric::Euclidean,
            )
            .unwrap();
            let sol = exact_nn_condense(&ds, u64::MAX).unwrap();
            assert!(sol.is_optimal());
            assert_eq!(sol.set.len(), brute_min_consistent(&ds));
        }
    }

    #[test]
    fn lp_export_has_every_row() {
        let ds = line(&[(0.0, 0), (1.0, 1), (2.0, 0)]);
        let ip = build_nn_ip(&ds);
        let lp = ip.to_lp();
        assert!(lp.starts_with("\\ nearest-neighbor condensing\nMinimize\n obj: v0 + v1 + v2\n"));
        assert_eq!(lp.matches(" <= 0").count(), ip.constraints.len());
        assert!(lp.contains(" nonempty: v0 + v1 + v2 >= 1\n"));
        assert!(lp.ends_with("Binary\n v0 v1 v2\nEnd\n"));
    }
}
