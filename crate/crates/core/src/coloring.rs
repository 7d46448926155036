//! Greedy graph coloring for chromatic-parallel sweep scheduling.

use crate::error::{Error, Result};
use crate::model::IsingModel;

/// Partition of nodes into proper color classes, in update order.
///
/// All nodes of one class update in the same clock cycle; properness (no
/// edge inside a class) makes those updates independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPlan {
    classes: Vec<Vec<usize>>,
}

impl SweepPlan {
    /// Plan with the given classes; disjointness and coverage are checked,
    /// properness is checked against a model by [`SweepPlan::validate`].
    pub fn new(classes: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for class in &classes {
            for &i in class {
                if i >= n {
                    return Err(Error::ImproperColoring(format!(
                        "node {i} out of range for n = {n}"
                    )));
                }
                if seen[i] {
                    return Err(Error::ImproperColoring(format!(
                        "node {i} appears in two classes"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::ImproperColoring(format!(
                "node {missing} is not covered by any class"
            )));
        }
        Ok(SweepPlan { classes })
    }

    /// One node per class in index order; chromatic sweeps over this plan
    /// reproduce sequential sweeps exactly.
    pub fn sequential(n: usize) -> Self {
        SweepPlan {
            classes: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn node_count(&self) -> usize {
        self.classes.iter().map(|c| c.len()).sum()
    }

    /// Errors unless the plan is a proper coloring covering exactly the
    /// model's nodes.
    pub fn validate(&self, model: &IsingModel) -> Result<()> {
        if self.node_count() != model.n() {
            return Err(Error::ImproperColoring(format!(
                "plan covers {} nodes, model has {}",
                self.node_count(),
                model.n()
            )));
        }
        let mut color = vec![usize::MAX; model.n()];
        for (c, class) in self.classes.iter().enumerate() {
            for &i in class {
                if i >= model.n() || color[i] != usize::MAX {
                    return Err(Error::ImproperColoring(format!(
                        "node {i} missing or duplicated"
                    )));
                }
                color[i] = c;
            }
        }
        for (i, j, _) in model.edges() {
            if color[i] == color[j] {
                return Err(Error::ImproperColoring(format!(
                    "edge ({i}, {j}) joins two nodes of class {}",
                    color[i]
                )));
            }
        }
        Ok(())
    }
}

/// Greedy largest-degree-first coloring. Nodes are colored in descending
/// degree order (index ascending on ties) with the smallest color not used
/// by a neighbor, so the class count never exceeds max_degree + 1.
/// Deterministic for a fixed model.
pub fn color_graph(model: &IsingModel) -> SweepPlan {
    let n = model.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(model.degree(i)), i));

    let mut color = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut used = Vec::new();
    for &i in &order {
        used.clear();
        used.resize(classes.len() + 1, false);
        for (j, _) in model.neighbors(i) {
            if color[j] != usize::MAX {
                used[color[j]] = true;
            }
        }
        let c = used.iter().position(|&u| !u).unwrap();
        if c == classes.len() {
            classes.push(Vec::new());
        }
        color[i] = c;
        classes[c].push(i);
    }
    for class in &mut classes {
        class.sort_unstable();
    }
    SweepPlan { classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparsify::sparsify;

    fn path(n: usize) -> IsingModel {
        let mut m = IsingModel::new(n);
        for i in 0..n - 1 {
            m.set_coupling(i, i + 1, -1.0).unwrap();
        }
        m
    }

    fn complete(n: usize) -> IsingModel {
        let mut m = IsingModel::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set_coupling(i, j, -1.0).unwrap();
            }
        }
        m
    }

    #[test]
    fn path_graph_two_classes() {
        let m = path(6);
        let plan = color_graph(&m);
        assert_eq!(plan.class_count(), 2);
        plan.validate(&m).unwrap();
    }

    #[test]
    fn complete_graph_n_classes() {
        let m = complete(7);
        let plan = color_graph(&m);
        assert_eq!(plan.class_count(), 7);
        plan.validate(&m).unwrap();
    }

    #[test]
    fn sparsified_clique_meets_greedy_bound() {
        // 5-node all-to-all sparsified at k=3: at most 4 classes.
        let emb = sparsify(&complete(5), 3, 4.0).unwrap();
        let plan = color_graph(emb.physical());
        assert!(plan.class_count() <= 4, "{} classes", plan.class_count());
        plan.validate(emb.physical()).unwrap();
    }

    #[test]
    fn greedy_bound_on_random_sparsifications() {
        for seed in 0..5 {
            let dense = crate::model::generate_er_maxcut(
                &crate::model::InstanceSpec::new(14, 0.75, seed).unwrap(),
            )
            .unwrap();
            let emb = sparsify(&dense, 5, 2.0).unwrap();
            let plan = color_graph(emb.physical());
            plan.validate(emb.physical()).unwrap();
            assert!(plan.class_count() <= 6);
        }
    }

    #[test]
    fn determinism() {
        let m = path(9);
        assert_eq!(color_graph(&m), color_graph(&m));
    }

    #[test]
    fn validate_rejects_improper_plans() {
        let m = path(3);
        // Edge (0, 1) inside one class.
        let bad = SweepPlan::new(vec![vec![0, 1], vec![2]], 3).unwrap();
        assert!(matches!(bad.validate(&m), Err(Error::ImproperColoring(_))));
        // Missing node.
        assert!(SweepPlan::new(vec![vec![0], vec![2]], 3).is_err());
        // Duplicate node.
        assert!(SweepPlan::new(vec![vec![0, 1], vec![1, 2]], 3).is_err());
    }

    #[test]
    fn sequential_plan_covers_all() {
        let plan = SweepPlan::sequential(5);
        assert_eq!(plan.class_count(), 5);
        plan.validate(&path(5)).unwrap();
    }
}
