//! Clustering results and the accordance predicate.

use serde::{Deserialize, Serialize};

use crate::dataset::GroupedDataset;
use crate::scalar::Scalar;

/// One group that reached the accordance threshold: at least a `t` fraction
/// of its members sit inside cluster `cluster`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccordantGroup {
    /// Dense group id.
    pub group: usize,
    /// The cluster holding the largest share of the group (ties resolved to
    /// the lowest cluster id).
    pub cluster: usize,
    /// Achieved fraction |C_j ∩ X_g| / n_g.
    pub fraction: f64,
}

/// Output of a clustering engine: assignments, centers, the objective, and
/// the per-iteration trace.
#[derive(Debug, Clone)]
pub struct Clustering {
    /// Per-point cluster id in `0..k`.
    pub assignment: Vec<usize>,
    /// k centers, each of length `dim`.
    pub centers: Vec<Vec<f64>>,
    /// Sum of squared Euclidean distances from points to their assigned
    /// centers.
    pub sse: f64,
    /// Iterations executed; equals `sse_trace.len()`.
    pub iterations: usize,
    /// Objective value after each iteration; non-increasing.
    pub sse_trace: Vec<f64>,
    /// Groups meeting the accordance threshold the run was evaluated at.
    pub accordance: Vec<AccordantGroup>,
}

impl Clustering {
    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.centers.len()
    }

    /// Number of points assigned to each cluster.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k()];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

/// The member count a group of size `n` must place in one cluster to reach
/// threshold `t`: the ceiling of `t * n`, never above `n`.
///
/// Accordance tests compare integer member counts against this value instead
/// of comparing float fractions against `t`, so the threshold is a pure
/// function of `(t, n)` and cannot flip on accumulated rounding. `t` must be
/// finite and in `[0, 1]`.
pub fn forced_count(t: f64, n: usize) -> usize {
    assert!((0.0..=1.0).contains(&t), "t must lie in [0, 1], got {t}");
    ((t * n as f64).ceil() as usize).min(n)
}

/// Per-group member counts over clusters: `counts[g][j]` is |C_j ∩ X_g|.
pub(crate) fn group_cluster_counts<S: Scalar>(
    assignment: &[usize],
    dataset: &GroupedDataset<S>,
    k: usize,
) -> Vec<Vec<usize>> {
    let mut counts = vec![vec![0usize; k]; dataset.m()];
    for (i, &c) in assignment.iter().enumerate() {
        counts[dataset.group_of(i)][c] += 1;
    }
    counts
}

/// Report every group with some cluster fraction `f_j >= t`.
///
/// Each qualifying group appears once, paired with its largest-share cluster
/// (ties go to the lowest cluster id) and the exact achieved fraction. The
/// threshold test uses integer counts: a group qualifies iff its best count
/// reaches `forced_count(t, n_g)`.
pub fn accordance_report<S: Scalar>(
    assignment: &[usize],
    dataset: &GroupedDataset<S>,
    t: f64,
) -> Vec<AccordantGroup> {
    assert_eq!(
        assignment.len(),
        dataset.n(),
        "assignment must cover every point"
    );
    let k = assignment.iter().max().map_or(1, |&c| c + 1);
    let counts = group_cluster_counts(assignment, dataset, k);
    let mut report = Vec::new();
    for (g, row) in counts.iter().enumerate() {
        let (best_cluster, &best_count) = row
            .iter()
            .enumerate()
            .max_by(|(ja, ca), (jb, cb)| ca.cmp(cb).then(jb.cmp(ja)))
            .expect("k >= 1");
        let n_g = dataset.group_size(g);
        if best_count >= forced_count(t, n_g) {
            report.push(AccordantGroup {
                group: g,
                cluster: best_cluster,
                fraction: best_count as f64 / n_g as f64,
            });
        }
    }
    report
}

/// True iff at least `r` distinct groups each have a `t` fraction of their
/// members inside a single cluster.
pub fn is_rt_accordant<S: Scalar>(
    assignment: &[usize],
    dataset: &GroupedDataset<S>,
    r: usize,
    t: f64,
) -> bool {
    accordance_report(assignment, dataset, t).len() >= r
}
