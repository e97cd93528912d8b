//! Clustering quality metrics and structural measures: SSE, optimal-matching
//! clustering distance, cluster cores, silhouette, and Davies-Bouldin.
//!
//! The engines use squared Euclidean distances throughout; silhouette and
//! Davies-Bouldin use plain Euclidean per their conventional definitions.

use crate::dataset::GroupedDataset;
use crate::error::Error;
use crate::scalar::{sq_dist, sq_dist_points, Scalar};
use crate::Result;

/// SSE of an assignment against fixed centers, summed in point order.
pub(crate) fn sse_with_centers<S: Scalar>(
    dataset: &GroupedDataset<S>,
    assignment: &[usize],
    centers: &[Vec<f64>],
) -> f64 {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(dataset.point(i), &centers[c]))
        .sum()
}

/// Mean centers derived from an assignment; empty clusters get a zero
/// vector (they contribute nothing to the objective).
pub(crate) fn derived_centers<S: Scalar>(
    dataset: &GroupedDataset<S>,
    assignment: &[usize],
    k: usize,
) -> Vec<Vec<f64>> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }
    members
        .iter()
        .map(|mem| {
            if mem.is_empty() {
                vec![0.0; dataset.dim()]
            } else {
                dataset.mean_of(mem)
            }
        })
        .collect()
}

/// Sum of squared Euclidean distances from each point to its assigned
/// center. When `centers` is `None` the per-cluster means are derived from
/// the assignment, which is the minimizing choice for the given partition.
pub fn sse<S: Scalar>(
    dataset: &GroupedDataset<S>,
    assignment: &[usize],
    centers: Option<&[Vec<f64>]>,
) -> f64 {
    assert_eq!(assignment.len(), dataset.n());
    match centers {
        Some(c) => sse_with_centers(dataset, assignment, c),
        None => {
            let k = assignment.iter().max().map_or(1, |&c| c + 1);
            let means = derived_centers(dataset, assignment, k);
            sse_with_centers(dataset, assignment, &means)
        }
    }
}

/// Result of matching the clusters of one clustering onto another.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// Fraction of points on which the clusterings disagree under the
    /// optimal cluster bijection; in [0, 1].
    pub distance: f64,
    /// The minimizing bijection: cluster i of the first clustering maps to
    /// `matching[i]` of the second.
    pub matching: Vec<usize>,
    /// Total disagreeing points under the matching.
    pub disagreements: usize,
}

/// Exact minimum-cost assignment on a square integer cost matrix
/// (Hungarian algorithm with potentials, O(k^3)).
fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // column -> row, 1-based
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut min_v = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < min_v[j] {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[matched_row[j] - 1] = j - 1;
    }
    row_to_col
}

/// Fraction of points two clusterings disagree on under the optimal
/// bijection of their clusters, solved exactly as a minimum-cost perfect
/// matching on the k x k disagreement matrix.
///
/// Both clusterings must label the same n points with ids below the same k.
pub fn clustering_distance(a: &[usize], b: &[usize], k: usize) -> Result<MatchResult> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "clusterings cover different point counts: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::invalid("clusterings must cover at least one point"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if let Some(&bad) = a.iter().chain(b).find(|&&c| c >= k) {
        return Err(Error::invalid(format!(
            "cluster id {bad} out of range for k={k}"
        )));
    }
    let n = a.len();
    let mut overlap = vec![vec![0i64; k]; k];
    let mut size_a = vec![0i64; k];
    for i in 0..n {
        overlap[a[i]][b[i]] += 1;
        size_a[a[i]] += 1;
    }
    // |A_i - B_j| = |A_i| - |A_i ∩ B_j|
    let cost: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| size_a[i] - overlap[i][j]).collect())
        .collect();
    let matching = hungarian_min(&cost);
    let disagreements: i64 = matching.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok(MatchResult {
        distance: disagreements as f64 / n as f64,
        matching,
        disagreements: disagreements as usize,
    })
}

/// Core members of every cluster.
#[derive(Debug, Clone)]
pub struct CoreReport {
    /// Per-cluster core member indices, sorted ascending.
    pub cores: Vec<Vec<usize>>,
    /// Per-cluster |core| / N.
    pub fractions: Vec<f64>,
}

impl CoreReport {
    /// Smallest per-cluster core fraction, the epsilon' of the structure
    /// guarantee.
    pub fn min_fraction(&self) -> f64 {
        self.fractions.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// The maximal subset of each cluster that every member of the cluster is
/// strictly closer to than to any point outside the cluster:
/// z is in core(C_i) iff for every x in C_i, d(x, z) < min over y outside
/// C_i of d(x, y). Squared Euclidean distances (the predicate is invariant
/// under monotone transforms). With a single cluster the condition is
/// vacuous and the core is the whole cluster.
pub fn cluster_cores<S: Scalar>(dataset: &GroupedDataset<S>, assignment: &[usize]) -> CoreReport {
    assert_eq!(assignment.len(), dataset.n());
    let n = dataset.n();
    let k = assignment.iter().max().map_or(1, |&c| c + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }

    let mut cores = Vec::with_capacity(k);
    let mut fractions = Vec::with_capacity(k);
    for (cluster, inside) in members.iter().enumerate() {
        // Per member x: the distance to the nearest outside point.
        let mut nearest_outside = vec![f64::INFINITY; inside.len()];
        for (xi, &x) in inside.iter().enumerate() {
            for (y, &cy) in assignment.iter().enumerate() {
                if cy != cluster {
                    let d = sq_dist_points(dataset.point(x), dataset.point(y));
                    if d < nearest_outside[xi] {
                        nearest_outside[xi] = d;
                    }
                }
            }
        }
        let core: Vec<usize> = inside
            .iter()
            .copied()
            .filter(|&z| {
                inside.iter().enumerate().all(|(xi, &x)| {
                    sq_dist_points(dataset.point(x), dataset.point(z)) < nearest_outside[xi]
                })
            })
            .collect();
        fractions.push(core.len() as f64 / n as f64);
        cores.push(core);
    }
    CoreReport { cores, fractions }
}

fn euclid<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    sq_dist_points(a, b).sqrt()
}

/// Nonempty clusters present in an assignment, as (cluster id, members).
fn nonempty_clusters(assignment: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let k = assignment.iter().max().map_or(1, |&c| c + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }
    members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .collect()
}

/// Mean silhouette over all points, plain Euclidean distances.
///
/// Singleton clusters contribute 0, as does any point whose within and
/// between dissimilarities are both 0. Needs at least two nonempty
/// clusters.
pub fn silhouette<S: Scalar>(dataset: &GroupedDataset<S>, assignment: &[usize]) -> Result<f64> {
    assert_eq!(assignment.len(), dataset.n());
    let clusters = nonempty_clusters(assignment);
    if clusters.len() < 2 {
        return Err(Error::MetricUndefined(
            "silhouette needs at least two nonempty clusters".into(),
        ));
    }
    let n = dataset.n();
    let mut total = 0.0f64;
    for (i, &own) in assignment.iter().enumerate() {
        let own_size = clusters
            .iter()
            .find(|(c, _)| *c == own)
            .map(|(_, m)| m.len())
            .unwrap();
        if own_size == 1 {
            continue; // contributes 0
        }
        let mut a = 0.0f64;
        let mut b = f64::INFINITY;
        for (c, members) in &clusters {
            let sum: f64 = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| euclid(dataset.point(i), dataset.point(j)))
                .sum();
            if *c == own {
                a = sum / (own_size - 1) as f64;
            } else {
                b = b.min(sum / members.len() as f64);
            }
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Davies-Bouldin index with Euclidean centroid scatter. Lower is better.
///
/// Needs at least two nonempty clusters with pairwise distinct centroids.
pub fn davies_bouldin<S: Scalar>(dataset: &GroupedDataset<S>, assignment: &[usize]) -> Result<f64> {
    assert_eq!(assignment.len(), dataset.n());
    let clusters = nonempty_clusters(assignment);
    if clusters.len() < 2 {
        return Err(Error::MetricUndefined(
            "Davies-Bouldin needs at least two nonempty clusters".into(),
        ));
    }
    let centroids: Vec<Vec<f64>> = clusters
        .iter()
        .map(|(_, members)| dataset.mean_of(members))
        .collect();
    let scatter: Vec<f64> = clusters
        .iter()
        .zip(&centroids)
        .map(|((_, members), centroid)| {
            members
                .iter()
                .map(|&i| sq_dist(dataset.point(i), centroid).sqrt())
                .sum::<f64>()
                / members.len() as f64
        })
        .collect();

    let q = clusters.len();
    let mut total = 0.0f64;
    for i in 0..q {
        let mut worst = 0.0f64;
        for j in 0..q {
            if i == j {
                continue;
            }
            let between: f64 = centroids[i]
                .iter()
                .zip(&centroids[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if between == 0.0 {
                return Err(Error::MetricUndefined(
                    "Davies-Bouldin is undefined for coincident centroids".into(),
                ));
            }
            worst = worst.max((scatter[i] + scatter[j]) / between);
        }
        total += worst;
    }
    Ok(total / q as f64)
}
