//! Lloyd iteration machinery and the unconstrained k-means baseline.
//!
//! The constrained engine reuses everything here: center initialization,
//! nearest assignment, mean recomputation with empty-cluster repair, and the
//! iteration loop with its convergence and rollback rules. The baseline is
//! the degenerate path the constrained engine reduces to when the accordance
//! constraint is vacuous.

use rand::Rng;

use crate::analysis::sse_with_centers;
use crate::clustering::{accordance_report, Clustering};
use crate::dataset::GroupedDataset;
use crate::error::Error;
use crate::params::{InitMode, RunControls};
use crate::scalar::{sq_dist, Scalar};
use crate::Result;

/// The k distinct point rows chosen as initial centers.
#[derive(Debug, Clone)]
pub struct InitChoice {
    pub center_indices: Vec<usize>,
}

impl InitChoice {
    /// Materialize the chosen rows as f64 centers.
    pub fn centers<S: Scalar>(&self, dataset: &GroupedDataset<S>) -> Vec<Vec<f64>> {
        self.center_indices
            .iter()
            .map(|&i| dataset.point(i).iter().map(|v| v.as_f64()).collect())
            .collect()
    }
}

/// Draw `k` distinct values from `0..n` by partial Fisher-Yates shuffle.
fn sample_distinct<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// Choose k initial centers from the dataset.
///
/// Uniform mode picks k distinct points. Distinct-groups mode picks k
/// uniformly chosen distinct groups and one uniform member from each, so
/// every center starts in a different group. Deterministic given the RNG
/// state.
pub fn init_centers<S: Scalar, R: Rng>(
    dataset: &GroupedDataset<S>,
    k: usize,
    mode: InitMode,
    rng: &mut R,
) -> Result<InitChoice> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > dataset.n() {
        return Err(Error::InitTooManyClusters { k, n: dataset.n() });
    }
    let center_indices = match mode {
        InitMode::UniformRandom => sample_distinct(rng, dataset.n(), k),
        InitMode::DistinctGroups => {
            if k > dataset.m() {
                return Err(Error::InitTooFewGroups { k, m: dataset.m() });
            }
            let groups = sample_distinct(rng, dataset.m(), k);
            groups
                .into_iter()
                .map(|g| {
                    let members = dataset.group_members(g);
                    members[rng.random_range(0..members.len())]
                })
                .collect()
        }
    };
    Ok(InitChoice { center_indices })
}

/// Assign every point to its nearest center by squared Euclidean distance;
/// ties go to the lowest center index.
pub fn assign_nearest<S: Scalar>(dataset: &GroupedDataset<S>, centers: &[Vec<f64>]) -> Vec<usize> {
    (0..dataset.n())
        .map(|i| {
            let p = dataset.point(i);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, c) in centers.iter().enumerate() {
                let d = sq_dist(p, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Recompute cluster means, repairing empty clusters first.
///
/// An empty cluster is re-seeded with the point currently farthest (max
/// squared distance) from its assigned center, taken out of its old cluster
/// before means are finalized; ties resolve to the lowest point index. Only
/// clusters that would keep at least one member donate points. The
/// assignment is updated in place when a repair fires.
pub fn recompute_centers<S: Scalar>(
    dataset: &GroupedDataset<S>,
    assignment: &mut [usize],
    k: usize,
    previous_centers: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let no_pins = vec![false; dataset.n()];
    let (centers, _) = means_with_repair(dataset, assignment, k, previous_centers, &no_pins, true);
    centers
}

/// Shared mean step. `pinned` points are never stolen by the repair rule;
/// with `repair` off, an empty cluster keeps its previous center.
pub(crate) fn means_with_repair<S: Scalar>(
    dataset: &GroupedDataset<S>,
    assignment: &mut [usize],
    k: usize,
    previous_centers: &[Vec<f64>],
    pinned: &[bool],
    repair: bool,
) -> (Vec<Vec<f64>>, bool) {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }
    let mut repaired = false;
    if repair {
        while let Some(empty) = members.iter().position(Vec::is_empty) {
            let mut steal: Option<(f64, usize)> = None;
            for i in 0..dataset.n() {
                if pinned[i] || members[assignment[i]].len() < 2 {
                    continue;
                }
                let d = sq_dist(dataset.point(i), &previous_centers[assignment[i]]);
                if steal.is_none_or(|(best, _)| d > best) {
                    steal = Some((d, i));
                }
            }
            let Some((_, point)) = steal else {
                break; // nothing stealable; the cluster stays empty
            };
            let old = assignment[point];
            members[old].retain(|&p| p != point);
            members[empty].push(point);
            assignment[point] = empty;
            repaired = true;
        }
    }
    let centers = members
        .iter()
        .enumerate()
        .map(|(j, mem)| {
            if mem.is_empty() {
                previous_centers[j].clone()
            } else {
                dataset.mean_of(mem)
            }
        })
        .collect();
    (centers, repaired)
}

/// One assignment step of the iteration loop: produces the assignment and a
/// mask of points pinned against empty-cluster stealing.
pub(crate) trait AssignStep<S: Scalar> {
    fn assign(
        &mut self,
        dataset: &GroupedDataset<S>,
        centers: &[Vec<f64>],
    ) -> (Vec<usize>, Vec<bool>);
}

struct NearestAssign;

impl<S: Scalar> AssignStep<S> for NearestAssign {
    fn assign(
        &mut self,
        dataset: &GroupedDataset<S>,
        centers: &[Vec<f64>],
    ) -> (Vec<usize>, Vec<bool>) {
        (assign_nearest(dataset, centers), vec![false; dataset.n()])
    }
}

pub(crate) struct LloydOutcome {
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub sse: f64,
    pub sse_trace: Vec<f64>,
}

/// Iterate assign/recompute until the objective decrease is at most `delta`
/// or `tau` iterations have run.
///
/// The objective is measured after the mean step of each iteration. If a
/// step ever increases the objective (a float pathology; the update rule is
/// monotone in exact arithmetic), the increasing step is discarded: first by
/// retrying the mean step without empty-cluster repair, then by keeping the
/// previous iteration's clustering outright. Either way the run terminates
/// and the recorded trace stays non-increasing.
pub(crate) fn lloyd_loop<S: Scalar>(
    dataset: &GroupedDataset<S>,
    k: usize,
    controls: &RunControls,
    initial_centers: Vec<Vec<f64>>,
    assign_step: &mut dyn AssignStep<S>,
) -> LloydOutcome {
    let mut state: Option<(Vec<usize>, Vec<Vec<f64>>, f64)> = None;
    let mut trace: Vec<f64> = Vec::new();

    for _ in 0..controls.tau {
        let centers_in = state.as_ref().map_or(&initial_centers, |(_, c, _)| c);
        let (pre_repair, pinned) = assign_step.assign(dataset, centers_in);
        let mut assignment = pre_repair.clone();
        let (centers, repaired) =
            means_with_repair(dataset, &mut assignment, k, centers_in, &pinned, true);
        let sse = sse_with_centers(dataset, &assignment, &centers);
        let candidate = (assignment, centers, sse);

        match &state {
            None => {
                trace.push(candidate.2);
                state = Some(candidate);
            }
            Some((_, _, prev_sse)) => {
                let prev_sse = *prev_sse;
                if candidate.2 > prev_sse {
                    if repaired {
                        let mut no_repair = pre_repair;
                        let (centers0, _) = means_with_repair(
                            dataset,
                            &mut no_repair,
                            k,
                            centers_in,
                            &pinned,
                            false,
                        );
                        let sse0 = sse_with_centers(dataset, &no_repair, &centers0);
                        if sse0 <= prev_sse {
                            trace.push(sse0);
                            state = Some((no_repair, centers0, sse0));
                        }
                    }
                    break;
                }
                let decrease = prev_sse - candidate.2;
                trace.push(candidate.2);
                state = Some(candidate);
                if decrease <= controls.delta {
                    break;
                }
            }
        }
    }

    let (assignment, centers, sse) = state.expect("tau >= 1 runs at least one iteration");
    LloydOutcome {
        assignment,
        centers,
        sse,
        sse_trace: trace,
    }
}

/// Unconstrained k-means via Lloyd iteration.
///
/// Deterministic given the RNG state. The returned accordance field lists
/// every group with its largest-share cluster (threshold 0); callers that
/// care about a specific threshold re-derive the report from the assignment.
pub fn kmeans_fit<S: Scalar, R: Rng>(
    dataset: &GroupedDataset<S>,
    k: usize,
    controls: &RunControls,
    rng: &mut R,
) -> Result<Clustering> {
    controls.validate()?;
    let init = init_centers(dataset, k, controls.init_mode, rng)?;
    let outcome = lloyd_loop(
        dataset,
        k,
        controls,
        init.centers(dataset),
        &mut NearestAssign,
    );
    let accordance = accordance_report(&outcome.assignment, dataset, 0.0);
    Ok(Clustering {
        iterations: outcome.sse_trace.len(),
        assignment: outcome.assignment,
        centers: outcome.centers,
        sse: outcome.sse,
        sse_trace: outcome.sse_trace,
        accordance,
    })
}
