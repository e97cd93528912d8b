//! The constrained engine: penalty computation, group-center pairing,
//! constrained assignment, and the feasibility bound.
//!
//! Each iteration deviates from plain k-means in one step: before points go
//! to their nearest centers, the engine picks r (group, center) pairs with
//! the lowest penalty sums and pins the cheapest t-fraction of each chosen
//! group to its paired center. Penalties measure the excess objective cost
//! of a non-nearest assignment, so every intermediate clustering satisfies
//! the accordance constraint while the objective keeps decreasing.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::sse_with_centers;
use crate::clustering::{accordance_report, forced_count, Clustering};
use crate::dataset::GroupedDataset;
use crate::error::Error;
use crate::kmeans::{init_centers, kmeans_fit, lloyd_loop, AssignStep};
use crate::params::AccordanceParams;
use crate::scalar::{sq_dist, Scalar};
use crate::Result;

/// Per-iteration distance and penalty matrices, both N x k row-major.
///
/// `penalty(i, j)` is the excess squared distance of sending point `i` to
/// center `j` instead of its nearest center: `D[i][j] - min_s D[i][s]`.
/// Every penalty is non-negative and each row has at least one zero.
#[derive(Debug, Clone)]
pub struct PenaltyMatrix {
    n: usize,
    k: usize,
    distances: Vec<f64>,
    penalties: Vec<f64>,
}

impl PenaltyMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Squared distance from point `i` to center `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.k + j]
    }

    /// Penalty of assigning point `i` to center `j`.
    pub fn penalty(&self, i: usize, j: usize) -> f64 {
        self.penalties[i * self.k + j]
    }

    /// Nearest center of point `i` under the stored distances; ties go to
    /// the lowest center index.
    pub fn nearest(&self, i: usize) -> usize {
        let row = &self.distances[i * self.k..(i + 1) * self.k];
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (j, &d) in row.iter().enumerate() {
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        best
    }

    #[cfg(test)]
    pub(crate) fn from_penalties(n: usize, k: usize, penalties: Vec<f64>) -> Self {
        assert_eq!(penalties.len(), n * k);
        Self {
            n,
            k,
            distances: penalties.clone(),
            penalties,
        }
    }
}

/// One chosen pairing: a group, its paired center, and the pinned members.
#[derive(Debug, Clone)]
pub struct GroupPairing {
    pub group: usize,
    pub center: usize,
    /// The forced_count(t, n_g) members of the group with the smallest
    /// penalties toward the paired center, lowest point index on ties.
    pub forced: Vec<usize>,
    /// Sum of the forced members' penalties.
    pub penalty: f64,
}

/// The r pairings selected for one iteration. Groups are pairwise distinct;
/// centers may repeat.
#[derive(Debug, Clone)]
pub struct PairingPlan {
    pub pairs: Vec<GroupPairing>,
    pub total_penalty: f64,
}

impl PairingPlan {
    /// Pinned-point mask over the dataset.
    pub fn pinned_mask(&self, n: usize) -> Vec<bool> {
        let mut pinned = vec![false; n];
        for pair in &self.pairs {
            for &p in &pair.forced {
                pinned[p] = true;
            }
        }
        pinned
    }
}

/// Largest cluster count admitting an (r,t)-accordant clustering:
/// `N - sum of ceil(t * n_i) over the r smallest groups + r`, clamped to N.
///
/// With `t = 0` or `r = 0` the constraint is vacuous and every `k <= N`
/// is feasible.
pub fn feasible_k_range<S: Scalar>(dataset: &GroupedDataset<S>, r: usize, t: f64) -> usize {
    if r == 0 || t == 0.0 {
        return dataset.n();
    }
    let mut sizes = dataset.group_sizes();
    sizes.sort_unstable();
    let forced_total: usize = sizes[..r].iter().map(|&n_g| forced_count(t, n_g)).sum();
    (dataset.n() - forced_total + r).min(dataset.n())
}

/// Groups ordered by (size, id) ascending; the first r entries are the
/// "r smallest groups" everywhere in this module.
fn groups_by_size<S: Scalar>(dataset: &GroupedDataset<S>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dataset.m()).collect();
    order.sort_by_key(|&g| (dataset.group_size(g), g));
    order
}

/// Build the constructive feasibility witness: a clustering that is
/// (r,t)-accordant whenever `k` lies inside the feasible range.
///
/// With `r >= k`, the forced sets of the k smallest groups occupy one
/// cluster each and every remaining point lands in cluster k-1 (so every
/// group left whole is accordant there). With `r < k`, the r forced sets
/// take clusters 0..r and the rest of the points spread round-robin over
/// the remaining k-r clusters, all nonempty.
pub fn construct_feasible<S: Scalar>(
    dataset: &GroupedDataset<S>,
    k: usize,
    r: usize,
    t: f64,
) -> Result<Clustering> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("t must lie in [0, 1], got {t}")));
    }
    if r > dataset.m() {
        return Err(Error::invalid(format!(
            "r must lie in 0..={} (group count), got {r}",
            dataset.m()
        )));
    }
    let max_k = feasible_k_range(dataset, r, t);
    if k < 1 || k > max_k {
        return Err(Error::Infeasible { k, r, t, max_k });
    }

    let n = dataset.n();
    let assignment = if r == 0 || t == 0.0 {
        (0..n).map(|i| i % k).collect::<Vec<usize>>()
    } else {
        let order = groups_by_size(dataset);
        let mut assignment = vec![usize::MAX; n];
        let pinned_groups = r.min(k);
        for (cluster, &g) in order[..pinned_groups].iter().enumerate() {
            let take = forced_count(t, dataset.group_size(g));
            for &p in &dataset.group_members(g)[..take] {
                assignment[p] = cluster;
            }
        }
        if r >= k {
            for slot in assignment.iter_mut() {
                if *slot == usize::MAX {
                    *slot = k - 1;
                }
            }
        } else {
            let spread = k - r;
            let mut next = 0usize;
            for slot in assignment.iter_mut() {
                if *slot == usize::MAX {
                    *slot = r + next % spread;
                    next += 1;
                }
            }
        }
        assignment
    };

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }
    let centers: Vec<Vec<f64>> = members
        .iter()
        .map(|mem| {
            if mem.is_empty() {
                vec![0.0; dataset.dim()]
            } else {
                dataset.mean_of(mem)
            }
        })
        .collect();
    let sse = sse_with_centers(dataset, &assignment, &centers);
    let accordance = accordance_report(&assignment, dataset, t);
    debug_assert!(accordance.len() >= r, "witness must be (r,t)-accordant");
    Ok(Clustering {
        assignment,
        centers,
        sse,
        iterations: 0,
        sse_trace: Vec::new(),
        accordance,
    })
}

/// Squared distances from every point to every center, and the derived
/// penalties.
pub fn compute_penalties<S: Scalar>(
    dataset: &GroupedDataset<S>,
    centers: &[Vec<f64>],
) -> PenaltyMatrix {
    let n = dataset.n();
    let k = centers.len();
    let mut distances = vec![0.0f64; n * k];
    let mut penalties = vec![0.0f64; n * k];
    for i in 0..n {
        let p = dataset.point(i);
        let row = &mut distances[i * k..(i + 1) * k];
        let mut min = f64::INFINITY;
        for (j, c) in centers.iter().enumerate() {
            let d = sq_dist(p, c);
            row[j] = d;
            if d < min {
                min = d;
            }
        }
        for j in 0..k {
            penalties[i * k + j] = row[j] - min;
        }
    }
    PenaltyMatrix {
        n,
        k,
        distances,
        penalties,
    }
}

/// Pick the r cheapest (group, center) pairings.
///
/// The cost of pairing group g with center j is the sum of the
/// forced_count(t, n_g) smallest penalties toward j among g's members,
/// ties broken by lower point index. Pairs are taken in ascending
/// (cost, group, center) order, skipping groups already taken; centers may
/// repeat across pairs.
pub fn select_pairings<S: Scalar>(
    penalties: &PenaltyMatrix,
    dataset: &GroupedDataset<S>,
    r: usize,
    t: f64,
) -> PairingPlan {
    let k = penalties.k();
    let mut candidates: Vec<GroupPairing> = Vec::with_capacity(dataset.m() * k);
    for g in 0..dataset.m() {
        let members = dataset.group_members(g);
        let take = forced_count(t, members.len());
        for j in 0..k {
            let mut order = members.to_vec();
            order.sort_unstable_by(|&a, &b| {
                penalties
                    .penalty(a, j)
                    .total_cmp(&penalties.penalty(b, j))
                    .then(a.cmp(&b))
            });
            order.truncate(take);
            let cost: f64 = order.iter().map(|&p| penalties.penalty(p, j)).sum();
            candidates.push(GroupPairing {
                group: g,
                center: j,
                forced: order,
                penalty: cost,
            });
        }
    }
    candidates.sort_by(|a, b| {
        a.penalty
            .total_cmp(&b.penalty)
            .then(a.group.cmp(&b.group))
            .then(a.center.cmp(&b.center))
    });

    let mut taken = vec![false; dataset.m()];
    let mut pairs = Vec::with_capacity(r);
    for pair in candidates {
        if pairs.len() == r {
            break;
        }
        if taken[pair.group] {
            continue;
        }
        taken[pair.group] = true;
        pairs.push(pair);
    }
    let total_penalty = pairs.iter().map(|p| p.penalty).sum();
    PairingPlan {
        pairs,
        total_penalty,
    }
}

struct ConstrainedAssign {
    r: usize,
    t: f64,
}

impl<S: Scalar> AssignStep<S> for ConstrainedAssign {
    fn assign(
        &mut self,
        dataset: &GroupedDataset<S>,
        centers: &[Vec<f64>],
    ) -> (Vec<usize>, Vec<bool>) {
        let penalties = compute_penalties(dataset, centers);
        let plan = select_pairings(&penalties, dataset, self.r, self.t);
        let mut assignment: Vec<usize> = (0..dataset.n()).map(|i| penalties.nearest(i)).collect();
        let pinned = plan.pinned_mask(dataset.n());
        for pair in &plan.pairs {
            for &p in &pair.forced {
                assignment[p] = pair.center;
            }
        }
        (assignment, pinned)
    }
}

/// One constrained fit from one initialization.
///
/// Every intermediate assignment satisfies the (r,t) constraint, the
/// objective trace is non-increasing, and with a vacuous constraint
/// (`t = 0` or `r = 0`) the run is bit-for-bit the baseline k-means run
/// under the same RNG state.
pub fn akmeans_fit<S: Scalar, R: Rng>(
    dataset: &GroupedDataset<S>,
    params: &AccordanceParams,
    rng: &mut R,
) -> Result<Clustering> {
    params.validate(dataset.m())?;
    if params.is_unconstrained() {
        let mut fit = kmeans_fit(dataset, params.k, &params.controls(), rng)?;
        fit.accordance = accordance_report(&fit.assignment, dataset, params.t);
        return Ok(fit);
    }
    let max_k = feasible_k_range(dataset, params.r, params.t);
    if params.k > max_k {
        return Err(Error::Infeasible {
            k: params.k,
            r: params.r,
            t: params.t,
            max_k,
        });
    }
    let init = init_centers(dataset, params.k, params.init_mode, rng)?;
    let mut step = ConstrainedAssign {
        r: params.r,
        t: params.t,
    };
    let outcome = lloyd_loop(
        dataset,
        params.k,
        &params.controls(),
        init.centers(dataset),
        &mut step,
    );
    let accordance = accordance_report(&outcome.assignment, dataset, params.t);
    debug_assert!(accordance.len() >= params.r);
    Ok(Clustering {
        iterations: outcome.sse_trace.len(),
        assignment: outcome.assignment,
        centers: outcome.centers,
        sse: outcome.sse,
        sse_trace: outcome.sse_trace,
        accordance,
    })
}

/// Best of `params.restarts` independent fits.
///
/// Per-restart seeds are drawn from `rng` up front and each restart runs on
/// its own ChaCha8 stream, so the result is deterministic given the seed no
/// matter how the restarts are scheduled. Ties on SSE keep the lowest
/// restart index.
pub fn akmeans_restarts<S: Scalar, R: Rng>(
    dataset: &GroupedDataset<S>,
    params: &AccordanceParams,
    rng: &mut R,
) -> Result<Clustering> {
    params.validate(dataset.m())?;
    let seeds: Vec<u64> = (0..params.restarts).map(|_| rng.random()).collect();
    let runs: Vec<Result<Clustering>> = seeds
        .into_par_iter()
        .map(|seed| {
            let mut worker = ChaCha8Rng::seed_from_u64(seed);
            akmeans_fit(dataset, params, &mut worker)
        })
        .collect();

    let mut best: Option<Clustering> = None;
    for run in runs {
        let fit = run?;
        let better = best.as_ref().is_none_or(|b| fit.sse < b.sse);
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("restarts >= 1"))
}
