//! Exhaustive search for the optimal clustering of tiny instances.
//!
//! Enumerates every partition of the points into exactly k nonempty
//! clusters in canonical form (cluster ids appear in first-use order, which
//! removes the k! relabeling redundancy), scores each candidate by SSE
//! against its mean centers, and keeps the minimum. The value of this
//! module is its obvious correctness; there is no pruning beyond the
//! canonical form.

use crate::analysis::{derived_centers, sse_with_centers};
use crate::clustering::is_rt_accordant;
use crate::dataset::GroupedDataset;
use crate::error::Error;
use crate::scalar::Scalar;
use crate::Result;

/// Enumeration budget: instances must satisfy k^N <= this.
pub const ENUMERATION_BUDGET: f64 = 1e8;

/// An exhaustively verified optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub sse: f64,
    /// Canonical assignment: cluster ids appear in first-use order; on SSE
    /// ties this is the lexicographically smallest optimal assignment.
    pub assignment: Vec<usize>,
}

/// Outcome of the constrained search.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Optimal(OracleSolution),
    /// No (r,t)-accordant clustering into k nonempty clusters exists.
    Infeasible,
}

impl OracleOutcome {
    pub fn solution(&self) -> Option<&OracleSolution> {
        match self {
            OracleOutcome::Optimal(s) => Some(s),
            OracleOutcome::Infeasible => None,
        }
    }
}

fn check_budget(n: usize, k: usize) -> Result<()> {
    let required = (k as f64).powi(n as i32);
    if required > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Visit every canonical assignment of `n` points into exactly `k` nonempty
/// clusters, in lexicographic order.
fn enumerate_surjective(n: usize, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut assignment = vec![0usize; n];
    descend(&mut assignment, 0, 0, k, visit);
}

fn descend(
    assignment: &mut Vec<usize>,
    position: usize,
    used: usize,
    k: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    let n = assignment.len();
    if position == n {
        if used == k {
            visit(assignment);
        }
        return;
    }
    // Remaining positions must still be able to open the missing clusters.
    let remaining = n - position;
    let missing = k - used;
    if missing > remaining {
        return;
    }
    let limit = (used + 1).min(k);
    for label in 0..limit {
        assignment[position] = label;
        let next_used = used.max(label + 1);
        descend(assignment, position + 1, next_used, k, visit);
    }
}

fn search<S: Scalar>(
    dataset: &GroupedDataset<S>,
    k: usize,
    mut accept: impl FnMut(&[usize]) -> bool,
) -> Option<OracleSolution> {
    let mut best: Option<OracleSolution> = None;
    enumerate_surjective(dataset.n(), k, &mut |assignment| {
        if !accept(assignment) {
            return;
        }
        let centers = derived_centers(dataset, assignment, k);
        let sse = sse_with_centers(dataset, assignment, &centers);
        // Strict comparison keeps the lexicographically smallest optimum.
        if best.as_ref().is_none_or(|b| sse < b.sse) {
            best = Some(OracleSolution {
                sse,
                assignment: assignment.to_vec(),
            });
        }
    });
    best
}

/// The optimal (r,t)-accordant clustering into k nonempty clusters, or
/// `Infeasible` when none exists. Infeasibility is cross-checked against
/// the closed-form feasibility bound.
pub fn optimal_accordant<S: Scalar>(
    dataset: &GroupedDataset<S>,
    k: usize,
    r: usize,
    t: f64,
) -> Result<OracleOutcome> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if r > dataset.m() {
        return Err(Error::invalid(format!(
            "r must lie in 0..={} (group count), got {r}",
            dataset.m()
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("t must lie in [0, 1], got {t}")));
    }
    check_budget(dataset.n(), k)?;
    let best = search(dataset, k, |assignment| {
        is_rt_accordant(assignment, dataset, r, t)
    });
    match best {
        Some(solution) => Ok(OracleOutcome::Optimal(solution)),
        None => {
            let max_k = crate::akmeans::feasible_k_range(dataset, r, t);
            assert!(
                k > max_k,
                "enumeration found no accordant clustering at k={k} although the \
                 feasibility bound allows up to {max_k}"
            );
            Ok(OracleOutcome::Infeasible)
        }
    }
}

/// The optimal unconstrained clustering into k nonempty clusters.
pub fn optimal_unconstrained<S: Scalar>(
    dataset: &GroupedDataset<S>,
    k: usize,
) -> Result<OracleSolution> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > dataset.n() {
        return Err(Error::invalid(format!(
            "k={k} exceeds the point count {}; no partition into k nonempty clusters exists",
            dataset.n()
        )));
    }
    check_budget(dataset.n(), k)?;
    Ok(search(dataset, k, |_| true).expect("k <= n guarantees at least one partition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::akmeans::feasible_k_range;

    fn ds(points: Vec<f64>, groups: Vec<usize>) -> GroupedDataset<f64> {
        GroupedDataset::new(points, 1, groups).unwrap()
    }

    #[test]
    fn enumeration_counts_match_stirling_numbers() {
        // S(4,2) = 7, S(5,3) = 25, S(6,3) = 90.
        for (n, k, expected) in [(4, 2, 7), (5, 3, 25), (6, 3, 90)] {
            let mut count = 0usize;
            enumerate_surjective(n, k, &mut |_| count += 1);
            assert_eq!(count, expected, "S({n},{k})");
        }
    }

    #[test]
    fn enumeration_is_canonical_and_lexicographic() {
        let mut seen: Vec<Vec<usize>> = Vec::new();
        enumerate_surjective(4, 2, &mut |a| seen.push(a.to_vec()));
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
        for a in &seen {
            assert_eq!(a[0], 0, "first-use order starts at 0");
            let mut max_seen = 0usize;
            for &v in a {
                assert!(v <= max_seen + 1);
                max_seen = max_seen.max(v);
            }
        }
    }

    #[test]
    fn k_one_is_the_total_scatter() {
        let data = ds(vec![0.0, 1.0, 2.0], vec![0, 0, 1]);
        let out = optimal_accordant(&data, 1, 1, 1.0).unwrap();
        let sol = out.solution().unwrap();
        assert_eq!(sol.assignment, vec![0, 0, 0]);
        assert!((sol.sse - 2.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_reaches_zero() {
        let data = ds(vec![0.0, 5.0, 9.0], vec![0, 0, 1]);
        let sol = optimal_unconstrained(&data, 3).unwrap();
        assert_eq!(sol.sse, 0.0);
    }

    #[test]
    fn zero_t_filter_passes_everything() {
        let data = ds(vec![0.0, 1.0, 7.0, 8.0, 20.0], vec![0, 1, 0, 1, 0]);
        let constrained = optimal_accordant(&data, 2, 1, 0.0).unwrap();
        let unconstrained = optimal_unconstrained(&data, 2).unwrap();
        assert_eq!(constrained.solution().unwrap(), &unconstrained);
    }

    #[test]
    fn constraint_can_strictly_raise_the_optimum() {
        // Interleaved groups on a line: every low-SSE 2-split separates
        // both groups, so forcing t=1 accordance costs strictly more.
        let data = ds(vec![0.0, 0.1, 5.0, 5.1, 10.0, 10.1], vec![0, 1, 0, 1, 0, 1]);
        let free = optimal_unconstrained(&data, 2).unwrap();
        let constrained = optimal_accordant(&data, 2, 1, 1.0).unwrap();
        let constrained = constrained.solution().unwrap();
        assert!(constrained.sse >= free.sse);
        assert!(!is_rt_accordant(&free.assignment, &data, 1, 1.0));
        assert!(constrained.sse > free.sse);
        assert!(is_rt_accordant(&constrained.assignment, &data, 1, 1.0));
    }

    #[test]
    fn infeasibility_agrees_with_the_bound() {
        let data = ds((0..7).map(f64::from).collect(), vec![0, 0, 0, 1, 1, 1, 1]);
        let max_k = feasible_k_range(&data, 2, 1.0);
        assert_eq!(max_k, 2);
        assert!(matches!(
            optimal_accordant(&data, 2, 2, 1.0).unwrap(),
            OracleOutcome::Optimal(_)
        ));
        assert_eq!(
            optimal_accordant(&data, 3, 2, 1.0).unwrap(),
            OracleOutcome::Infeasible
        );
    }

    #[test]
    fn budget_is_enforced() {
        let n = 32;
        let data = ds((0..n).map(|i| i as f64).collect(), vec![0; n]);
        let err = optimal_accordant(&data, 4, 1, 0.5).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
