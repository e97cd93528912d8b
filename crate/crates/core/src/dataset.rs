//! Grouped dataset: points plus a predefined group label per point.

use crate::error::Error;
use crate::scalar::Scalar;
use crate::Result;

/// A dense matrix of `n` points with `dim` features each, where every point
/// carries exactly one group identifier in `0..m`.
///
/// Group ids are dense integers assigned in first-appearance order during
/// ingestion; the original labels are retained for reporting. The per-group
/// member index is derived once at construction and kept sorted, so lookups
/// are cheap and iteration order is deterministic.
///
/// Immutable after construction; safe to share across restart workers.
#[derive(Debug, Clone)]
pub struct GroupedDataset<S: Scalar> {
    points: Vec<S>,
    n: usize,
    dim: usize,
    group_of: Vec<usize>,
    group_index: Vec<Vec<usize>>,
    group_labels: Vec<String>,
}

impl<S: Scalar> GroupedDataset<S> {
    /// Build a dataset from row-major `points` and dense group ids.
    ///
    /// `group_of[i]` is the group of point `i`; ids must cover `0..m` with no
    /// gaps. Feature values must all be finite.
    pub fn new(points: Vec<S>, dim: usize, group_of: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if points.is_empty() {
            return Err(Error::invalid("dataset must contain at least one point"));
        }
        if !points.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "point buffer length {} is not a multiple of dim {}",
                points.len(),
                dim
            )));
        }
        let n = points.len() / dim;
        if group_of.len() != n {
            return Err(Error::invalid(format!(
                "expected {} group ids, got {}",
                n,
                group_of.len()
            )));
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite feature value at row {}, column {}",
                pos / dim,
                pos % dim
            )));
        }
        let m = group_of.iter().max().copied().unwrap_or(0) + 1;
        let mut group_index: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (i, &g) in group_of.iter().enumerate() {
            group_index[g].push(i);
        }
        if let Some(g) = group_index.iter().position(Vec::is_empty) {
            return Err(Error::invalid(format!(
                "group ids are not dense: group {g} has no members"
            )));
        }
        let group_labels = (0..m).map(|g| g.to_string()).collect();
        Ok(Self {
            points,
            n,
            dim,
            group_of,
            group_index,
            group_labels,
        })
    }

    /// Build a dataset from arbitrary group labels, densifying them into
    /// integer ids in first-appearance order.
    pub fn from_labels<L: AsRef<str>>(points: Vec<S>, dim: usize, labels: &[L]) -> Result<Self> {
        let mut seen: Vec<String> = Vec::new();
        let mut ids = Vec::with_capacity(labels.len());
        for label in labels {
            let label = label.as_ref();
            let id = match seen.iter().position(|s| s == label) {
                Some(id) => id,
                None => {
                    seen.push(label.to_string());
                    seen.len() - 1
                }
            };
            ids.push(id);
        }
        let mut ds = Self::new(points, dim, ids)?;
        ds.group_labels = seen;
        Ok(ds)
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Feature dimensionality.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of groups.
    pub fn m(&self) -> usize {
        self.group_index.len()
    }

    /// Feature row of point `i`.
    pub fn point(&self, i: usize) -> &[S] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Group id of point `i`.
    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    /// All group ids, indexed by point.
    pub fn groups(&self) -> &[usize] {
        &self.group_of
    }

    /// Sorted member point indices of group `g`.
    pub fn group_members(&self, g: usize) -> &[usize] {
        &self.group_index[g]
    }

    /// Size of group `g`.
    pub fn group_size(&self, g: usize) -> usize {
        self.group_index[g].len()
    }

    /// Sizes of all groups, indexed by group id.
    pub fn group_sizes(&self) -> Vec<usize> {
        self.group_index.iter().map(Vec::len).collect()
    }

    /// Original label of group `g` (its id rendered as text when the dataset
    /// was built from pre-densified ids).
    pub fn group_label(&self, g: usize) -> &str {
        &self.group_labels[g]
    }

    /// The raw row-major feature buffer.
    pub fn raw_points(&self) -> &[S] {
        &self.points
    }

    /// Mean of the given point rows, accumulated in f64.
    pub(crate) fn mean_of(&self, members: &[usize]) -> Vec<f64> {
        let mut mean = vec![0.0f64; self.dim];
        for &i in members {
            for (acc, &v) in mean.iter_mut().zip(self.point(i)) {
                *acc += v.as_f64();
            }
        }
        let count = members.len() as f64;
        for v in &mut mean {
            *v /= count;
        }
        mean
    }
}
