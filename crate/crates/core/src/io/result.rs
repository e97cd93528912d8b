//! JSON result schema for completed runs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::{forced_count, Clustering};
use crate::dataset::GroupedDataset;
use crate::params::AccordanceParams;
use crate::scalar::Scalar;
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultParams {
    pub k: usize,
    pub r: usize,
    pub t: f64,
    pub tau: usize,
    pub delta: f64,
    pub restarts: usize,
    pub seed: u64,
    pub init_mode: String,
}

impl From<&AccordanceParams> for ResultParams {
    fn from(p: &AccordanceParams) -> Self {
        Self {
            k: p.k,
            r: p.r,
            t: p.t,
            tau: p.tau,
            delta: p.delta,
            restarts: p.restarts,
            seed: p.seed,
            init_mode: p.init_mode.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccordantGroupRecord {
    pub group: usize,
    pub cluster: usize,
    pub fraction: f64,
    /// ceil(t * n_g): the member count the threshold demands of this group.
    pub forced_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultMetrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub silhouette: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub davies_bouldin: Option<f64>,
}

/// The on-disk record of one run. Floats survive the JSON round trip
/// bit-for-bit, so a re-read reproduces `assignment` and `sse_trace`
/// exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema_version: u32,
    pub params: ResultParams,
    pub n: usize,
    pub m: usize,
    pub rho: usize,
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub sse: f64,
    pub sse_trace: Vec<f64>,
    pub iterations: usize,
    pub accordant_groups: Vec<AccordantGroupRecord>,
    pub metrics: ResultMetrics,
    pub wall_ms: u64,
}

impl ResultFile {
    /// Assemble the record for a finished run.
    pub fn new<S: Scalar>(
        dataset: &GroupedDataset<S>,
        params: &AccordanceParams,
        clustering: &Clustering,
        metrics: ResultMetrics,
        wall_ms: u64,
    ) -> Self {
        let accordant_groups = clustering
            .accordance
            .iter()
            .map(|e| AccordantGroupRecord {
                group: e.group,
                cluster: e.cluster,
                fraction: e.fraction,
                forced_count: forced_count(params.t, dataset.group_size(e.group)),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            params: params.into(),
            n: dataset.n(),
            m: dataset.m(),
            rho: dataset.dim(),
            assignment: clustering.assignment.clone(),
            centers: clustering.centers.clone(),
            sse: clustering.sse,
            sse_trace: clustering.sse_trace.clone(),
            iterations: clustering.iterations,
            accordant_groups,
            metrics,
            wall_ms,
        }
    }
}

/// Write the record as pretty-printed JSON.
pub fn write_result(path: impl AsRef<Path>, result: &ResultFile) -> Result<()> {
    let json = serde_json::to_string_pretty(result)?;
    fs::write(path, json)?;
    Ok(())
}

/// Read a record back.
pub fn read_result(path: impl AsRef<Path>) -> Result<ResultFile> {
    let data = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::akmeans::akmeans_fit;
    use crate::clustering::accordance_report;
    use crate::params::InitMode;
    use rand::SeedableRng;

    fn run() -> (GroupedDataset<f64>, AccordanceParams, Clustering) {
        let points: Vec<f64> = vec![0.0, 0.2, 0.4, 5.0, 5.2, 5.4, 10.0, 10.2, 10.4];
        let dataset = GroupedDataset::new(points, 1, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]).unwrap();
        let params = AccordanceParams::new(3, 1, 0.75)
            .with_seed(11)
            .with_init_mode(InitMode::UniformRandom);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(params.seed);
        let clustering = akmeans_fit(&dataset, &params, &mut rng).unwrap();
        (dataset, params, clustering)
    }

    #[test]
    fn round_trip_reproduces_the_record_exactly() {
        let (dataset, params, clustering) = run();
        let record = ResultFile::new(&dataset, &params, &clustering, ResultMetrics::default(), 3);
        let file = tempfile::NamedTempFile::new().unwrap();
        write_result(file.path(), &record).unwrap();
        let back = read_result(file.path()).unwrap();
        assert_eq!(back, record);
        assert_eq!(back.assignment, clustering.assignment);
        assert_eq!(back.sse_trace, clustering.sse_trace);
    }

    #[test]
    fn trace_length_equals_iterations() {
        let (dataset, params, clustering) = run();
        let record = ResultFile::new(&dataset, &params, &clustering, ResultMetrics::default(), 0);
        assert_eq!(record.sse_trace.len(), record.iterations);
    }

    #[test]
    fn accordant_entries_match_a_fresh_report() {
        let (dataset, params, clustering) = run();
        let record = ResultFile::new(&dataset, &params, &clustering, ResultMetrics::default(), 0);
        let fresh = accordance_report(&record.assignment, &dataset, record.params.t);
        assert_eq!(record.accordant_groups.len(), fresh.len());
        for (rec, rep) in record.accordant_groups.iter().zip(&fresh) {
            assert_eq!(rec.group, rep.group);
            assert_eq!(rec.cluster, rep.cluster);
            assert_eq!(rec.fraction, rep.fraction);
        }
    }
}
