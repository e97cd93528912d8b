//! Run parameters for the clustering engines.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Absolute objective decrease at or below which a run is converged.
pub const DEFAULT_DELTA: f64 = 1e-7;
/// Default iteration cap.
pub const DEFAULT_TAU: usize = 300;

/// Center initialization mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// k distinct points chosen uniformly from the dataset.
    UniformRandom,
    /// One uniform point from each of k uniformly chosen distinct groups.
    DistinctGroups,
}

impl InitMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InitMode::UniformRandom => "uniform",
            InitMode::DistinctGroups => "distinct-groups",
        }
    }
}

impl std::str::FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform-random" => Ok(InitMode::UniformRandom),
            "distinct-groups" => Ok(InitMode::DistinctGroups),
            other => Err(Error::invalid(format!("unknown init mode `{other}`"))),
        }
    }
}

/// Iteration controls shared by the baseline and constrained engines.
#[derive(Debug, Clone, Copy)]
pub struct RunControls {
    /// Maximum number of iterations.
    pub tau: usize,
    /// Minimum objective decrease to continue iterating.
    pub delta: f64,
    /// Center initialization mode.
    pub init_mode: InitMode,
}

impl Default for RunControls {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            delta: DEFAULT_DELTA,
            init_mode: InitMode::DistinctGroups,
        }
    }
}

impl RunControls {
    pub fn validate(&self) -> Result<()> {
        if self.tau < 1 {
            return Err(Error::invalid("tau must be at least 1"));
        }
        if self.delta.is_nan() || self.delta < 0.0 {
            return Err(Error::invalid("delta must be non-negative"));
        }
        Ok(())
    }
}

/// The full (k, r, t) constraint triple plus run controls.
///
/// `r` is the number of distinct groups that must each have at least a `t`
/// fraction of their members inside a single cluster. `restarts` counts
/// independent initializations; the lowest-SSE result is kept.
#[derive(Debug, Clone)]
pub struct AccordanceParams {
    pub k: usize,
    pub r: usize,
    pub t: f64,
    pub tau: usize,
    pub delta: f64,
    pub restarts: usize,
    pub seed: u64,
    pub init_mode: InitMode,
}

impl AccordanceParams {
    /// Parameters with the default run controls (tau=300, delta=1e-7,
    /// one restart, distinct-groups initialization, seed 0).
    pub fn new(k: usize, r: usize, t: f64) -> Self {
        Self {
            k,
            r,
            t,
            tau: DEFAULT_TAU,
            delta: DEFAULT_DELTA,
            restarts: 1,
            seed: 0,
            init_mode: InitMode::DistinctGroups,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_init_mode(mut self, mode: InitMode) -> Self {
        self.init_mode = mode;
        self
    }

    pub fn with_tau(mut self, tau: usize) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Check the parameter invariants against a dataset with `m` groups.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::invalid(format!(
                "t must lie in [0, 1], got {}",
                self.t
            )));
        }
        if self.r > m {
            return Err(Error::invalid(format!(
                "r must lie in 0..={m} (group count), got {}",
                self.r
            )));
        }
        if self.restarts < 1 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        self.controls().validate()
    }

    /// The iteration controls carried by these parameters.
    pub fn controls(&self) -> RunControls {
        RunControls {
            tau: self.tau,
            delta: self.delta,
            init_mode: self.init_mode,
        }
    }

    /// True when the accordance constraint is vacuous and the engine
    /// reduces to plain k-means.
    pub fn is_unconstrained(&self) -> bool {
        self.t == 0.0 || self.r == 0
    }
}
