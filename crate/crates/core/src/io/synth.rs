//! Synthetic benchmark generation: isotropic Gaussian components with a
//! group overlay and known planted labels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::GroupedDataset;
use crate::error::Error;
use crate::Result;

/// One isotropic Gaussian component.
#[derive(Debug, Clone)]
pub struct Component {
    pub center: Vec<f64>,
    pub stddev: f64,
    pub count: usize,
}

/// Rule mapping each generated point to a group.
#[derive(Debug, Clone)]
pub enum Overlay {
    /// Group = component index.
    ByComponent,
    /// Per-component optional threshold on one coordinate: a component with
    /// `Some(cut)` splits into two groups (coordinate <= cut, > cut); with
    /// `None` it keeps a single group.
    Split { dim: usize, cuts: Vec<Option<f64>> },
}

/// Full generator specification. Output depends only on the spec and seed;
/// sampling runs on a ChaCha8 stream so results are identical everywhere.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub components: Vec<Component>,
    pub overlay: Overlay,
    pub seed: u64,
}

/// Generated dataset plus the planted component label of every point.
#[derive(Debug, Clone)]
pub struct Synthesized {
    pub dataset: GroupedDataset<f64>,
    pub planted: Vec<usize>,
}

pub fn generate(spec: &SynthSpec) -> Result<Synthesized> {
    if spec.components.is_empty() {
        return Err(Error::invalid("at least one component required"));
    }
    let dim = spec.components[0].center.len();
    if dim == 0 {
        return Err(Error::invalid(
            "component centers must have at least one coordinate",
        ));
    }
    for (i, c) in spec.components.iter().enumerate() {
        if c.center.len() != dim {
            return Err(Error::invalid(format!(
                "component {i} has {} coordinates, expected {dim}",
                c.center.len()
            )));
        }
        if !c.stddev.is_finite() || c.stddev <= 0.0 {
            return Err(Error::invalid(format!(
                "component {i}: stddev must be positive"
            )));
        }
        if c.count == 0 {
            return Err(Error::invalid(format!(
                "component {i}: count must be at least 1"
            )));
        }
    }
    if let Overlay::Split {
        dim: split_dim,
        cuts,
    } = &spec.overlay
    {
        if *split_dim >= dim {
            return Err(Error::invalid(format!(
                "split dimension {split_dim} out of range for {dim} coordinates"
            )));
        }
        if cuts.len() != spec.components.len() {
            return Err(Error::invalid(format!(
                "expected {} cut entries, got {}",
                spec.components.len(),
                cuts.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut points = Vec::new();
    let mut planted = Vec::new();
    let mut labels = Vec::new();
    for (comp_idx, comp) in spec.components.iter().enumerate() {
        let normal = Normal::new(0.0, comp.stddev).expect("stddev validated above");
        for _ in 0..comp.count {
            let row: Vec<f64> = comp
                .center
                .iter()
                .map(|&c| c + normal.sample(&mut rng))
                .collect();
            let label = match &spec.overlay {
                Overlay::ByComponent => format!("g{comp_idx}"),
                Overlay::Split { dim, cuts } => match cuts[comp_idx] {
                    None => format!("g{comp_idx}"),
                    Some(cut) => {
                        if row[*dim] <= cut {
                            format!("g{comp_idx}-lo")
                        } else {
                            format!("g{comp_idx}-hi")
                        }
                    }
                },
            };
            points.extend_from_slice(&row);
            planted.push(comp_idx);
            labels.push(label);
        }
    }
    let dataset = GroupedDataset::from_labels(points, dim, &labels)?;
    Ok(Synthesized { dataset, planted })
}
