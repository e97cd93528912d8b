//! Dataset ingestion, synthetic benchmark generation, and result
//! serialization.

mod csv;
mod result;
mod synth;

pub use csv::{load_csv, ColumnSelector, IngestConfig};
pub use result::{
    read_result, write_result, AccordantGroupRecord, ResultFile, ResultMetrics, ResultParams,
};
pub use synth::{generate, Component, Overlay, SynthSpec, Synthesized};
