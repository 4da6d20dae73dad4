//! Driver for the integral modular data classification pipeline.

pub mod pipeline;
pub mod report;

pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, Stage};
pub use report::{build_report, diff_fixtures, Divergence, SummaryReport};
