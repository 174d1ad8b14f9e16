//! Dominance analysis of binary classifier pools over the F-beta family.
//!
//! Curves are evaluated on a log-spaced beta axis. [`curve::dominance_partition`]
//! splits the axis into segments with a single best classifier, and in
//! cross-validation mode [`stats::significance_mask`] marks where that winner
//! beats every competitor under a one-sided paired t-test. [`report`] turns the
//! result into a deterministic SVG plot and JSON/CSV reports.

pub mod analysis;
pub mod cli;
pub mod curve;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod stats;

pub use analysis::{analyze, AnalysisOptions};
pub use curve::{
    all_crossovers, crossover_beta, dominance_partition, evaluate_curve, make_beta_grid, BetaGrid,
    ClassifierRecord, CrossoverPoint, CurveSummary, Mode, Segment,
};
pub use metrics::{f_beta, simple_rates, ConfusionCounts, PointEstimate, RateSet};
pub use report::{
    emit_segments_csv, emit_segments_json, render_svg, RenderOptions, ReportDocument,
};
pub use stats::{paired_t, significance_mask, t_sf, TestResult};
