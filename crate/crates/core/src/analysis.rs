//! The full pool analysis: grid, curves, crossovers, segments and significance.

use thiserror::Error;

use crate::curve::{
    all_crossovers, dominance_partition, evaluate_curve, make_beta_grid, validate_pool,
    ClassifierRecord, CurveError, Mode, DEFAULT_BETA_MAX, DEFAULT_BETA_MIN, DEFAULT_GRID_POINTS,
};
use crate::report::ReportDocument;
use crate::stats::{effective_alpha, significance_mask, StatsError, DEFAULT_ALPHA};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub beta_min: f64,
    pub beta_max: f64,
    pub grid_points: usize,
    pub alpha: f64,
    pub bonferroni: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            beta_min: DEFAULT_BETA_MIN,
            beta_max: DEFAULT_BETA_MAX,
            grid_points: DEFAULT_GRID_POINTS,
            alpha: DEFAULT_ALPHA,
            bonferroni: false,
        }
    }
}

/// Runs every stage on a validated pool. Significance is only computed for
/// cross-validation pools; `alpha` in the result is the level actually applied
/// to each pairwise test.
pub fn analyze(
    pool: &[ClassifierRecord],
    opts: &AnalysisOptions,
) -> Result<ReportDocument, AnalysisError> {
    let grid = make_beta_grid(opts.beta_min, opts.beta_max, opts.grid_points)?;
    let folds = validate_pool(pool)?;
    let mode = Mode::for_fold_count(folds);
    let alpha = effective_alpha(opts.alpha, pool.len(), opts.bonferroni);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidAlpha(opts.alpha).into());
    }

    let mut segments = dominance_partition(pool, &grid)?;
    let curves = pool.iter().map(|r| evaluate_curve(r, &grid)).collect();
    let mut significance_runs = Vec::new();
    let crossovers = match mode {
        Mode::HoldOut => all_crossovers(pool)?,
        Mode::CrossValidation => {
            let sig = significance_mask(pool, &grid, &segments, alpha)?;
            segments = sig.segments;
            significance_runs = sig.runs;
            Vec::new()
        }
    };

    Ok(ReportDocument {
        grid,
        curves,
        records: pool.to_vec(),
        crossovers,
        segments,
        significance_runs,
        alpha,
        mode,
    })
}
