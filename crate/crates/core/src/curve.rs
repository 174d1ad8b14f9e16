//! F-beta curves on a log-spaced beta axis, pairwise crossovers and the
//! dominance partition (upper envelope) of a classifier pool.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{f_beta_unchecked, PointEstimate};

/// Relative beta tolerance used when refining segment boundaries by bisection.
pub const BOUNDARY_RTOL: f64 = 1e-9;

pub const DEFAULT_BETA_MIN: f64 = 0.01;
pub const DEFAULT_BETA_MAX: f64 = 100.0;
pub const DEFAULT_GRID_POINTS: usize = 1001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("invalid beta range [{0}, {1}]: need 0 < beta_min < beta_max")]
    InvalidRange(f64, f64),
    #[error("a beta grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("classifier pool is empty")]
    EmptyPool,
    #[error("classifier name must not be empty")]
    EmptyName,
    #[error("duplicate classifier name {0:?}")]
    DuplicateName(String),
    #[error("classifier {0:?} has no folds")]
    NoFolds(String),
    #[error("classifier {name:?} has {found} folds, expected {expected}")]
    FoldCountMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("identical points have identical curves")]
    DegenerateInput,
    #[error("crossover needs all four rates to be positive")]
    ZeroComponent,
    #[error("classifier {0:?} has more than one fold; crossovers are defined for hold-out pools")]
    NotHoldOutMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "hold-out")]
    HoldOut,
    #[serde(rename = "cross-validation")]
    CrossValidation,
}

impl Mode {
    pub fn for_fold_count(folds: usize) -> Self {
        if folds > 1 {
            Mode::CrossValidation
        } else {
            Mode::HoldOut
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::HoldOut => "hold-out",
            Mode::CrossValidation => "cross-validation",
        }
    }
}

/// Geometric progression of beta values between two positive bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGrid {
    beta_min: f64,
    beta_max: f64,
    points: Vec<f64>,
}

impl BetaGrid {
    pub fn beta_min(&self) -> f64 {
        self.beta_min
    }

    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn make_beta_grid(beta_min: f64, beta_max: f64, n: usize) -> Result<BetaGrid, CurveError> {
    if !(beta_min > 0.0 && beta_max.is_finite() && beta_min < beta_max) {
        return Err(CurveError::InvalidRange(beta_min, beta_max));
    }
    if n < 2 {
        return Err(CurveError::TooFewPoints(n));
    }
    let lo = beta_min.ln();
    let step = (beta_max.ln() - lo) / (n - 1) as f64;
    let mut points: Vec<f64> = (0..n).map(|i| (lo + step * i as f64).exp()).collect();
    points[0] = beta_min;
    points[n - 1] = beta_max;
    if points.windows(2).any(|w| w[0] >= w[1]) {
        // range too narrow for the requested density
        return Err(CurveError::InvalidRange(beta_min, beta_max));
    }
    Ok(BetaGrid {
        beta_min,
        beta_max,
        points,
    })
}

/// A named classifier with its per-fold estimates. One fold means hold-out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierRecord {
    pub name: String,
    pub folds: Vec<PointEstimate>,
}

impl ClassifierRecord {
    pub fn new(name: impl Into<String>, folds: Vec<PointEstimate>) -> Self {
        Self {
            name: name.into(),
            folds,
        }
    }

    pub fn holdout(name: impl Into<String>, point: PointEstimate) -> Self {
        Self::new(name, vec![point])
    }

    /// Mean F-beta over folds at one beta.
    pub fn mean_f_beta(&self, beta: f64) -> f64 {
        let sum: f64 = self.folds.iter().map(|p| f_beta_unchecked(*p, beta)).sum();
        sum / self.folds.len() as f64
    }

    pub fn fold_scores(&self, beta: f64) -> Vec<f64> {
        self.folds
            .iter()
            .map(|p| f_beta_unchecked(*p, beta))
            .collect()
    }
}

/// Checks pool invariants and returns the shared fold count.
pub fn validate_pool(pool: &[ClassifierRecord]) -> Result<usize, CurveError> {
    let first = pool.first().ok_or(CurveError::EmptyPool)?;
    let expected = first.folds.len();
    let mut seen = HashSet::new();
    for rec in pool {
        if rec.name.is_empty() {
            return Err(CurveError::EmptyName);
        }
        if !seen.insert(rec.name.as_str()) {
            return Err(CurveError::DuplicateName(rec.name.clone()));
        }
        if rec.folds.is_empty() {
            return Err(CurveError::NoFolds(rec.name.clone()));
        }
        if rec.folds.len() != expected {
            return Err(CurveError::FoldCountMismatch {
                name: rec.name.clone(),
                expected,
                found: rec.folds.len(),
            });
        }
    }
    Ok(expected)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSummary {
    pub name: String,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Mean and population standard deviation of the per-fold F-beta at each grid point.
pub fn evaluate_curve(rec: &ClassifierRecord, grid: &BetaGrid) -> CurveSummary {
    let n = rec.folds.len() as f64;
    let mut mean = Vec::with_capacity(grid.len());
    let mut std = Vec::with_capacity(grid.len());
    for &beta in grid.points() {
        let scores = rec.fold_scores(beta);
        let m = scores.iter().sum::<f64>() / n;
        let var = if scores.len() > 1 {
            scores.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / n
        } else {
            0.0
        };
        mean.push(m);
        std.push(var.sqrt());
    }
    CurveSummary {
        name: rec.name.clone(),
        mean,
        std,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverPoint {
    pub name_a: String,
    pub name_b: String,
    pub beta: f64,
}

/// Closed-form beta at which the F-beta curves of two points intersect.
///
/// Returns `Ok(None)` when one point dominates the other and the curves never
/// meet at a finite positive beta.
pub fn crossover_beta(a: PointEstimate, b: PointEstimate) -> Result<Option<f64>, CurveError> {
    if [a.ppv, a.tpr, b.ppv, b.tpr].iter().any(|v| !(*v > 0.0)) {
        return Err(CurveError::ZeroComponent);
    }
    if a == b {
        return Err(CurveError::DegenerateInput);
    }
    let radicand = (a.tpr * b.tpr * (b.ppv - a.ppv)) / (a.ppv * b.ppv * (a.tpr - b.tpr));
    if radicand > 0.0 && radicand.is_finite() {
        Ok(Some(radicand.sqrt()))
    } else {
        Ok(None)
    }
}

/// Every finite pairwise crossover of a hold-out pool, ascending by beta.
///
/// Pairs with identical points or a zero rate are skipped: their curves either
/// coincide everywhere or never meet.
pub fn all_crossovers(pool: &[ClassifierRecord]) -> Result<Vec<CrossoverPoint>, CurveError> {
    if let Some(rec) = pool.iter().find(|r| r.folds.len() != 1) {
        return Err(CurveError::NotHoldOutMode(rec.name.clone()));
    }
    let mut out = Vec::new();
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            match crossover_beta(a.folds[0], b.folds[0]) {
                Ok(Some(beta)) => out.push(CrossoverPoint {
                    name_a: a.name.clone(),
                    name_b: b.name.clone(),
                    beta,
                }),
                Ok(None) | Err(CurveError::DegenerateInput) | Err(CurveError::ZeroComponent) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.sort_by(|x, y| {
        x.beta
            .total_cmp(&y.beta)
            .then_with(|| x.name_a.cmp(&y.name_a))
            .then_with(|| x.name_b.cmp(&y.name_b))
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub winner: String,
    pub significant: bool,
}

/// Splits `[beta_min, beta_max]` into maximal intervals with a single best classifier.
///
/// Hold-out pools use exact crossovers; cross-validation pools scan the grid
/// for argmax changes of the mean curve and refine each change by bisection.
pub fn dominance_partition(
    pool: &[ClassifierRecord],
    grid: &BetaGrid,
) -> Result<Vec<Segment>, CurveError> {
    let folds = validate_pool(pool)?;
    if folds == 1 {
        Ok(holdout_partition(pool, grid))
    } else {
        scan_partition(pool, grid)
    }
}

/// Grid-scan route of [`dominance_partition`], usable for any fold count.
pub fn scan_partition(
    pool: &[ClassifierRecord],
    grid: &BetaGrid,
) -> Result<Vec<Segment>, CurveError> {
    validate_pool(pool)?;
    let winners: Vec<usize> = grid
        .points()
        .iter()
        .map(|&beta| argmax_mean(pool, beta))
        .collect();

    let mut segments = Vec::new();
    let mut lo = grid.beta_min();
    let mut current = winners[0];
    for i in 1..winners.len() {
        let next = winners[i];
        if next == current {
            continue;
        }
        let boundary = refine_boundary(
            &pool[current],
            &pool[next],
            grid.points()[i - 1],
            grid.points()[i],
        );
        if boundary > lo {
            segments.push(segment(lo, boundary, &pool[current].name));
            lo = boundary;
        }
        current = next;
    }
    segments.push(segment(lo, grid.beta_max(), &pool[current].name));
    Ok(merge_adjacent(segments))
}

fn segment(lo: f64, hi: f64, winner: &str) -> Segment {
    Segment {
        beta_lo: lo,
        beta_hi: hi,
        winner: winner.to_string(),
        significant: false,
    }
}

fn merge_adjacent(segments: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    for s in segments {
        match out.last_mut() {
            Some(prev) if prev.winner == s.winner => prev.beta_hi = s.beta_hi,
            _ => out.push(s),
        }
    }
    out
}

/// Strict comparison of mean curves at one beta; exact ties go to the smaller name.
fn beats(a: &ClassifierRecord, b: &ClassifierRecord, beta: f64) -> bool {
    match a.mean_f_beta(beta).total_cmp(&b.mean_f_beta(beta)) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.name < b.name,
    }
}

fn argmax_mean(pool: &[ClassifierRecord], beta: f64) -> usize {
    let mut best = 0;
    for i in 1..pool.len() {
        if beats(&pool[i], &pool[best], beta) {
            best = i;
        }
    }
    best
}

/// Bisection in log-beta for the point where `incoming` takes over from `incumbent`.
fn refine_boundary(
    incumbent: &ClassifierRecord,
    incoming: &ClassifierRecord,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    while hi - lo > BOUNDARY_RTOL * lo {
        let mid = (lo * hi).sqrt();
        if beats(incumbent, incoming, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Ordering of classifiers that tie at one beta by who leads just above it.
///
/// Two crossing positive curves swap order at the crossover and the one with
/// higher recall leads afterwards; curves that coincide fall back to the name.
fn leads_right_after(a: PointEstimate, a_name: &str, b: PointEstimate, b_name: &str) -> bool {
    let zero = a.is_zero_curve() && b.is_zero_curve();
    if !zero && a.tpr != b.tpr {
        return a.tpr > b.tpr;
    }
    a_name < b_name
}

fn holdout_partition(pool: &[ClassifierRecord], grid: &BetaGrid) -> Vec<Segment> {
    let point = |i: usize| pool[i].folds[0];
    let (beta_min, beta_max) = (grid.beta_min(), grid.beta_max());

    let mut current = 0;
    for i in 1..pool.len() {
        let fi = f_beta_unchecked(point(i), beta_min);
        let fc = f_beta_unchecked(point(current), beta_min);
        let better = fi > fc
            || (fi == fc
                && leads_right_after(point(i), &pool[i].name, point(current), &pool[current].name));
        if better {
            current = i;
        }
    }

    let mut segments = Vec::new();
    let mut lo = beta_min;
    loop {
        // the next classifier to overtake the incumbent, if any
        let mut next: Option<(usize, f64)> = None;
        for i in 0..pool.len() {
            if i == current || point(i).tpr <= point(current).tpr {
                continue;
            }
            let Ok(Some(beta)) = crossover_beta(point(current), point(i)) else {
                continue;
            };
            if beta <= lo || beta >= beta_max {
                continue;
            }
            let take = match next {
                None => true,
                Some((j, b)) => {
                    beta < b
                        || (beta == b
                            && leads_right_after(point(i), &pool[i].name, point(j), &pool[j].name))
                }
            };
            if take {
                next = Some((i, beta));
            }
        }
        match next {
            Some((i, beta)) => {
                segments.push(segment(lo, beta, &pool[current].name));
                lo = beta;
                current = i;
            }
            None => {
                segments.push(segment(lo, beta_max, &pool[current].name));
                break;
            }
        }
    }
    segments
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pt(ppv: f64, tpr: f64) -> PointEstimate {
        PointEstimate::new(ppv, tpr).unwrap()
    }

    fn holdout(pairs: &[(&str, f64, f64)]) -> Vec<ClassifierRecord> {
        pairs
            .iter()
            .map(|(n, p, t)| ClassifierRecord::holdout(*n, pt(*p, *t)))
            .collect()
    }

    fn default_grid() -> BetaGrid {
        make_beta_grid(DEFAULT_BETA_MIN, DEFAULT_BETA_MAX, DEFAULT_GRID_POINTS).unwrap()
    }

    /// Log-space bisection on the raw curve difference, independent of the closed form.
    fn bisect_root(a: PointEstimate, b: PointEstimate) -> f64 {
        let g = |lb: f64| f_beta_unchecked(a, lb.exp()) - f_beta_unchecked(b, lb.exp());
        let (mut lo, mut hi) = ((1e-4f64).ln(), (1e4f64).ln());
        let s_lo = g(lo).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    #[test]
    fn grid_examples() {
        let g = make_beta_grid(0.1, 10.0, 3).unwrap();
        assert_eq!(g.points()[0], 0.1);
        assert_relative_eq!(g.points()[1], 1.0, max_relative = 1e-14);
        assert_eq!(g.points()[2], 10.0);

        let g = make_beta_grid(0.01, 100.0, 5).unwrap();
        for (got, want) in g.points().iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert_relative_eq!(*got, want, max_relative = 1e-14);
        }
        assert_eq!(
            make_beta_grid(1.0, 1.0, 5),
            Err(CurveError::InvalidRange(1.0, 1.0))
        );
        assert_eq!(
            make_beta_grid(0.0, 1.0, 5),
            Err(CurveError::InvalidRange(0.0, 1.0))
        );
        assert_eq!(
            make_beta_grid(0.1, 1.0, 1),
            Err(CurveError::TooFewPoints(1))
        );
    }

    #[test]
    fn grid_is_log_uniform() {
        let g = default_grid();
        let logs: Vec<f64> = g.points().iter().map(|b| b.ln()).collect();
        let step = logs[1] - logs[0];
        for w in logs.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_examples() {
        let grid = make_beta_grid(0.1, 10.0, 7).unwrap();
        let c = evaluate_curve(&ClassifierRecord::holdout("A", pt(0.5, 0.5)), &grid);
        assert!(c.mean.iter().all(|m| *m == 0.5));
        assert!(c.std.iter().all(|s| *s == 0.0));

        let one = make_beta_grid(1.0, 2.0, 2).unwrap();
        let c = evaluate_curve(
            &ClassifierRecord::new("A", vec![pt(1.0, 1.0), pt(0.0, 0.0)]),
            &one,
        );
        assert_eq!(c.mean[0], 0.5);
        assert_eq!(c.std[0], 0.5);

        let c = evaluate_curve(
            &ClassifierRecord::new("A", vec![pt(0.8, 0.6), pt(0.6, 0.8)]),
            &one,
        );
        assert_relative_eq!(c.mean[0], 0.685714, epsilon = 1e-6);
        assert!(c.std[0] < 1e-15);
    }

    #[test]
    fn crossover_examples() {
        assert_relative_eq!(
            crossover_beta(pt(0.9, 0.6), pt(0.6, 0.9)).unwrap().unwrap(),
            1.0,
            max_relative = 1e-15
        );
        // sqrt(0.35 / 0.48), confirmed against bisection below
        let beta = crossover_beta(pt(0.8, 0.5), pt(0.6, 0.7)).unwrap().unwrap();
        assert_relative_eq!(beta, 0.853912563830, max_relative = 1e-11);
        assert_relative_eq!(
            beta,
            bisect_root(pt(0.8, 0.5), pt(0.6, 0.7)),
            max_relative = 1e-9
        );
        assert_eq!(crossover_beta(pt(0.9, 0.8), pt(0.6, 0.5)).unwrap(), None);
    }

    #[test]
    fn crossover_errors() {
        assert_eq!(
            crossover_beta(pt(0.5, 0.5), pt(0.5, 0.5)),
            Err(CurveError::DegenerateInput)
        );
        assert_eq!(
            crossover_beta(pt(0.0, 0.5), pt(0.5, 0.5)),
            Err(CurveError::ZeroComponent)
        );
        assert_eq!(
            crossover_beta(pt(0.5, 0.5), pt(0.5, 0.0)),
            Err(CurveError::ZeroComponent)
        );
        // equal recall, different precision: parallel ordering, no crossing
        assert_eq!(crossover_beta(pt(0.5, 0.5), pt(0.6, 0.5)).unwrap(), None);
    }

    #[test]
    fn partition_symmetric_pair() {
        let pool = holdout(&[("A", 0.9, 0.6), ("B", 0.6, 0.9)]);
        let segs = dominance_partition(&pool, &default_grid()).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(
            (segs[0].winner.as_str(), segs[1].winner.as_str()),
            ("A", "B")
        );
        assert_eq!(segs[0].beta_lo, 0.01);
        assert_relative_eq!(segs[0].beta_hi, 1.0, max_relative = 1e-15);
        assert_eq!(segs[0].beta_hi, segs[1].beta_lo);
        assert_eq!(segs[1].beta_hi, 100.0);
        assert!(segs.iter().all(|s| !s.significant));
    }

    #[test]
    fn partition_derived_pair_and_dominance() {
        let pool = holdout(&[("A", 0.8, 0.5), ("B", 0.6, 0.7)]);
        let segs = dominance_partition(&pool, &default_grid()).unwrap();
        assert_eq!(segs.len(), 2);
        assert_relative_eq!(segs[0].beta_hi, 0.853912563830, max_relative = 1e-11);
        assert_eq!(segs[0].winner, "A");

        let pool = holdout(&[("A", 0.9, 0.8), ("B", 0.6, 0.5)]);
        let segs = dominance_partition(&pool, &default_grid()).unwrap();
        assert_eq!(segs, vec![segment(0.01, 100.0, "A")]);
    }

    #[test]
    fn partition_errors() {
        let grid = default_grid();
        assert_eq!(dominance_partition(&[], &grid), Err(CurveError::EmptyPool));
        let pool = vec![
            ClassifierRecord::new("A", vec![pt(0.5, 0.5), pt(0.6, 0.6)]),
            ClassifierRecord::holdout("B", pt(0.5, 0.5)),
        ];
        assert!(matches!(
            dominance_partition(&pool, &grid),
            Err(CurveError::FoldCountMismatch { .. })
        ));
        let pool = holdout(&[("A", 0.5, 0.5), ("A", 0.6, 0.6)]);
        assert_eq!(
            dominance_partition(&pool, &grid),
            Err(CurveError::DuplicateName("A".into()))
        );
    }

    #[test]
    fn identical_curves_tie_to_smaller_name() {
        let grid = default_grid();
        let pool = holdout(&[("zeta", 0.7, 0.6), ("alpha", 0.7, 0.6)]);
        let segs = dominance_partition(&pool, &grid).unwrap();
        assert_eq!(segs, vec![segment(0.01, 100.0, "alpha")]);
        let scanned = scan_partition(&pool, &grid).unwrap();
        assert_eq!(scanned, segs);

        let zeros = holdout(&[("b", 0.0, 0.4), ("a", 0.3, 0.0)]);
        assert_eq!(dominance_partition(&zeros, &grid).unwrap()[0].winner, "a");
    }

    #[test]
    fn crossover_exactly_at_grid_start() {
        let grid = make_beta_grid(1.0, 100.0, 101).unwrap();
        let pool = holdout(&[("A", 0.9, 0.6), ("B", 0.6, 0.9)]);
        let segs = dominance_partition(&pool, &grid).unwrap();
        assert_eq!(segs, vec![segment(1.0, 100.0, "B")]);
    }

    #[test]
    fn all_crossovers_examples() {
        let xs = all_crossovers(&holdout(&[("A", 0.9, 0.6), ("B", 0.6, 0.9)])).unwrap();
        assert_eq!(xs.len(), 1);
        assert_eq!((xs[0].name_a.as_str(), xs[0].name_b.as_str()), ("A", "B"));
        assert_relative_eq!(xs[0].beta, 1.0, max_relative = 1e-15);

        assert!(
            all_crossovers(&holdout(&[("A", 0.9, 0.8), ("B", 0.6, 0.5)]))
                .unwrap()
                .is_empty()
        );

        let pool = holdout(&[("A", 0.8, 0.5), ("B", 0.6, 0.7), ("C", 0.7, 0.6)]);
        let xs = all_crossovers(&pool).unwrap();
        // frozen from independent root finding: A/C 0.731925054711, A/B 0.853912563830, B/C 1
        let want = [
            ("A", "C", 0.731925054711),
            ("A", "B", 0.853912563830),
            ("B", "C", 1.0),
        ];
        assert_eq!(xs.len(), 3);
        for (x, (a, b, beta)) in xs.iter().zip(want) {
            assert_eq!((x.name_a.as_str(), x.name_b.as_str()), (a, b));
            assert_relative_eq!(x.beta, beta, max_relative = 1e-11);
            let pa = pool.iter().find(|r| r.name == a).unwrap().folds[0];
            let pb = pool.iter().find(|r| r.name == b).unwrap().folds[0];
            assert!((f_beta_unchecked(pa, x.beta) - f_beta_unchecked(pb, x.beta)).abs() < 1e-9);
        }

        let cv = vec![ClassifierRecord::new("A", vec![pt(0.5, 0.5), pt(0.6, 0.6)])];
        assert_eq!(
            all_crossovers(&cv),
            Err(CurveError::NotHoldOutMode("A".into()))
        );
    }

    #[test]
    fn cv_partition_refines_to_mean_crossing() {
        // fold pairs mirror each other, so the mean curves cross at beta = 1
        let pool = vec![
            ClassifierRecord::new("A", vec![pt(0.9, 0.6), pt(0.85, 0.65)]),
            ClassifierRecord::new("B", vec![pt(0.6, 0.9), pt(0.65, 0.85)]),
        ];
        let segs = dominance_partition(&pool, &default_grid()).unwrap();
        assert_eq!(segs.len(), 2);
        assert_relative_eq!(segs[0].beta_hi, 1.0, max_relative = 2e-9);
    }

    fn arb_point() -> impl Strategy<Value = PointEstimate> {
        (0.05..0.95f64, 0.05..0.95f64).prop_map(|(p, t)| PointEstimate { ppv: p, tpr: t })
    }

    proptest! {
        #[test]
        fn single_sign_change(a in arb_point(), b in arb_point()) {
            let beta = crossover_beta(a, b);
            prop_assume!(matches!(beta, Ok(Some(_))));
            let beta = beta.unwrap().unwrap();
            prop_assume!(beta > 1e-4 && beta < 1e4);
            let grid = make_beta_grid(1e-4, 1e4, 4001).unwrap();
            let signs: Vec<f64> = grid.points().iter()
                .map(|&x| (f_beta_unchecked(a, x) - f_beta_unchecked(b, x)).signum())
                .filter(|s| *s != 0.0)
                .collect();
            let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert!(changes <= 1);
            let root = bisect_root(a, b);
            prop_assert!((root - beta).abs() <= 1e-9 * beta);
        }

        #[test]
        fn partition_order_invariant(points in proptest::collection::vec(arb_point(), 2..8)) {
            let grid = default_grid();
            let pool: Vec<ClassifierRecord> = points.iter().enumerate()
                .map(|(i, p)| ClassifierRecord::holdout(format!("c{i}"), *p)).collect();
            let mut reversed = pool.clone();
            reversed.reverse();
            prop_assert_eq!(
                dominance_partition(&pool, &grid).unwrap(),
                dominance_partition(&reversed, &grid).unwrap()
            );
        }

        #[test]
        fn holdout_routes_agree(points in proptest::collection::vec(arb_point(), 2..8)) {
            let grid = default_grid();
            let pool: Vec<ClassifierRecord> = points.iter().enumerate()
                .map(|(i, p)| ClassifierRecord::holdout(format!("c{i}"), *p)).collect();
            let exact = dominance_partition(&pool, &grid).unwrap();
            let scanned = scan_partition(&pool, &grid).unwrap();
            // the scan can miss a segment narrower than one grid cell
            prop_assume!(exact.len() == scanned.len());
            for (e, s) in exact.iter().zip(&scanned) {
                prop_assert_eq!(&e.winner, &s.winner);
                prop_assert!((e.beta_hi - s.beta_hi).abs() <= 1e-9 * e.beta_hi * 1.0001);
            }
        }
    }
}
