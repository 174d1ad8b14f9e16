//! One-sided paired t-test and the significance mask over the beta axis.

use thiserror::Error;

use crate::curve::{validate_pool, BetaGrid, ClassifierRecord, CurveError, Segment};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("paired t-test needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("significance needs cross-validation folds; pool is hold-out")]
    NotCVMode,
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("segment winner {0:?} is not in the pool")]
    UnknownWinner(String),
    #[error("no segments to test")]
    NoSegments,
    #[error(transparent)]
    Pool(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub t_stat: f64,
    pub df: usize,
    /// P(T_df > t_stat).
    pub p_one_sided: f64,
}

/// Paired t-test of `a` against `b` for the alternative mean(a - b) > 0.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::TooFewSamples(n));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let df = n - 1;

    if diffs.iter().all(|d| *d == diffs[0]) {
        let (t_stat, p_one_sided) = match diffs[0].partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => (f64::INFINITY, 0.0),
            Some(std::cmp::Ordering::Less) => (f64::NEG_INFINITY, 1.0),
            _ => (0.0, 0.5),
        };
        return Ok(TestResult {
            t_stat,
            df,
            p_one_sided,
        });
    }

    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nf - 1.0);
    let t_stat = mean / (var.sqrt() / nf.sqrt());
    Ok(TestResult {
        t_stat,
        df,
        p_one_sided: t_sf(t_stat, df),
    })
}

/// Survival function P(T > t) of Student's t distribution with `df` degrees of freedom.
pub fn t_sf(t: f64, df: usize) -> f64 {
    assert!(df >= 1, "t distribution needs df >= 1");
    if t.is_nan() {
        return f64::NAN;
    }
    if t == 0.0 {
        return 0.5;
    }
    if t.is_infinite() {
        return if t > 0.0 { 0.0 } else { 1.0 };
    }
    let nu = df as f64;
    let t2 = t * t;
    let x = nu / (nu + t2);
    let y = t2 / (nu + t2);
    let tail = 0.5 * reg_inc_beta(0.5 * nu, 0.5, x, y);
    if t > 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Regularized incomplete beta I_x(a, b); `y` must equal `1 - x` and is
/// passed separately so callers can supply it without cancellation.
fn reg_inc_beta(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, y) / b
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 10_000;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lanczos approximation (g = 7, 9 terms), valid for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// Alpha after the optional Bonferroni division by the number of competitors.
pub fn effective_alpha(alpha: f64, pool_size: usize, bonferroni: bool) -> f64 {
    if bonferroni && pool_size > 1 {
        alpha / (pool_size - 1) as f64
    } else {
        alpha
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    /// One flag per grid point.
    pub mask: Vec<bool>,
    pub segments: Vec<Segment>,
    /// Maximal runs of true mask entries as `(beta_lo, beta_hi)` grid values.
    pub runs: Vec<(f64, f64)>,
}

/// True iff `winner` beats every other classifier at `beta` under a one-sided
/// paired t-test at level `alpha`.
pub fn winner_is_significant(
    pool: &[ClassifierRecord],
    winner: usize,
    beta: f64,
    alpha: f64,
) -> Result<bool, StatsError> {
    let w = pool[winner].fold_scores(beta);
    for (i, other) in pool.iter().enumerate() {
        if i == winner {
            continue;
        }
        let test = paired_t(&w, &other.fold_scores(beta))?;
        if !(test.p_one_sided < alpha) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn significance_mask(
    pool: &[ClassifierRecord],
    grid: &BetaGrid,
    segments: &[Segment],
    alpha: f64,
) -> Result<Significance, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidAlpha(alpha));
    }
    let folds = validate_pool(pool)?;
    if folds < 2 {
        return Err(StatsError::NotCVMode);
    }
    if segments.is_empty() {
        return Err(StatsError::NoSegments);
    }
    let winner_idx: Vec<usize> = segments
        .iter()
        .map(|s| {
            pool.iter()
                .position(|r| r.name == s.winner)
                .ok_or_else(|| StatsError::UnknownWinner(s.winner.clone()))
        })
        .collect::<Result<_, _>>()?;

    let mut mask = Vec::with_capacity(grid.len());
    let mut seg = 0;
    for &beta in grid.points() {
        while seg + 1 < segments.len() && beta >= segments[seg].beta_hi {
            seg += 1;
        }
        mask.push(winner_is_significant(pool, winner_idx[seg], beta, alpha)?);
    }

    let mut updated = segments.to_vec();
    for (s, &w) in updated.iter_mut().zip(&winner_idx) {
        let interior: Vec<bool> = grid
            .points()
            .iter()
            .zip(&mask)
            .filter(|(b, _)| **b > s.beta_lo && **b < s.beta_hi)
            .map(|(_, m)| *m)
            .collect();
        s.significant = if interior.is_empty() {
            // narrower than one grid cell: test at the log-midpoint instead
            winner_is_significant(pool, w, (s.beta_lo * s.beta_hi).sqrt(), alpha)?
        } else {
            interior.iter().all(|m| *m)
        };
    }

    let runs = true_runs(grid.points(), &mask);
    Ok(Significance {
        mask,
        segments: updated,
        runs,
    })
}

fn true_runs(points: &[f64], mask: &[bool]) -> Vec<(f64, f64)> {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((points[s], points[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((points[s], points[mask.len() - 1]));
    }
    runs
}
