//! Confusion-matrix counts, simple rates and the F-beta score.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("confusion counts are all zero")]
    EmptyCounts,
    #[error("no positive-class instances (tp + fn = 0)")]
    NoPositiveInstances,
    #[error("no negative-class instances (tn + fp = 0)")]
    NoNegativeInstances,
    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("{field} = {value} is outside [0, 1]")]
    OutOfRange { field: &'static str, value: f64 },
}

/// The four cells of a binary confusion matrix for one classifier on one fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Result<Self, MetricsError> {
        let c = Self { tp, fn_, fp, tn };
        if c.total() == 0 {
            return Err(MetricsError::EmptyCounts);
        }
        Ok(c)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }
}

/// Accuracy, recall, specificity and precision of one confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub acc: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub ppv: f64,
    /// Set when the classifier never predicted the positive class; `ppv` is then 0.
    pub ppv_undefined: bool,
}

impl RateSet {
    pub fn point(&self) -> PointEstimate {
        PointEstimate {
            ppv: self.ppv,
            tpr: self.tpr,
        }
    }
}

/// A classifier's position in precision/recall space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub ppv: f64,
    pub tpr: f64,
}

impl PointEstimate {
    pub fn new(ppv: f64, tpr: f64) -> Result<Self, MetricsError> {
        check_unit("ppv", ppv)?;
        check_unit("tpr", tpr)?;
        Ok(Self { ppv, tpr })
    }

    /// True when the F-beta curve of this point is identically zero.
    pub fn is_zero_curve(&self) -> bool {
        self.ppv == 0.0 || self.tpr == 0.0
    }
}

fn check_unit(field: &'static str, value: f64) -> Result<(), MetricsError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(MetricsError::OutOfRange { field, value })
    }
}

pub fn simple_rates(c: &ConfusionCounts) -> Result<RateSet, MetricsError> {
    if c.total() == 0 {
        return Err(MetricsError::EmptyCounts);
    }
    if c.positives() == 0 {
        return Err(MetricsError::NoPositiveInstances);
    }
    if c.negatives() == 0 {
        return Err(MetricsError::NoNegativeInstances);
    }
    let tp = c.tp as f64;
    let fn_ = c.fn_ as f64;
    let fp = c.fp as f64;
    let tn = c.tn as f64;
    let predicted_pos = c.tp + c.fp;
    Ok(RateSet {
        acc: (tp + tn) / (tp + fn_ + tn + fp),
        tpr: tp / (tp + fn_),
        tnr: tn / (tn + fp),
        ppv: if predicted_pos == 0 {
            0.0
        } else {
            tp / (tp + fp)
        },
        ppv_undefined: predicted_pos == 0,
    })
}

/// F-beta score of a point. Defined as 0 when both components are 0.
pub fn f_beta(p: PointEstimate, beta: f64) -> Result<f64, MetricsError> {
    if !(beta > 0.0) {
        return Err(MetricsError::NonPositiveBeta(beta));
    }
    Ok(f_beta_unchecked(p, beta))
}

/// [`f_beta`] without the beta check, for hot loops over validated grids.
#[inline]
pub fn f_beta_unchecked(p: PointEstimate, beta: f64) -> f64 {
    let b2 = beta * beta;
    let den = b2 * p.ppv + p.tpr;
    if den == 0.0 {
        return 0.0;
    }
    let value = (b2 + 1.0) * p.ppv * p.tpr / den;
    // rounding can leave the weighted harmonic mean an ulp outside its components
    value.clamp(p.ppv.min(p.tpr), p.ppv.max(p.tpr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pt(ppv: f64, tpr: f64) -> PointEstimate {
        PointEstimate::new(ppv, tpr).unwrap()
    }

    #[test]
    fn perfect_classifier() {
        let r = simple_rates(&ConfusionCounts::new(10, 0, 0, 10).unwrap()).unwrap();
        assert_eq!((r.acc, r.tpr, r.tnr, r.ppv), (1.0, 1.0, 1.0, 1.0));
        assert!(!r.ppv_undefined);
    }

    #[test]
    fn imbalanced_counts() {
        let r = simple_rates(&ConfusionCounts::new(50, 10, 5, 935).unwrap()).unwrap();
        assert_abs_diff_eq!(r.tpr, 0.833333, epsilon = 1e-6);
        assert_abs_diff_eq!(r.ppv, 0.909091, epsilon = 1e-6);
        assert_abs_diff_eq!(r.tnr, 0.994681, epsilon = 1e-6);
        assert_abs_diff_eq!(r.acc, 0.985, epsilon = 1e-12);
    }

    #[test]
    fn never_positive_predictor() {
        let r = simple_rates(&ConfusionCounts::new(0, 5, 0, 95).unwrap()).unwrap();
        assert_eq!(r.tpr, 0.0);
        assert_eq!(r.tnr, 1.0);
        assert_eq!(r.ppv, 0.0);
        assert!(r.ppv_undefined);
        assert_abs_diff_eq!(r.acc, 0.95, epsilon = 1e-12);
    }

    #[test]
    fn missing_classes() {
        let no_pos = ConfusionCounts::new(0, 0, 3, 7).unwrap();
        assert_eq!(
            simple_rates(&no_pos),
            Err(MetricsError::NoPositiveInstances)
        );
        let no_neg = ConfusionCounts::new(3, 7, 0, 0).unwrap();
        assert_eq!(
            simple_rates(&no_neg),
            Err(MetricsError::NoNegativeInstances)
        );
        assert_eq!(
            ConfusionCounts::new(0, 0, 0, 0),
            Err(MetricsError::EmptyCounts)
        );
    }

    #[test]
    fn f_beta_examples() {
        assert_eq!(f_beta(pt(0.5, 0.5), 2.0).unwrap(), 0.5);
        assert_abs_diff_eq!(f_beta(pt(0.5, 1.0), 1.0).unwrap(), 0.666667, epsilon = 1e-6);
        // 1.25 * 0.9 * 0.6 / (0.25 * 0.9 + 0.6)
        assert_abs_diff_eq!(f_beta(pt(0.9, 0.6), 0.5).unwrap(), 0.818182, epsilon = 1e-6);
        assert_eq!(f_beta(pt(0.0, 0.0), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn non_positive_beta() {
        assert!(matches!(
            f_beta(pt(0.5, 0.5), 0.0),
            Err(MetricsError::NonPositiveBeta(_))
        ));
        assert!(matches!(
            f_beta(pt(0.5, 0.5), -1.0),
            Err(MetricsError::NonPositiveBeta(_))
        ));
        assert!(f_beta(pt(0.5, 0.5), f64::NAN).is_err());
    }

    #[test]
    fn point_range_checked() {
        assert!(PointEstimate::new(1.2, 0.5).is_err());
        assert!(PointEstimate::new(0.5, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn bounded_by_components(ppv in 0.0..=1.0f64, tpr in 0.0..=1.0f64, lb in -10.0..10.0f64) {
            let v = f_beta(pt(ppv, tpr), lb.exp()).unwrap();
            prop_assert!(v >= ppv.min(tpr) && v <= ppv.max(tpr));
        }

        #[test]
        fn precision_and_recall_limits(ppv in 0.01..=1.0f64, tpr in 0.01..=1.0f64) {
            let p = pt(ppv, tpr);
            prop_assert!((f_beta(p, 1e-6).unwrap() - ppv).abs() < 1e-9 * (1.0 + 1.0 / ppv));
            prop_assert!((f_beta(p, 1e6).unwrap() - tpr).abs() < 1e-9 * (1.0 + 1.0 / tpr));
        }

        #[test]
        fn harmonic_at_one(ppv in 0.001..=1.0f64, tpr in 0.001..=1.0f64) {
            let v = f_beta(pt(ppv, tpr), 1.0).unwrap();
            let h = 2.0 * ppv * tpr / (ppv + tpr);
            prop_assert!((v - h).abs() <= f64::EPSILON * h);
        }

        #[test]
        fn monotone_in_components(ppv in 0.0..0.99f64, tpr in 0.0..0.99f64, step in 0.0..0.01f64, lb in -5.0..5.0f64) {
            let b = lb.exp();
            let base = f_beta(pt(ppv, tpr), b).unwrap();
            prop_assert!(f_beta(pt(ppv + step, tpr), b).unwrap() >= base - 1e-15);
            prop_assert!(f_beta(pt(ppv, tpr + step), b).unwrap() >= base - 1e-15);
        }

        #[test]
        fn rates_scale_invariant(tp in 0u64..500, fn_ in 0u64..500, fp in 0u64..500, tn in 0u64..500, k in 1u64..50) {
            prop_assume!(tp + fn_ > 0 && tn + fp > 0);
            let a = simple_rates(&ConfusionCounts::new(tp, fn_, fp, tn).unwrap()).unwrap();
            let b = simple_rates(&ConfusionCounts::new(k * tp, k * fn_, k * fp, k * tn).unwrap()).unwrap();
            prop_assert!((a.acc - b.acc).abs() < 1e-12);
            prop_assert!((a.tpr - b.tpr).abs() < 1e-12);
            prop_assert!((a.tnr - b.tnr).abs() < 1e-12);
            prop_assert!((a.ppv - b.ppv).abs() < 1e-12);
        }
    }
}
