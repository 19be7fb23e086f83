//! Set-prediction metrics: Jaccard similarities, projected-singleton
//! accuracy, and AUROC over uncertainty scores via the rank statistic.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hyperdomain::LabelVector;

/// Uncertainty scores attached to one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub vagueness: f64,
    pub vacuity: f64,
    pub dissonance: f64,
}

/// One evaluated test example.
#[derive(Debug, Clone)]
pub struct PredictionRecord {
    pub truth: LabelVector,
    pub set_pred: BTreeSet<usize>,
    pub singleton_pred: usize,
    pub scores: Scores,
}

impl PredictionRecord {
    fn truth_set(&self) -> BTreeSet<usize> {
        self.truth.support().into_iter().collect()
    }

    /// True when the ground-truth label is a composite set.
    pub fn truth_is_composite(&self) -> bool {
        self.truth.count() > 1
    }
}

/// Intersection over union of two non-empty sets.
pub fn jaccard(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("jaccard similarity of an empty set".into()));
    }
    let intersection = a.intersection(b).count() as f64;
    let union = a.union(b).count() as f64;
    Ok(intersection / union)
}

/// Mean Jaccard similarity over all records.
pub fn over_js(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Domain("no records to average".into()));
    }
    let mut sum = 0.0;
    for r in records {
        sum += jaccard(&r.truth_set(), &r.set_pred)?;
    }
    Ok(sum / records.len() as f64)
}

/// Mean Jaccard similarity over the records the model predicted as
/// composite (set size two or more). `None` when there are no composite
/// predictions; reporting layers print that as 0.
pub fn comp_js(records: &[PredictionRecord]) -> Result<Option<f64>> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in records {
        if r.set_pred.len() > 1 {
            sum += jaccard(&r.truth_set(), &r.set_pred)?;
            n += 1;
        }
    }
    Ok(if n == 0 { None } else { Some(sum / n as f64) })
}

/// Fraction of records whose projected singleton prediction belongs to
/// the truth set. A composite truth counts as correct when the predicted
/// class is one of its members.
pub fn accuracy(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Domain("no records to average".into()));
    }
    let hits = records
        .iter()
        .filter(|r| r.truth.bits().get(r.singleton_pred).copied().unwrap_or(false))
        .count();
    Ok(hits as f64 / records.len() as f64)
}

/// Probability that a positive outscores a negative, counting ties as
/// one half: the Mann-Whitney statistic with average ranks.
pub fn auroc(positive: &[f64], negative: &[f64]) -> Result<f64> {
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::Domain("auroc needs scores on both sides".into()));
    }
    if positive.iter().chain(negative).any(|s| s.is_nan()) {
        return Err(Error::Domain("auroc scores must not be NaN".into()));
    }
    let n_pos = positive.len();
    let n_neg = negative.len();
    let mut merged: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    merged.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("no NaN"));

    let mut rank_sum_pos = 0.0;
    let mut i = 0usize;
    while i < merged.len() {
        let mut j = i;
        while j < merged.len() && merged[j].0 == merged[i].0 {
            j += 1;
        }
        // ranks are 1-based; ties share the average rank of their block
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for item in &merged[i..j] {
            if item.1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}
