//! Hyper-opinion calculus: mapping evidence to belief masses and the
//! three evidential uncertainty measures (vacuity, vagueness, dissonance).
//!
//! A hyper-opinion assigns belief mass to focal sets drawn from the
//! reduced power set of the domain (every non-empty proper subset), plus
//! an uncertainty mass; everything sums to one. The focal family here is
//! explicit so arbitrary set collections can be represented, even though
//! training only ever uses singletons plus the partition's multi-class
//! groups.

use crate::error::{Error, Result};
use crate::hyperdomain::{LabelKind, Partition};

/// An ordered family of distinct focal sets: non-empty proper subsets of
/// the domain `{0..k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FocalFamily {
    k: usize,
    sets: Vec<Vec<usize>>,
}

impl FocalFamily {
    pub fn new(k: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("domain must have at least one class".into()));
        }
        let mut normalized: Vec<Vec<usize>> = Vec::with_capacity(sets.len());
        for (i, set) in sets.into_iter().enumerate() {
            let mut s = set;
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::Domain(format!("focal set {i} is empty")));
            }
            if s.len() == k {
                return Err(Error::Domain(format!(
                    "focal set {i} equals the full domain"
                )));
            }
            if *s.last().unwrap() >= k {
                return Err(Error::Domain(format!(
                    "focal set {i} contains a class outside the domain 0..{k}"
                )));
            }
            if normalized.contains(&s) {
                return Err(Error::Domain(format!("focal set {i} is a duplicate")));
            }
            normalized.push(s);
        }
        Ok(Self { k, sets: normalized })
    }

    /// The singletons followed by the multi-class groups of a partition,
    /// in partition order. This is the family the network head spans.
    pub fn from_partition(partition: &Partition) -> Self {
        let mut sets: Vec<Vec<usize>> = (0..partition.k()).map(|c| vec![c]).collect();
        for &j in partition.multiclass_groups() {
            let mut g = partition.group(j).to_vec();
            g.sort_unstable();
            sets.push(g);
        }
        Self { k: partition.k(), sets }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn is_composite(&self, i: usize) -> bool {
        self.sets[i].len() >= 2
    }

    /// Size of the symmetric difference between focal sets `i` and `j`.
    fn symmetric_difference(&self, i: usize, j: usize) -> usize {
        let (a, b) = (&self.sets[i], &self.sets[j]);
        let mut overlap = 0usize;
        let (mut ia, mut ib) = (0usize, 0usize);
        while ia < a.len() && ib < b.len() {
            match a[ia].cmp(&b[ib]) {
                std::cmp::Ordering::Less => ia += 1,
                std::cmp::Ordering::Greater => ib += 1,
                std::cmp::Ordering::Equal => {
                    overlap += 1;
                    ia += 1;
                    ib += 1;
                }
            }
        }
        a.len() + b.len() - 2 * overlap
    }
}

/// Belief masses aligned with a focal family plus the uncertainty mass.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperOpinion {
    beliefs: Vec<f64>,
    uncertainty: f64,
}

impl HyperOpinion {
    /// Builds an opinion from explicit masses, checking additivity to one.
    pub fn new(beliefs: Vec<f64>, uncertainty: f64) -> Result<Self> {
        if beliefs.iter().any(|&b| !(b >= 0.0)) {
            return Err(Error::Domain("belief masses must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&uncertainty) {
            return Err(Error::Domain(format!(
                "uncertainty mass {uncertainty} outside [0, 1]"
            )));
        }
        let total: f64 = beliefs.iter().sum::<f64>() + uncertainty;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "belief masses and uncertainty sum to {total}, not 1"
            )));
        }
        Ok(Self { beliefs, uncertainty })
    }

    /// Maps evidence over a focal family to belief masses: with total
    /// T = sum(e) + k, each belief is e/T and the uncertainty mass is k/T.
    /// Zero evidence yields total uncertainty.
    pub fn from_evidence(evidence: &[f64], domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Domain("domain must have at least one class".into()));
        }
        if let Some(&e) = evidence.iter().find(|&&e| !(e >= 0.0) || !e.is_finite()) {
            return Err(Error::Domain(format!(
                "evidence must be finite and non-negative, got {e}"
            )));
        }
        let total: f64 = evidence.iter().sum::<f64>() + domain_size as f64;
        let beliefs = evidence.iter().map(|&e| e / total).collect();
        Ok(Self { beliefs, uncertainty: domain_size as f64 / total })
    }

    pub fn beliefs(&self) -> &[f64] {
        &self.beliefs
    }

    pub fn uncertainty(&self) -> f64 {
        self.uncertainty
    }
}

/// Vacuity: the uncertainty mass itself.
pub fn vacuity(opinion: &HyperOpinion) -> f64 {
    opinion.uncertainty()
}

/// Vagueness: total belief mass on focal sets of size two or more.
pub fn vagueness(opinion: &HyperOpinion, family: &FocalFamily) -> Result<f64> {
    check_alignment(opinion, family)?;
    Ok(opinion
        .beliefs
        .iter()
        .enumerate()
        .filter(|(i, _)| family.is_composite(*i))
        .map(|(_, &b)| b)
        .sum())
}

/// Dissonance: conflict between belief masses, weighted by the size of
/// the symmetric difference between focal sets and by the balance
/// `Bal(b', b) = 1 - |b' - b| / (b' + b)`. A focal set whose weighted
/// conflict denominator is zero contributes nothing.
pub fn dissonance(opinion: &HyperOpinion, family: &FocalFamily) -> Result<f64> {
    check_alignment(opinion, family)?;
    let b = &opinion.beliefs;
    let n = b.len();
    let mut total = 0.0;
    for i in 0..n {
        if b[i] <= 0.0 {
            continue;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let weight = family.symmetric_difference(i, j) as f64 * b[j];
            den += weight;
            num += weight * balance(b[j], b[i]);
        }
        if den > 0.0 {
            total += b[i] * num / den;
        }
    }
    Ok(total)
}

fn balance(b1: f64, b2: f64) -> f64 {
    let sum = b1 + b2;
    if sum <= 0.0 {
        0.0
    } else {
        1.0 - (b1 - b2).abs() / sum
    }
}

fn check_alignment(opinion: &HyperOpinion, family: &FocalFamily) -> Result<()> {
    if opinion.beliefs.len() != family.len() {
        return Err(Error::Shape(format!(
            "opinion has {} beliefs but the family has {} focal sets",
            opinion.beliefs.len(),
            family.len()
        )));
    }
    Ok(())
}

/// Index of the largest evidence entry, mapped onto the hyper-domain:
/// the first `k` entries are singleton classes, the rest are the
/// partition's multi-class groups in order. Ties go to the lowest index.
pub fn argmax_evidence(evidence: &[f64], partition: &Partition) -> Result<LabelKind> {
    if evidence.is_empty() {
        return Err(Error::Domain("evidence vector is empty".into()));
    }
    if evidence.len() != partition.evidence_width() {
        return Err(Error::Shape(format!(
            "evidence has {} entries but the domain needs {}",
            evidence.len(),
            partition.evidence_width()
        )));
    }
    let mut best = 0usize;
    for (i, &e) in evidence.iter().enumerate() {
        if e > evidence[best] {
            best = i;
        }
    }
    let k = partition.k();
    if best < k {
        Ok(LabelKind::Singleton(best))
    } else {
        Ok(LabelKind::Composite(partition.multiclass_groups()[best - k]))
    }
}
