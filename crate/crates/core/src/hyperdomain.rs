//! The class domain and its partition into groups, plus binary label
//! vectors over the domain.
//!
//! Classes are indexed `0..k` throughout the library. Groups are disjoint,
//! non-empty, and together cover every class; groups with two or more
//! members are the "multi-class" (composite) groups, and only those carry
//! group evidence.

use crate::error::{Error, Result};

/// A partition of the class domain `{0..k}` into ordered, disjoint,
/// covering groups. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    groups: Vec<Vec<usize>>,
    class_group: Vec<usize>,
    multiclass: Vec<usize>,
}

impl Partition {
    /// Validates the partition invariants and reports the first violation.
    pub fn new(k: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Partition("domain must have at least one class".into()));
        }
        if groups.is_empty() {
            return Err(Error::Partition("partition must have at least one group".into()));
        }
        let mut class_group = vec![usize::MAX; k];
        for (j, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::Partition(format!("group {j} is empty")));
            }
            for &class in group {
                if class >= k {
                    return Err(Error::Partition(format!(
                        "group {j} contains class {class}, outside the domain 0..{k}"
                    )));
                }
                if class_group[class] != usize::MAX {
                    return Err(Error::Partition(format!(
                        "class {class} appears in more than one group"
                    )));
                }
                class_group[class] = j;
            }
        }
        if let Some(class) = class_group.iter().position(|&g| g == usize::MAX) {
            return Err(Error::Partition(format!(
                "class {class} is not covered by any group"
            )));
        }
        // a lone group would equal the full domain, which is not a focal set
        if groups.len() == 1 {
            return Err(Error::Partition(
                "partition needs at least two groups; one group would cover the whole domain"
                    .into(),
            ));
        }
        let multiclass = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.len() >= 2)
            .map(|(j, _)| j)
            .collect();
        Ok(Self { k, groups, class_group, multiclass })
    }

    /// Number of singleton classes in the domain.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of groups.
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Number of groups with two or more members.
    pub fn num_multiclass(&self) -> usize {
        self.multiclass.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, j: usize) -> &[usize] {
        &self.groups[j]
    }

    /// Indices of the multi-class groups, in partition order.
    pub fn multiclass_groups(&self) -> &[usize] {
        &self.multiclass
    }

    pub fn is_multiclass(&self, j: usize) -> bool {
        self.groups[j].len() >= 2
    }

    /// The unique group containing `class`.
    pub fn containing_group(&self, class: usize) -> Result<usize> {
        if class >= self.k {
            return Err(Error::Domain(format!(
                "class {class} outside the domain 0..{}",
                self.k
            )));
        }
        Ok(self.class_group[class])
    }

    /// Width of an evidence vector over this domain: one entry per
    /// singleton class plus one per multi-class group.
    pub fn evidence_width(&self) -> usize {
        self.k + self.multiclass.len()
    }
}

/// Which kind of label a binary vector encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// A single set bit: the class index.
    Singleton(usize),
    /// Support equal to a multi-class group: the group index.
    Composite(usize),
}

impl LabelKind {
    /// The set of classes this label asserts membership of.
    pub fn class_set(&self, partition: &Partition) -> Vec<usize> {
        match *self {
            LabelKind::Singleton(class) => vec![class],
            LabelKind::Composite(j) => partition.group(j).to_vec(),
        }
    }
}

/// A binary label vector over the class domain: a one-hot singleton label
/// or the indicator of one multi-class group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    bits: Vec<bool>,
}

impl LabelVector {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if !bits.iter().any(|&b| b) {
            return Err(Error::Label("label vector has no bit set".into()));
        }
        Ok(Self { bits })
    }

    pub fn singleton(class: usize, k: usize) -> Result<Self> {
        if class >= k {
            return Err(Error::Label(format!("class {class} outside the domain 0..{k}")));
        }
        let mut bits = vec![false; k];
        bits[class] = true;
        Ok(Self { bits })
    }

    /// Indicator vector of group `j`.
    pub fn group_indicator(partition: &Partition, j: usize) -> Result<Self> {
        if j >= partition.num_groups() {
            return Err(Error::Label(format!("group index {j} out of range")));
        }
        let mut bits = vec![false; partition.k()];
        for &class in partition.group(j) {
            bits[class] = true;
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Classes with a set bit, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Resolves the label against a partition: a single set bit is a
    /// singleton label; a larger support must match one multi-class group
    /// exactly.
    pub fn kind(&self, partition: &Partition) -> Result<LabelKind> {
        if self.bits.len() != partition.k() {
            return Err(Error::Shape(format!(
                "label has {} bits but the domain has {} classes",
                self.bits.len(),
                partition.k()
            )));
        }
        let support = self.support();
        if support.len() == 1 {
            return Ok(LabelKind::Singleton(support[0]));
        }
        let j = partition.containing_group(support[0])?;
        let mut group: Vec<usize> = partition.group(j).to_vec();
        group.sort_unstable();
        if group == support {
            Ok(LabelKind::Composite(j))
        } else {
            Err(Error::Label(format!(
                "label support {support:?} does not match any group of the partition"
            )))
        }
    }
}
