//! Synthetic composite-label data and dataset file I/O.
//!
//! Each class gets an isotropic Gaussian cluster with its mean on a
//! circle. A sample whose class belongs to a multi-class group is, with
//! probability `composite_ratio`, redrawn from the group centroid with
//! inflated variance and relabeled with the group's indicator: a vague
//! input carrying a composite label.
//!
//! Files are UTF-8 JSON lines, one `{"x": [...], "y": [0/1, ...]}` per
//! record, with a sidecar domain file `{"k": K, "groups": [[...]]}` whose
//! class indices are 1-based.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperdomain::{LabelVector, Partition};
use crate::util::stream_rng;

/// One labeled example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: LabelVector,
}

/// Geometry and counts for synthetic generation.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub partition: Arc<Partition>,
    pub feature_dim: usize,
    pub mean_radius: f64,
    pub class_std: f64,
    /// Probability that a sample from a multi-class-group class is
    /// converted to a composite-labeled, blurred sample.
    pub composite_ratio: f64,
    /// Blur spread relative to the class spread; at least 1.
    pub blur_multiplier: f64,
    pub train_count: usize,
    pub val_count: usize,
    pub test_count: usize,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.feature_dim == 0 {
            return Err(Error::Domain("feature dim must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.composite_ratio) {
            return Err(Error::Domain(format!(
                "composite ratio {} outside [0, 1]",
                self.composite_ratio
            )));
        }
        if !(self.blur_multiplier >= 1.0) {
            return Err(Error::Domain(format!(
                "blur multiplier {} must be at least 1",
                self.blur_multiplier
            )));
        }
        if !(self.class_std > 0.0) || !(self.mean_radius >= 0.0) {
            return Err(Error::Domain("class geometry must be positive".into()));
        }
        Ok(())
    }

    /// Class means spaced evenly on a circle of `mean_radius` in the
    /// first two feature dimensions.
    pub fn class_mean(&self, class: usize) -> Vec<f64> {
        let k = self.partition.k();
        let angle = 2.0 * std::f64::consts::PI * class as f64 / k as f64;
        let mut mean = vec![0.0; self.feature_dim];
        mean[0] = self.mean_radius * angle.cos();
        if self.feature_dim > 1 {
            mean[1] = self.mean_radius * angle.sin();
        }
        mean
    }

    /// Mean of the class means of one group.
    pub fn group_centroid(&self, j: usize) -> Vec<f64> {
        let group = self.partition.group(j);
        let mut centroid = vec![0.0; self.feature_dim];
        for &class in group {
            for (c, m) in centroid.iter_mut().zip(self.class_mean(class)) {
                *c += m;
            }
        }
        let n = group.len() as f64;
        centroid.iter_mut().for_each(|c| *c /= n);
        centroid
    }
}

/// The three generated splits.
#[derive(Debug, Clone)]
pub struct SplitSet {
    pub train: Vec<Sample>,
    pub val: Vec<Sample>,
    pub test: Vec<Sample>,
}

/// Generates the train/val/test splits. Each split draws from its own
/// random stream derived from the seed, so splits are independent and
/// the whole set is reproducible byte for byte.
pub fn generate(spec: &DatasetSpec) -> Result<SplitSet> {
    spec.validate()?;
    let make = |count: usize, stream: u64| -> Vec<Sample> {
        let mut rng = stream_rng(spec.seed, stream);
        (0..count).map(|_| draw_sample(spec, &mut rng)).collect()
    };
    Ok(SplitSet {
        train: make(spec.train_count, 1),
        val: make(spec.val_count, 2),
        test: make(spec.test_count, 3),
    })
}

fn draw_sample<R: Rng + ?Sized>(spec: &DatasetSpec, rng: &mut R) -> Sample {
    let partition = &spec.partition;
    let k = partition.k();
    let class = rng.random_range(0..k);
    let j = partition.containing_group(class).expect("class in range");
    let blur = partition.is_multiclass(j) && rng.random_bool(spec.composite_ratio);
    let (center, std, label) = if blur {
        (
            spec.group_centroid(j),
            spec.class_std * spec.blur_multiplier,
            LabelVector::group_indicator(partition, j).expect("group in range"),
        )
    } else {
        (
            spec.class_mean(class),
            spec.class_std,
            LabelVector::singleton(class, k).expect("class in range"),
        )
    };
    let features = center
        .iter()
        .map(|&m| m + std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Sample { features, label }
}

#[derive(Serialize, Deserialize)]
struct JsonSample {
    x: Vec<f64>,
    y: Vec<u8>,
}

/// Writes one JSON object per line.
pub fn write_jsonl<P: AsRef<Path>>(samples: &[Sample], path: P) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for sample in samples {
        let record = JsonSample {
            x: sample.features.clone(),
            y: sample.label.bits().iter().map(|&b| b as u8).collect(),
        };
        serde_json::to_writer(&mut out, &record)
            .map_err(|e| Error::Domain(format!("serialization failed: {e}")))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads samples back, validating every label against the partition.
/// Errors carry the 1-based line number.
pub fn read_jsonl<P: AsRef<Path>>(path: P, partition: &Arc<Partition>) -> Result<Vec<Sample>> {
    let reader = BufReader::new(File::open(path)?);
    let mut samples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonSample = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        if record.y.iter().any(|&b| b > 1) {
            return Err(Error::Parse {
                line: lineno,
                msg: "label entries must be 0 or 1".into(),
            });
        }
        let label = LabelVector::new(record.y.iter().map(|&b| b == 1).collect())
            .map_err(|e| Error::Validation { line: lineno, msg: e.to_string() })?;
        label
            .kind(partition)
            .map_err(|e| Error::Validation { line: lineno, msg: e.to_string() })?;
        samples.push(Sample { features: record.x, label });
    }
    Ok(samples)
}

#[derive(Serialize, Deserialize)]
struct JsonDomain {
    k: usize,
    groups: Vec<Vec<usize>>,
}

/// Writes the domain sidecar with 1-based class indices.
pub fn write_domain<P: AsRef<Path>>(partition: &Partition, path: P) -> Result<()> {
    let doc = JsonDomain {
        k: partition.k(),
        groups: partition
            .groups()
            .iter()
            .map(|g| g.iter().map(|&c| c + 1).collect())
            .collect(),
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &doc)
        .map_err(|e| Error::Domain(format!("serialization failed: {e}")))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Reads the domain sidecar, converting 1-based indices back.
pub fn read_domain<P: AsRef<Path>>(path: P) -> Result<Arc<Partition>> {
    let reader = BufReader::new(File::open(path)?);
    let doc: JsonDomain = serde_json::from_reader(reader)
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    let mut groups = Vec::with_capacity(doc.groups.len());
    for group in doc.groups {
        let mut converted = Vec::with_capacity(group.len());
        for idx in group {
            if idx == 0 {
                return Err(Error::Partition(
                    "domain file class indices are 1-based; found 0".into(),
                ));
            }
            converted.push(idx - 1);
        }
        groups.push(converted);
    }
    Ok(Arc::new(Partition::new(doc.k, groups)?))
}
