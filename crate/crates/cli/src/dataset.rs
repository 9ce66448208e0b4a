//! Datasets on disk as a tensor file plus a label file, usually addressed by
//! a shared prefix: `PREFIX.strm`, `PREFIX.labels` and, for synthetic data,
//! the ground truth in `PREFIX.truth.strm`.

use std::path::{Path, PathBuf};

use sturm_core::{LabeledDataset, Tensor3};

use crate::error::{IoError, Result};
use crate::labels::{read_labels, write_labels};
use crate::strm::{read_tensors, write_tensors};

/// File names derived from a dataset prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPaths {
    pub tensors: PathBuf,
    pub labels: PathBuf,
    pub truth: PathBuf,
}

impl DatasetPaths {
    pub fn from_prefix(prefix: &Path) -> Self {
        let with = |suffix: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        };
        DatasetPaths {
            tensors: with(".strm"),
            labels: with(".labels"),
            truth: with(".truth.strm"),
        }
    }
}

pub fn read_dataset(tensor_path: &Path, labels_path: &Path) -> Result<LabeledDataset> {
    let (_, samples) = read_tensors(tensor_path)?;
    let labels = read_labels(labels_path)?;
    if labels.len() != samples.len() {
        return Err(IoError::Mismatch(format!(
            "{} has {} labels but {} holds {} samples",
            labels_path.display(),
            labels.len(),
            tensor_path.display(),
            samples.len()
        )));
    }
    Ok(LabeledDataset::new(samples, labels)?)
}

pub fn write_dataset(dataset: &LabeledDataset, tensor_path: &Path, labels_path: &Path) -> Result<()> {
    write_tensors(tensor_path, dataset.dims(), dataset.samples())?;
    write_labels(labels_path, dataset.labels())
}

/// Samples only, for prediction on unlabeled data.
pub fn read_samples(tensor_path: &Path) -> Result<Vec<Tensor3>> {
    Ok(read_tensors(tensor_path)?.1)
}
