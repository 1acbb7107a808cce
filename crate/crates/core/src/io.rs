//! Binary dataset files and their ground-truth sidecars.
//!
//! Dataset layout, all integers and floats little-endian:
//!
//! ```text
//! magic     16 bytes  "LISTDEC-DATASET\0"
//! n         u64
//! d         u64
//! version   u32
//! flags     u32
//! values    n·d f64, row-major
//! ```
//!
//! The sidecar (same stem, `.truth` extension) holds:
//!
//! ```text
//! magic     16 bytes  "LISTDEC-TRUTH\0\0\0"
//! n, d, k   u64 each
//! seed      u64
//! nnz       u64
//! entries   nnz × (u64 index, f64 value)
//! mask      ⌈n/8⌉ bytes, bit i (LSB first) set when sample i is an inlier
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::Dataset;
use crate::datagen::LabeledDataset;
use crate::error::{Error, Result};

pub const DATASET_MAGIC: &[u8; 16] = b"LISTDEC-DATASET\0";
pub const TRUTH_MAGIC: &[u8; 16] = b"LISTDEC-TRUTH\0\0\0";
pub const FORMAT_VERSION: u32 = 1;

const HEADER_LEN: usize = 16 + 8 + 8 + 4 + 4;

/// Ground truth stored next to a generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub k: usize,
    pub seed: u64,
    pub true_mean: Vec<f64>,
    pub inlier_mask: Vec<bool>,
}

pub fn encode_dataset(data: &Dataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * data.as_slice().len());
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(&(data.n() as u64).to_le_bytes());
    out.extend_from_slice(&(data.d() as u64).to_le_bytes());
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in data.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("file is truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("size does not fit".into()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Ok(())
    }
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Dataset> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(16)? != DATASET_MAGIC {
        return Err(Error::Format("bad dataset magic".into()));
    }
    let n = r.usize()?;
    let d = r.usize()?;
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let _flags = r.u32()?;
    let count = n
        .checked_mul(d)
        .filter(|c| c.checked_mul(8) == Some(bytes.len() - HEADER_LEN))
        .ok_or_else(|| Error::Format("payload length does not match n·d".into()))?;
    let values = (0..count).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Dataset::new(n, d, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn encode_truth(truth: &Truth) -> Vec<u8> {
    let n = truth.inlier_mask.len();
    let nonzero: Vec<(usize, f64)> = truth
        .true_mean
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i, *v))
        .collect();
    let mut out = Vec::new();
    out.extend_from_slice(TRUTH_MAGIC);
    for v in [n, truth.true_mean.len(), truth.k] {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    out.extend_from_slice(&truth.seed.to_le_bytes());
    out.extend_from_slice(&(nonzero.len() as u64).to_le_bytes());
    for (i, v) in nonzero {
        out.extend_from_slice(&(i as u64).to_le_bytes());
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut mask = vec![0u8; n.div_ceil(8)];
    for (i, &b) in truth.inlier_mask.iter().enumerate() {
        if b {
            mask[i / 8] |= 1 << (i % 8);
        }
    }
    out.extend_from_slice(&mask);
    out
}

pub fn decode_truth(bytes: &[u8]) -> Result<Truth> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(16)? != TRUTH_MAGIC {
        return Err(Error::Format("bad truth magic".into()));
    }
    let n = r.usize()?;
    let d = r.usize()?;
    let k = r.usize()?;
    let seed = r.u64()?;
    let nnz = r.usize()?;
    if nnz > d {
        return Err(Error::Format("more mean entries than coordinates".into()));
    }
    let mut true_mean = vec![0.0; d];
    for _ in 0..nnz {
        let i = r.usize()?;
        let v = r.f64()?;
        if i >= d {
            return Err(Error::Format("mean index out of range".into()));
        }
        true_mean[i] = v;
    }
    let mask = r.take(n.div_ceil(8))?;
    r.finish()?;
    let inlier_mask = (0..n).map(|i| mask[i / 8] >> (i % 8) & 1 == 1).collect();
    Ok(Truth {
        k,
        seed,
        true_mean,
        inlier_mask,
    })
}

/// `path` with its extension replaced by `truth`.
pub fn truth_path(path: &Path) -> PathBuf {
    path.with_extension("truth")
}

pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    fs::write(path, encode_dataset(data))?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    decode_dataset(&fs::read(path)?)
}

/// Writes the dataset and its sidecar.
pub fn write_labeled(path: &Path, labeled: &LabeledDataset, k: usize) -> Result<()> {
    write_dataset(path, &labeled.dataset)?;
    let truth = Truth {
        k,
        seed: labeled.seed,
        true_mean: labeled.true_mean.clone(),
        inlier_mask: labeled.inlier_mask.clone(),
    };
    fs::write(truth_path(path), encode_truth(&truth))?;
    Ok(())
}

/// The sidecar of `path`, if one exists.
pub fn read_truth(path: &Path) -> Result<Option<Truth>> {
    let tp = truth_path(path);
    if !tp.exists() {
        return Ok(None);
    }
    decode_truth(&fs::read(tp)?).map(Some)
}
