use crate::error::{param, Result};

/// `n` points in `R^d`, stored row-major. Indices `0..n` are stable for the
/// lifetime of a run; work items refer to points by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return param("dimension must be positive");
        }
        if values.len() != n * d {
            return param(format!(
                "expected {} values for {n} points in dimension {d}, got {}",
                n * d,
                values.len()
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return param(format!(
                "point {} coordinate {} is not finite",
                pos / d,
                pos % d
            ));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return param("cannot infer dimension of an empty row list");
        };
        let d = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return param(format!("row {i} has length {}, expected {d}", row.len()));
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), d, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d)
    }

    /// Row-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// All indices `0..n`.
    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
}
