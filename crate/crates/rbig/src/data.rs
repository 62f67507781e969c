//! Sample matrix type shared by every estimator: rows are samples,
//! columns are dimensions.

use nalgebra::DMatrix;

use crate::error::{RbigError, Result};

/// An N×D matrix of samples (rows) by dimensions (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(pub DMatrix<f64>);

impl DataMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        DataMatrix(m)
    }

    /// Builds from a row-major flat slice (the CSV and C-API layout).
    pub fn from_row_major(n: usize, d: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * d {
            return Err(RbigError::Data(format!(
                "expected {n}x{d} = {} values, got {}",
                n * d,
                values.len()
            )));
        }
        Ok(DataMatrix(DMatrix::from_row_slice(n, d, values)))
    }

    pub fn n_samples(&self) -> usize {
        self.0.nrows()
    }

    pub fn dims(&self) -> usize {
        self.0.ncols()
    }

    /// Copy of column j.
    pub fn column_vec(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    /// Column-wise concatenation of two sample sets with equal row counts.
    pub fn hstack(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if self.n_samples() != other.n_samples() {
            return Err(RbigError::Data(format!(
                "row-count mismatch: {} vs {}",
                self.n_samples(),
                other.n_samples()
            )));
        }
        let n = self.n_samples();
        let d = self.dims() + other.dims();
        let mut out = DMatrix::zeros(n, d);
        out.view_mut((0, 0), (n, self.dims())).copy_from(&self.0);
        out.view_mut((0, self.dims()), (n, other.dims()))
            .copy_from(&other.0);
        Ok(DataMatrix(out))
    }

    /// Errors if any entry is NaN or infinite.
    pub fn ensure_finite(&self) -> Result<()> {
        for (idx, v) in self.0.iter().enumerate() {
            if !v.is_finite() {
                let (r, c) = (idx % self.0.nrows(), idx / self.0.nrows());
                return Err(RbigError::Data(format!(
                    "non-finite value {v} at row {r}, column {c}"
                )));
            }
        }
        Ok(())
    }
}
