//! Row-major image grids, identified with points in R^n (n = rows·cols).

use crate::error::{Error, Result};
use crate::num;
use crate::scalar::{cst, Real};

/// An m₁×m₂ real image stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Real> ImageGrid<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("grid dimensions must be positive".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "grid expects {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if !num::all_finite(&values) {
            return Err(Error::InvalidInput("grid values must be finite".into()));
        }
        Ok(ImageGrid { rows, cols, values })
    }

    pub fn constant(rows: usize, cols: usize, value: T) -> Result<Self> {
        ImageGrid::new(rows, cols, vec![value; rows * cols])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ImageGrid {
            rows,
            cols,
            values: vec![T::zero(); rows * cols],
        }
    }

    /// Builds a grid from a point in R^n with known shape.
    pub fn from_vec(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        ImageGrid::new(rows, cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Zero-based (row, col) access.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        debug_assert!(i < self.rows && j < self.cols);
        self.values[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.rows && j < self.cols);
        self.values[i * self.cols + j] = v;
    }

    pub fn mean(&self) -> T {
        num::neumaier(self.values.iter().copied()) / cst(self.len() as f64)
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, v| m.min(*v))
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, v| m.max(*v))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        ImageGrid {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_access() {
        let g = ImageGrid::new(2, 3, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(g.at(1, 2), 5.0);
        assert_eq!(g.rows(), 2);
        assert_eq!(g.cols(), 3);
        assert_eq!(g.mean(), 2.5);
    }

    #[test]
    fn rejects_non_finite_and_bad_shape() {
        assert!(ImageGrid::new(1, 2, vec![f64::NAN, 0.0]).is_err());
        assert!(ImageGrid::new(2, 2, vec![0.0; 3]).is_err());
        assert!(ImageGrid::new(0, 2, Vec::<f64>::new()).is_err());
    }
}
