use crate::error::{Error, Result};

/// Dense real symmetric matrix stored as a packed lower triangle.
///
/// Entry `(i, j)` with `j <= i` lives at `i * (i + 1) / 2 + j`; reads of the
/// upper triangle are served from the mirrored slot, so the matrix is exactly
/// symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    packed: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            packed: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    /// Builds a matrix from a function evaluated on the lower triangle.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                m.packed[i * (i + 1) / 2 + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major dense data, requiring exact symmetry.
    pub fn from_dense(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Input(format!(
                "dense data has {} entries, expected {}",
                data.len(),
                dim * dim
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::Input(format!("entry ({i}, {j}) differs from its transpose")));
                }
            }
        }
        Ok(Self::from_lower_fn(dim, |i, j| data[i * dim + j]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn slot(i: usize, j: usize) -> usize {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        hi * (hi + 1) / 2 + lo
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.dim && j < self.dim);
        self.packed[Self::slot(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.packed[Self::slot(i, j)] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.packed[Self::slot(i, j)] += value;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let v = self.get(i, j);
                acc += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = self.get(i, j);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    /// `y = H x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let row = &self.packed[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            for j in 0..i {
                y[i] += row[j] * x[j];
                y[j] += row[j] * x[i];
            }
            y[i] += row[i] * x[i];
        }
        y
    }

    /// Number of structurally nonzero entries in the lower triangle.
    pub fn nnz_lower(&self) -> usize {
        self.packed.iter().filter(|v| **v != 0.0).count()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            packed: self.packed.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn shift_diagonal(&mut self, shift: f64) {
        for i in 0..self.dim {
            self.add(i, i, shift);
        }
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}
