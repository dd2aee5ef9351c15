//! Full dense real-symmetric eigendecomposition.
//!
//! Every spectral consumer in the crate goes through [`eig_symmetric`]. The
//! heavy lifting (Householder tridiagonalization followed by a tridiagonal
//! eigensolver) is delegated to `faer`, built without its thread pool so a
//! given matrix always yields bit-identical output; parallelism happens across
//! matrices instead.

use faer::Side;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Column-major `n x n` eigenvector matrix, column `k` pairs with
    /// `eigenvalues[k]`.
    pub eigenvectors: Option<Vec<f64>>,
    /// Total-occupation expectation per eigenvector, when computed.
    pub number_expectations: Option<Vec<f64>>,
}

impl SpectrumResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Option<&[f64]> {
        let n = self.dim();
        self.eigenvectors.as_deref().map(|v| &v[k * n..(k + 1) * n])
    }
}

pub fn eig_symmetric(h: &SymmetricMatrix, want_vectors: bool) -> Result<SpectrumResult> {
    let n = h.dim();
    if !h.is_finite() {
        return Err(Error::Input("matrix contains non-finite entries".into()));
    }
    if n == 0 {
        return Ok(SpectrumResult {
            eigenvalues: Vec::new(),
            eigenvectors: want_vectors.then(Vec::new),
            number_expectations: None,
        });
    }
    let a = h.to_faer();
    let diagnostics = || format!("dim {n}, max |entry| {:.3e}, trace {:.6e}", h.max_abs(), h.trace());
    if want_vectors {
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed ({e:?}); {}", diagnostics())))?;
        let s = evd.S();
        let u = evd.U();
        let eigenvalues: Vec<f64> = (0..n).map(|k| s[k]).collect();
        let mut vecs = Vec::with_capacity(n * n);
        for k in 0..n {
            for i in 0..n {
                vecs.push(u[(i, k)]);
            }
        }
        Ok(SpectrumResult {
            eigenvalues,
            eigenvectors: Some(vecs),
            number_expectations: None,
        })
    } else {
        let eigenvalues = a
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed ({e:?}); {}", diagnostics())))?;
        Ok(SpectrumResult {
            eigenvalues,
            eigenvectors: None,
            number_expectations: None,
        })
    }
}

/// Expectation of the total occupation `sum_i n_i` in each eigenvector, given
/// the total occupation of every basis state.
pub fn number_expectations(result: &SpectrumResult, occupation_labels: &[usize]) -> Result<Vec<f64>> {
    let n = result.dim();
    let vecs = result
        .eigenvectors
        .as_deref()
        .ok_or_else(|| Error::Input("number expectations need eigenvectors".into()))?;
    if occupation_labels.len() != n {
        return Err(Error::Input(format!(
            "{} occupation labels for a {n}-dimensional spectrum",
            occupation_labels.len()
        )));
    }
    Ok((0..n)
        .map(|k| {
            vecs[k * n..(k + 1) * n]
                .iter()
                .zip(occupation_labels)
                .map(|(c, &occ)| c * c * occ as f64)
                .sum()
        })
        .collect())
}

/// Convenience wrapper that stores the expectations on the result.
pub fn attach_number_expectations(result: &mut SpectrumResult, occupation_labels: &[usize]) -> Result<()> {
    let exp = number_expectations(result, occupation_labels)?;
    result.number_expectations = Some(exp);
    Ok(())
}
