use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::AlgebraError;
use crate::linalg::{c64, CMatrix};

/// `B(a, b) = 4 Tr(ab)`.
pub fn killing_form(a: &CMatrix, b: &CMatrix) -> Result<Complex64, AlgebraError> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(AlgebraError::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    // Tr(ab) = Σ_ij a_ij b_ji without forming the product.
    let n = a.nrows();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(tr * 4.0)
}

/// A basis of `sl_n` that is orthonormal for the Killing form.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraBasis {
    n: usize,
    vectors: Vec<CMatrix>,
}

impl LieAlgebraBasis {
    /// Wraps user-supplied vectors after checking tracelessness and
    /// orthonormality to `tol`.
    pub fn new(n: usize, vectors: Vec<CMatrix>, tol: f64) -> Result<Self, AlgebraError> {
        if vectors.len() != n * n - 1 {
            return Err(AlgebraError::NotABasis(format!(
                "expected {} vectors, found {}",
                n * n - 1,
                vectors.len()
            )));
        }
        for (i, a) in vectors.iter().enumerate() {
            if a.shape() != (n, n) {
                return Err(AlgebraError::DimensionMismatch {
                    expected: n,
                    found: a.nrows(),
                });
            }
            if a.trace().norm() > tol {
                return Err(AlgebraError::NotABasis(format!(
                    "vector {i} is not traceless"
                )));
            }
            for (j, b) in vectors.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                let got = killing_form(a, b)?;
                if (got - c64(expected, 0.0)).norm() > tol {
                    return Err(AlgebraError::NotABasis(format!(
                        "B(a{i}, a{j}) = {got}, expected {expected}"
                    )));
                }
            }
        }
        Ok(LieAlgebraBasis { n, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CMatrix] {
        &self.vectors
    }

    /// Coordinates of `x` in this basis, `x_i = B(a_i, x)`.
    pub fn coordinates(&self, x: &CMatrix) -> Result<Vec<Complex64>, AlgebraError> {
        self.vectors.iter().map(|a| killing_form(a, x)).collect()
    }
}

/// The fixed basis `{H, E+F, (E-F)/i} / (2√2)` of `sl_2`.
pub fn orthonormal_sl2_basis() -> LieAlgebraBasis {
    orthonormal_sln_basis(2)
}

/// Killing-orthonormal basis of `sl_n`: normalized diagonal Gell-Mann
/// matrices first, then for each pair `i < j` the symmetric and the
/// `1/i`-scaled antisymmetric off-diagonal matrices.
pub fn orthonormal_sln_basis(n: usize) -> LieAlgebraBasis {
    assert!(n >= 2, "sl_n needs n >= 2");
    let mut vectors = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        let mut d = CMatrix::zeros(n, n);
        for i in 0..k {
            d[(i, i)] = c64(1.0, 0.0);
        }
        d[(k, k)] = c64(-(k as f64), 0.0);
        let norm = (4.0 * (k * (k + 1)) as f64).sqrt();
        vectors.push(d / c64(norm, 0.0));
    }
    let off = 2.0 * SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = CMatrix::zeros(n, n);
            sym[(i, j)] = c64(1.0, 0.0);
            sym[(j, i)] = c64(1.0, 0.0);
            vectors.push(sym / c64(off, 0.0));
            let mut anti = CMatrix::zeros(n, n);
            anti[(i, j)] = c64(1.0, 0.0);
            anti[(j, i)] = c64(-1.0, 0.0);
            vectors.push(anti / c64(0.0, off));
        }
    }
    LieAlgebraBasis { n, vectors }
}
