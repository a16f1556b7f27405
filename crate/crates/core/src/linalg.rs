//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra` matrices; singular value decompositions come from
//! `faer`. Ranks are decided
//! against a relative threshold `tol * max(sigma_max, 1)`; singular values
//! that land within a factor of ten of that threshold are reported as an
//! ambiguity instead of being silently rounded one way or the other.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default relative rank threshold.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Width of the window around the rank threshold that counts as ambiguous.
const AMBIGUITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("ambiguous numerical rank: threshold {threshold:e}, singular values {spectrum:?}")]
    RankAmbiguity { threshold: f64, spectrum: Vec<f64> },
    #[error("singular matrix where an invertible one was required")]
    Singular,
    #[error("system has no solution: residual {residual:e}")]
    Inconsistent { residual: f64 },
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    full_svd(m).1.first().cloned().unwrap_or(0.0)
}

/// Full SVD `m = U diag(σ) Vᴴ` with `σ` nonincreasing.
fn full_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let a = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = a.svd().expect("SVD converges");
    let u = CMatrix::from_fn(rows, rows, |i, j| svd.U()[(i, j)]);
    let v = CMatrix::from_fn(cols, cols, |i, j| svd.V()[(i, j)]);
    let sigma = svd.S().column_vector().iter().map(|z| z.re).collect();
    (u, sigma, v)
}

/// Determinant with the empty-matrix convention `det([]) = 1`.
pub fn det(m: &CMatrix) -> Complex64 {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().determinant()
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub rank: usize,
    pub threshold: f64,
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of the column space, `nrows x rank`.
    pub image: CMatrix,
    /// Orthonormal basis of the kernel, `ncols x (ncols - rank)`.
    pub kernel: CMatrix,
    /// Orthonormal basis of the row space (orthogonal complement of the kernel).
    pub coimage: CMatrix,
}

impl Decomposition {
    /// Rank-truncated pseudo-inverse applied to the columns of `rhs`.
    pub fn pseudo_solve(&self, rhs: &CMatrix) -> CMatrix {
        // x = V_r Σ_r^{-1} U_r^H rhs
        let proj = self.image.adjoint() * rhs;
        let mut scaled = proj;
        for (i, s) in self.singular_values.iter().take(self.rank).enumerate() {
            let inv = 1.0 / s;
            scaled.row_mut(i).iter_mut().for_each(|z| *z *= inv);
        }
        &self.coimage * scaled
    }
}

/// Rank-revealing decomposition of an arbitrary complex matrix.
pub fn decompose(m: &CMatrix, tol: f64) -> Result<Decomposition, LinalgError> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Decomposition {
            rank: 0,
            threshold: tol,
            singular_values: Vec::new(),
            image: CMatrix::zeros(rows, 0),
            kernel: identity(cols),
            coimage: CMatrix::zeros(cols, 0),
        });
    }
    let (u, sigma, v) = full_svd(m);
    let sigma_max = sigma.first().cloned().unwrap_or(0.0);
    let threshold = tol * sigma_max.max(1.0);

    let lo = threshold / AMBIGUITY_FACTOR;
    let hi = threshold * AMBIGUITY_FACTOR;
    if sigma.iter().any(|&s| s > lo && s <= hi) {
        return Err(LinalgError::RankAmbiguity {
            threshold,
            spectrum: sigma,
        });
    }
    let rank = sigma.iter().filter(|&&s| s > threshold).count();
    let image = u.view((0, 0), (rows, rank)).into_owned();
    let coimage = v.columns(0, rank).into_owned();
    let kernel = v.columns(rank, cols - rank).into_owned();
    Ok(Decomposition {
        rank,
        threshold,
        singular_values: sigma,
        image,
        kernel,
        coimage,
    })
}

pub fn rank(m: &CMatrix, tol: f64) -> Result<usize, LinalgError> {
    decompose(m, tol).map(|d| d.rank)
}

/// Minimum-norm solution of `m x = rhs` (column by column); fails when the
/// residual is not small relative to `rhs`.
pub fn min_norm_solve(m: &CMatrix, rhs: &CMatrix, tol: f64) -> Result<CMatrix, LinalgError> {
    let dec = decompose(m, tol)?;
    let x = dec.pseudo_solve(rhs);
    let residual = residual_norm(&(m * &x), rhs);
    let scale = spectral_norm(rhs).max(1.0);
    if residual > 1e3 * tol * scale {
        return Err(LinalgError::Inconsistent { residual });
    }
    Ok(x)
}

fn residual_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    spectral_norm(&(a - b))
}

/// Orthonormal basis of the part of `span(sub)` orthogonal to `span(remove)`,
/// where `remove` has orthonormal columns. Returns exactly `count` vectors.
pub fn orthogonal_part(sub: &CMatrix, remove: &CMatrix, count: usize) -> CMatrix {
    let n = sub.nrows();
    if count == 0 || sub.ncols() == 0 {
        return CMatrix::zeros(n, 0);
    }
    let w = if remove.ncols() == 0 {
        sub.clone()
    } else {
        sub - remove * (remove.adjoint() * sub)
    };
    full_svd(&w).0.columns(0, count).into_owned()
}

/// Rescales each column so that its entry of largest modulus is real and
/// positive. Used to make SVD-derived bases reproducible.
pub fn normalize_phases(m: &mut CMatrix) {
    for mut col in m.column_iter_mut() {
        let mut best = Complex64::new(0.0, 0.0);
        let mut best_abs = 0.0;
        for z in col.iter() {
            // Ties broken by the first index within rounding.
            if z.norm() > best_abs * (1.0 + 1e-9) {
                best_abs = z.norm();
                best = *z;
            }
        }
        if best_abs > 0.0 {
            let phase = best.conj() / best_abs;
            col.iter_mut().for_each(|z| *z *= phase);
        }
    }
}

pub fn hstack(parts: &[&CMatrix]) -> CMatrix {
    let rows = parts.first().map(|p| p.nrows()).unwrap_or(0);
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, at), (rows, p.ncols())).copy_from(*p);
        at += p.ncols();
    }
    out
}

pub fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_gaussian<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(rand_distr::StandardNormal);
        let im: f64 = rng.sample(rand_distr::StandardNormal);
        c64(re, im)
    })
}

/// Relative distance `|a - b| / |b|`.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    let denom = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / denom
}

/// Relative distance in `C* / {±1}`.
pub fn relative_error_up_to_sign(a: Complex64, b: Complex64) -> f64 {
    relative_error(a, b).min(relative_error(-a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c64(x, 0.0)))
    }

    #[test]
    fn kernel_and_image_of_wide_matrix() {
        let m = real(1, 3, &[1.0, 1.0, 0.0]);
        let d = decompose(&m, DEFAULT_TOL).unwrap();
        assert_eq!(d.rank, 1);
        assert_eq!(d.kernel.shape(), (3, 2));
        assert!(spectral_norm(&(&m * &d.kernel)) < 1e-14);
        assert_eq!(d.image.shape(), (1, 1));
    }

    #[test]
    fn empty_determinant_is_one() {
        assert_eq!(det(&CMatrix::zeros(0, 0)), c64(1.0, 0.0));
    }

    #[test]
    fn ambiguous_spectrum_is_reported() {
        let m = real(2, 2, &[1.0, 0.0, 0.0, 1e-8]);
        assert!(matches!(
            decompose(&m, 1e-8),
            Err(LinalgError::RankAmbiguity { .. })
        ));
    }

    #[test]
    fn noise_below_unit_floor_is_rank_zero() {
        let m = real(2, 2, &[1e-16, 0.0, 0.0, -3e-17]);
        assert_eq!(rank(&m, DEFAULT_TOL).unwrap(), 0);
    }

    #[test]
    fn min_norm_solve_recovers_preimage() {
        let m = real(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        let rhs = real(2, 1, &[3.0, 4.0]);
        let x = min_norm_solve(&m, &rhs, DEFAULT_TOL).unwrap();
        assert!((x[(0, 0)] - c64(3.0, 0.0)).norm() < 1e-14);
        assert!((x[(1, 0)] - c64(2.0, 0.0)).norm() < 1e-14);
        assert!(x[(2, 0)].norm() < 1e-14);
        let bad = real(2, 1, &[0.0, 0.0]);
        let zero = real(2, 3, &[0.0; 6]);
        assert!(min_norm_solve(&zero, &bad, DEFAULT_TOL).is_ok());
        assert!(min_norm_solve(&zero, &rhs, DEFAULT_TOL).is_err());
    }

    #[test]
    fn orthogonal_part_removes_subspace() {
        let sub = identity(3);
        let remove = real(3, 1, &[1.0, 0.0, 0.0]);
        let w = orthogonal_part(&sub, &remove, 2);
        assert!(spectral_norm(&(remove.adjoint() * &w)) < 1e-14);
        assert!(spectral_norm(&(w.adjoint() * &w - identity(2))) < 1e-14);
    }
}
