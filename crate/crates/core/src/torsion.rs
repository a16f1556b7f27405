//! Splittings `C_p = B_p ⊕ ℓ(H_p) ⊕ s(B_{p-1})` and the torsion of a based
//! chain complex as an alternating product of determinants.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::complex::{ChainComplex, ComplexError, HomologyData};
use crate::linalg::{
    c64, decompose, det, hstack, random_gaussian, relative_error, spectral_norm, CMatrix,
    LinalgError,
};

/// Allowed `‖D_p s_p - b_{p-1}‖` relative to `max(1, ‖b_{p-1}‖)`.
pub const SECTION_TOL: f64 = 1e-8;

/// Pass threshold of the independence check.
pub const INDEPENDENCE_TOL: f64 = 1e-6;

/// `|det|` below this (relative to the product of column norms) is singular.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorsionError {
    #[error("bad homology basis in degree {degree}: {reason}")]
    BadHomologyBasis { degree: usize, reason: String },
    #[error("splitting failure in degree {degree}: {reason}")]
    SplittingFailure { degree: usize, reason: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The three column groups of one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSplitting {
    /// Basis of `B_p`.
    pub b: CMatrix,
    /// Cycle representatives of the chosen homology basis.
    pub h: CMatrix,
    /// Preimages of `b_{p-1}` under `D_p`.
    pub s: CMatrix,
}

impl DegreeSplitting {
    /// `[b | h | s]` in standard coordinates.
    pub fn frame(&self) -> CMatrix {
        hstack(&[&self.b, &self.h, &self.s])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomologySplitting {
    degrees: Vec<DegreeSplitting>,
}

impl HomologySplitting {
    /// Checks shapes and `D_p s_p = b_{p-1}`; full rank is checked when the
    /// torsion is evaluated.
    pub fn new(cc: &ChainComplex, degrees: Vec<DegreeSplitting>) -> Result<Self, TorsionError> {
        if degrees.len() != cc.dims().len() {
            return Err(TorsionError::SplittingFailure {
                degree: degrees.len(),
                reason: format!("expected {} degrees", cc.dims().len()),
            });
        }
        for (p, d) in degrees.iter().enumerate() {
            let n = cc.dim(p);
            if d.b.nrows() != n || d.h.nrows() != n || d.s.nrows() != n {
                return Err(TorsionError::SplittingFailure {
                    degree: p,
                    reason: "vectors have the wrong length".into(),
                });
            }
            let prev = match p.checked_sub(1) {
                Some(q) => degrees[q].b.clone(),
                None => CMatrix::zeros(0, 0),
            };
            if d.s.ncols() != prev.ncols() {
                return Err(TorsionError::SplittingFailure {
                    degree: p,
                    reason: format!(
                        "{} section vectors for {} boundary vectors",
                        d.s.ncols(),
                        prev.ncols()
                    ),
                });
            }
            if p > 0 && d.s.ncols() > 0 {
                let r = spectral_norm(&(cc.boundary(p) * &d.s - &prev));
                if r > SECTION_TOL * spectral_norm(&prev).max(1.0) {
                    return Err(TorsionError::SplittingFailure {
                        degree: p,
                        reason: format!("section residual {r:e}"),
                    });
                }
            }
        }
        Ok(HomologySplitting { degrees })
    }

    pub fn degrees(&self) -> &[DegreeSplitting] {
        &self.degrees
    }

    pub fn degree(&self, p: usize) -> &DegreeSplitting {
        &self.degrees[p]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorsionResult {
    pub value: Complex64,
    /// Always false: the sign depends on the fixed `b, h, s` ordering.
    pub sign_normalized: bool,
    /// The bracket `[e_p, c_p] = det([b | h | s])⁻¹` of each degree.
    pub per_degree_determinants: Vec<Complex64>,
}

impl TorsionResult {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// Validates `h_bases` against `hd` and completes them to a splitting with
/// orthonormal `b_p` and minimum-norm sections.
pub fn build_splitting(
    cc: &ChainComplex,
    hd: &HomologyData,
    h_bases: &[CMatrix],
) -> Result<HomologySplitting, TorsionError> {
    if h_bases.len() != cc.dims().len() {
        return Err(TorsionError::BadHomologyBasis {
            degree: h_bases.len().min(cc.dims().len()),
            reason: format!(
                "{} bases given for {} degrees",
                h_bases.len(),
                cc.dims().len()
            ),
        });
    }
    let mut degrees = Vec::with_capacity(h_bases.len());
    for (p, h) in h_bases.iter().enumerate() {
        check_homology_basis(cc, hd, p, h)?;
        let b = hd.degree(p).boundaries.clone();
        let s = match (p.checked_sub(1), hd.decomposition(p)) {
            (Some(q), Some(dec)) => dec.pseudo_solve(&hd.degree(q).boundaries),
            _ => CMatrix::zeros(cc.dim(p), 0),
        };
        degrees.push(DegreeSplitting { b, h: h.clone(), s });
    }
    HomologySplitting::new(cc, degrees)
}

pub(crate) fn check_homology_basis(
    cc: &ChainComplex,
    hd: &HomologyData,
    p: usize,
    h: &CMatrix,
) -> Result<(), TorsionError> {
    let bad = |reason: String| TorsionError::BadHomologyBasis { degree: p, reason };
    let betti = hd.betti(p);
    if h.nrows() != cc.dim(p) {
        return Err(bad(format!(
            "vectors have length {}, expected {}",
            h.nrows(),
            cc.dim(p)
        )));
    }
    if h.ncols() != betti {
        return Err(bad(format!(
            "{} vectors given, betti number is {betti}",
            h.ncols()
        )));
    }
    if betti == 0 {
        return Ok(());
    }
    let canonical = &hd.degree(p).h_basis;
    let coords = hd.class_coordinates(p, canonical, h).map_err(|e| match e {
        ComplexError::NotACycle { residual, .. } => {
            bad(format!("a vector is not a cycle (residual {residual:e})"))
        }
        other => other.into(),
    })?;
    let dec = decompose(&coords, hd.tol()).map_err(TorsionError::from)?;
    if dec.rank < betti {
        return Err(bad("classes are dependent modulo boundaries".into()));
    }
    Ok(())
}

/// `Π_p det([b_p | h_p | s_p])^((-1)^p)` in standard coordinates.
pub fn torsion(
    cc: &ChainComplex,
    split: &HomologySplitting,
) -> Result<TorsionResult, TorsionError> {
    if split.degrees().len() != cc.dims().len() {
        return Err(TorsionError::SplittingFailure {
            degree: split.degrees().len(),
            reason: format!(
                "splitting has {} degrees, complex has {}",
                split.degrees().len(),
                cc.dims().len()
            ),
        });
    }
    let mut value = c64(1.0, 0.0);
    let mut brackets = Vec::with_capacity(split.degrees().len());
    for (p, d) in split.degrees().iter().enumerate() {
        let frame = d.frame();
        if frame.nrows() != frame.ncols() || frame.nrows() != cc.dim(p) {
            return Err(TorsionError::SplittingFailure {
                degree: p,
                reason: format!(
                    "{} vectors in a space of dimension {}",
                    frame.ncols(),
                    frame.nrows()
                ),
            });
        }
        let m = det(&frame);
        let scale: f64 = frame.column_iter().map(|c| c.norm()).product();
        if !m.norm().is_finite() || m.norm() <= SINGULAR_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(TorsionError::SplittingFailure {
                degree: p,
                reason: "transition matrix is singular".into(),
            });
        }
        let bracket = m.inv();
        brackets.push(bracket);
        value *= if p % 2 == 1 { bracket } else { m };
    }
    Ok(TorsionResult {
        value,
        sign_normalized: false,
        per_degree_determinants: brackets,
    })
}

/// `build_splitting` followed by `torsion`.
pub fn torsion_with_bases(
    cc: &ChainComplex,
    hd: &HomologyData,
    h_bases: &[CMatrix],
) -> Result<TorsionResult, TorsionError> {
    torsion(cc, &build_splitting(cc, hd, h_bases)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub trials: usize,
    pub reference: Complex64,
    pub max_relative_deviation: f64,
    pub pass: bool,
}

/// Recomputes the torsion with random bases of every `B_p`, random cycle
/// representatives of the same classes and random valid sections.
pub fn torsion_independence_check<R: Rng + ?Sized>(
    cc: &ChainComplex,
    hd: &HomologyData,
    h_bases: &[CMatrix],
    trials: usize,
    rng: &mut R,
) -> Result<IndependenceReport, TorsionError> {
    let base = build_splitting(cc, hd, h_bases)?;
    let reference = torsion(cc, &base)?.value;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut degrees: Vec<DegreeSplitting> = Vec::with_capacity(base.degrees().len());
        for (p, d) in base.degrees().iter().enumerate() {
            let k = d.b.ncols();
            let b = &d.b * random_invertible(rng, k);
            let bound = &hd.degree(p).boundaries;
            let h = &d.h + bound * random_gaussian(rng, bound.ncols(), d.h.ncols());
            let s = match (p.checked_sub(1), hd.decomposition(p)) {
                (Some(q), Some(dec)) => {
                    let target = &degrees[q].b;
                    let cycles = &hd.degree(p).cycles;
                    dec.pseudo_solve(target)
                        + cycles * random_gaussian(rng, cycles.ncols(), target.ncols())
                }
                _ => d.s.clone(),
            };
            degrees.push(DegreeSplitting { b, h, s });
        }
        let split = HomologySplitting::new(cc, degrees)?;
        let value = torsion(cc, &split)?.value;
        worst = worst.max(relative_error(value, reference));
    }
    Ok(IndependenceReport {
        trials,
        reference,
        max_relative_deviation: worst,
        pass: worst <= INDEPENDENCE_TOL,
    })
}

/// A well-conditioned random square matrix.
fn random_invertible<R: Rng + ?Sized>(rng: &mut R, k: usize) -> CMatrix {
    loop {
        let m = random_gaussian(rng, k, k);
        let ok = decompose(&m, 1e-8)
            .map(|d| {
                d.singular_values
                    .last()
                    .is_none_or(|&s| s > 1e-3 * d.singular_values[0])
            })
            .unwrap_or(false);
        if ok {
            return m;
        }
    }
}
