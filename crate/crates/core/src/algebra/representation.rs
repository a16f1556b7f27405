use std::f64::consts::PI;

use num_complex::Complex64;

use super::{killing_form, AlgebraError, GroupPresentation, LieAlgebraBasis, Word};
use crate::linalg::{c64, det, identity, spectral_norm, CMatrix};

/// Largest allowed `|det - 1|` for a generator image.
pub const DET_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Target {
    #[serde(rename = "SL")]
    Sl,
    #[serde(rename = "PSL")]
    Psl,
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Sl => write!(f, "SL"),
            Target::Psl => write!(f, "PSL"),
        }
    }
}

/// Generator images in `SL_n(C)`; `PSL_n` images are stored as `SL_n`
/// lifts and compared modulo the center.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    target: Target,
    n: usize,
    images: Vec<CMatrix>,
    inverses: Vec<CMatrix>,
}

impl Representation {
    pub fn new(target: Target, n: usize, images: Vec<CMatrix>) -> Result<Self, AlgebraError> {
        let mut inverses = Vec::with_capacity(images.len());
        for (i, m) in images.iter().enumerate() {
            if m.shape() != (n, n) {
                return Err(AlgebraError::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
            let d = det(m);
            if (d - c64(1.0, 0.0)).norm() > DET_TOL {
                return Err(AlgebraError::NotUnimodular {
                    generator: i,
                    det: d,
                });
            }
            let inv = m.clone().try_inverse().ok_or(AlgebraError::NotUnimodular {
                generator: i,
                det: d,
            })?;
            inverses.push(inv);
        }
        Ok(Representation {
            target,
            n,
            images,
            inverses,
        })
    }

    /// The representation sending every one of `generators` to the identity.
    pub fn trivial(target: Target, n: usize, generators: usize) -> Self {
        Representation::new(target, n, vec![identity(n); generators])
            .expect("identity is unimodular")
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generator_count(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    /// `g ρ g⁻¹` for a fixed matrix `g` of determinant one.
    pub fn conjugate(&self, g: &CMatrix) -> Result<Self, AlgebraError> {
        let g_inv = g.clone().try_inverse().ok_or(AlgebraError::NotUnimodular {
            generator: 0,
            det: det(g),
        })?;
        let images = self.images.iter().map(|m| g * m * &g_inv).collect();
        Representation::new(self.target, self.n, images)
    }
}

/// Product of generator images along `w`; the empty word maps to the identity.
pub fn evaluate_word(rep: &Representation, w: &Word) -> Result<CMatrix, AlgebraError> {
    let mut out = identity(rep.n);
    for &(g, e) in w.syllables() {
        let g = g as usize;
        if g >= rep.images.len() {
            return Err(AlgebraError::GeneratorOutOfRange {
                index: g,
                count: rep.images.len(),
            });
        }
        let m = if e > 0 {
            &rep.images[g]
        } else {
            &rep.inverses[g]
        };
        for _ in 0..e.unsigned_abs() {
            out = &out * m;
        }
    }
    Ok(out)
}

/// Matrix of `X ↦ g X g⁻¹` in `basis`, entry `(i, j) = B(a_i, g a_j g⁻¹)`.
pub fn adjoint_of_matrix(g: &CMatrix, basis: &LieAlgebraBasis) -> Result<CMatrix, AlgebraError> {
    let g_inv = g.clone().try_inverse().ok_or(AlgebraError::NotUnimodular {
        generator: 0,
        det: det(g),
    })?;
    let d = basis.dim();
    let mut out = CMatrix::zeros(d, d);
    for (j, a_j) in basis.vectors().iter().enumerate() {
        let moved = g * a_j * &g_inv;
        for (i, a_i) in basis.vectors().iter().enumerate() {
            out[(i, j)] = killing_form(a_i, &moved)?;
        }
    }
    Ok(out)
}

pub fn adjoint_matrix(
    rep: &Representation,
    basis: &LieAlgebraBasis,
    w: &Word,
) -> Result<CMatrix, AlgebraError> {
    if basis.n() != rep.n() {
        return Err(AlgebraError::DimensionMismatch {
            expected: rep.n(),
            found: basis.n(),
        });
    }
    adjoint_of_matrix(&evaluate_word(rep, w)?, basis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationCheck {
    pub ok: bool,
    pub generator_count_matches: bool,
    /// Operator-norm distance of each relator image from the allowed center.
    pub residuals: Vec<f64>,
}

/// Checks that every relator maps to the identity (SL) or into the center
/// `{ωI : ωⁿ = 1}` (PSL) within `tol`.
pub fn check_representation(
    pres: &GroupPresentation,
    rep: &Representation,
    tol: f64,
) -> RepresentationCheck {
    if pres.generator_count() != rep.generator_count() {
        return RepresentationCheck {
            ok: false,
            generator_count_matches: false,
            residuals: Vec::new(),
        };
    }
    let n = rep.n();
    let center: Vec<Complex64> = match rep.target() {
        Target::Sl => vec![c64(1.0, 0.0)],
        Target::Psl => (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect(),
    };
    let mut residuals = Vec::with_capacity(pres.relators().len());
    for r in pres.relators() {
        let residual = match evaluate_word(rep, r) {
            Ok(m) => center
                .iter()
                .map(|&w| spectral_norm(&(&m - identity(n) * w)))
                .fold(f64::INFINITY, f64::min),
            Err(_) => f64::INFINITY,
        };
        residuals.push(residual);
    }
    RepresentationCheck {
        ok: residuals.iter().all(|&r| r <= tol),
        generator_count_matches: true,
        residuals,
    }
}
