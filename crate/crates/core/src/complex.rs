//! CW data with group-ring boundary matrices, the twisted chain complex with
//! coefficients in `g` via `Ad ∘ ρ`, and its numerical homology.

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::{
    adjoint_matrix, adjoint_of_matrix, check_representation, AlgebraError, GroupPresentation,
    GroupRingMatrix, LieAlgebraBasis, Representation, Word,
};
use crate::linalg::{
    block_diagonal, c64, decompose, identity, min_norm_solve, normalize_phases, orthogonal_part,
    spectral_norm, CMatrix, Decomposition, LinalgError,
};

/// Highest cell dimension accepted.
pub const MAX_DIMENSION: usize = 3;

/// Relator images must be this close to the (projective) identity.
pub const RELATOR_TOL: f64 = 1e-8;

/// Bound on `‖D_p D_{p+1}‖ / max(1, ‖D_p‖‖D_{p+1}‖)`.
pub const COMPOSITION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("invalid CW data: {0}")]
    InvalidData(String),
    #[error("representation does not satisfy the relators (residuals {residuals:?})")]
    NotARepresentation { residuals: Vec<f64> },
    #[error("boundary maps do not compose to zero at degree {degree}: residual {residual:e} (inconsistent lifts)")]
    InconsistentLifts { degree: usize, residual: f64 },
    #[error("vector is not a cycle in degree {degree}: residual {residual:e}")]
    NotACycle { degree: usize, residual: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A finite CW complex of dimension at most three, described by cell counts
/// and boundary matrices over `Z[π₁]` written relative to chosen lifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CwComplexData {
    name: String,
    presentation: GroupPresentation,
    cells: Vec<usize>,
    boundaries: Vec<GroupRingMatrix>,
}

impl CwComplexData {
    /// `boundaries[k]` is `∂_{k+1}` with shape `cells[k] x cells[k+1]`.
    pub fn new(
        name: impl Into<String>,
        presentation: GroupPresentation,
        cells: Vec<usize>,
        boundaries: Vec<GroupRingMatrix>,
    ) -> Result<Self, ComplexError> {
        if cells.is_empty() {
            return Err(ComplexError::InvalidData("no cell counts given".into()));
        }
        if cells.len() > MAX_DIMENSION + 1 {
            return Err(ComplexError::InvalidData(format!(
                "dimension {} exceeds {MAX_DIMENSION}",
                cells.len() - 1
            )));
        }
        if boundaries.len() != cells.len() - 1 {
            return Err(ComplexError::InvalidData(format!(
                "expected {} boundary matrices, found {}",
                cells.len() - 1,
                boundaries.len()
            )));
        }
        for (k, b) in boundaries.iter().enumerate() {
            if b.shape() != (cells[k], cells[k + 1]) {
                return Err(ComplexError::InvalidData(format!(
                    "boundary {} has shape {:?}, expected {:?}",
                    k + 1,
                    b.shape(),
                    (cells[k], cells[k + 1])
                )));
            }
            if let Some(g) = b.max_generator() {
                if g as usize >= presentation.generator_count() {
                    return Err(ComplexError::InvalidData(format!(
                        "boundary {} uses generator {g} but the presentation has {}",
                        k + 1,
                        presentation.generator_count()
                    )));
                }
            }
        }
        Ok(CwComplexData {
            name: name.into(),
            presentation,
            cells,
            boundaries,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn dimension(&self) -> usize {
        self.cells.len() - 1
    }

    /// `∂_p` for `p >= 1`.
    pub fn boundary(&self, p: usize) -> Option<&GroupRingMatrix> {
        p.checked_sub(1).and_then(|k| self.boundaries.get(k))
    }

    pub fn boundaries(&self) -> &[GroupRingMatrix] {
        &self.boundaries
    }

    /// Equal up to the name.
    pub fn same_structure(&self, other: &CwComplexData) -> bool {
        self.presentation == other.presentation
            && self.cells == other.cells
            && self.boundaries == other.boundaries
    }

    /// Betti zero of the complex with trivial integral coefficients.
    pub fn untwisted_betti0(&self) -> usize {
        let m0 = self.cells[0];
        match self.boundary(1) {
            None => m0,
            Some(b) => {
                let aug = b.augmentation();
                let m = CMatrix::from_fn(b.rows(), b.cols(), |r, c| c64(aug[r][c] as f64, 0.0));
                let r = decompose(&m, 1e-10).map(|d| d.rank).unwrap_or(0);
                m0 - r
            }
        }
    }

    /// Replaces the lift of one cell by its translate under `word`.
    ///
    /// Column `cell` of `∂_degree` is multiplied on the right by `word` and
    /// row `cell` of `∂_{degree+1}` on the left by `word⁻¹`.
    pub fn change_lift(&self, change: &LiftChange) -> Result<CwComplexData, ComplexError> {
        let p = change.degree;
        if p >= self.cells.len() || change.cell >= self.cells[p] {
            return Err(ComplexError::InvalidData(format!(
                "no cell {} in degree {p}",
                change.cell
            )));
        }
        let mut out = self.clone();
        if p >= 1 {
            out.boundaries[p - 1].right_mul_column(change.cell, &change.word);
        }
        if p < self.boundaries.len() {
            out.boundaries[p].left_mul_row(change.cell, &change.word.inverse());
        }
        Ok(out)
    }
}

/// `Σ_p (-1)^p m_p`.
pub fn euler_characteristic(cw: &CwComplexData) -> i64 {
    cw.cells
        .iter()
        .enumerate()
        .map(|(p, &m)| if p % 2 == 0 { m as i64 } else { -(m as i64) })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftChange {
    pub degree: usize,
    pub cell: usize,
    pub word: Word,
}

/// A finite-dimensional complex of complex vector spaces
/// `0 → C_top → ... → C_0 → 0` in standard coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    boundaries: Vec<CMatrix>,
}

impl ChainComplex {
    /// `boundaries[k]` is `D_{k+1}: C_{k+1} → C_k`.
    pub fn new(dims: Vec<usize>, boundaries: Vec<CMatrix>) -> Result<Self, ComplexError> {
        if boundaries.len() + 1 != dims.len().max(1) {
            return Err(ComplexError::InvalidData(format!(
                "{} spaces need {} maps, found {}",
                dims.len(),
                dims.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (k, b) in boundaries.iter().enumerate() {
            if b.shape() != (dims[k], dims[k + 1]) {
                return Err(ComplexError::InvalidData(format!(
                    "map {} has shape {:?}, expected {:?}",
                    k + 1,
                    b.shape(),
                    (dims[k], dims[k + 1])
                )));
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn dim(&self, p: usize) -> usize {
        self.dims.get(p).cloned().unwrap_or(0)
    }

    /// `D_p: C_p → C_{p-1}`, a zero matrix of the right shape outside `1..=top`.
    pub fn boundary(&self, p: usize) -> CMatrix {
        match p.checked_sub(1).and_then(|k| self.boundaries.get(k)) {
            Some(b) => b.clone(),
            None => CMatrix::zeros(
                p.checked_sub(1).map(|q| self.dim(q)).unwrap_or(0),
                self.dim(p),
            ),
        }
    }

    pub fn boundaries(&self) -> &[CMatrix] {
        &self.boundaries
    }

    /// Largest scaled residual `‖D_p D_{p+1}‖ / max(1, ‖D_p‖‖D_{p+1}‖)` and its degree.
    pub fn composition_residual(&self) -> (usize, f64) {
        let mut worst = (0, 0.0);
        for k in 1..self.boundaries.len() {
            let a = &self.boundaries[k - 1];
            let b = &self.boundaries[k];
            let scale = (spectral_norm(a) * spectral_norm(b)).max(1.0);
            let r = spectral_norm(&(a * b)) / scale;
            if r > worst.1 {
                worst = (k, r);
            }
        }
        worst
    }

    /// Applies the coordinate change `x ↦ P_p x` in every degree.
    pub fn change_coordinates(&self, changes: &[CMatrix]) -> Result<ChainComplex, ComplexError> {
        if changes.len() != self.dims.len() {
            return Err(ComplexError::InvalidData(
                "one change per degree required".into(),
            ));
        }
        let mut boundaries = Vec::with_capacity(self.boundaries.len());
        for (k, b) in self.boundaries.iter().enumerate() {
            let inv = changes[k + 1]
                .clone()
                .try_inverse()
                .ok_or(LinalgError::Singular)?;
            boundaries.push(&changes[k] * b * inv);
        }
        ChainComplex::new(self.dims.clone(), boundaries)
    }
}

/// The complex `C_*(K; g_Ad_ρ)` in the geometric basis, ordered cell-major:
/// the `d` Lie-algebra vectors of cell 1, then of cell 2, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedChainComplex {
    lie_dim: usize,
    cell_counts: Vec<usize>,
    chain: ChainComplex,
}

impl TwistedChainComplex {
    pub fn lie_dim(&self) -> usize {
        self.lie_dim
    }

    pub fn cell_counts(&self) -> &[usize] {
        &self.cell_counts
    }

    pub fn chain(&self) -> &ChainComplex {
        &self.chain
    }

    pub fn dims(&self) -> &[usize] {
        self.chain.dims()
    }
}

impl AsRef<ChainComplex> for TwistedChainComplex {
    fn as_ref(&self) -> &ChainComplex {
        &self.chain
    }
}

/// Replaces each entry `Σ m_i γ_i` by the block `Σ m_i Ad(ρ(γ_i))`.
pub fn twist(
    cw: &CwComplexData,
    rep: &Representation,
    basis: &LieAlgebraBasis,
) -> Result<TwistedChainComplex, ComplexError> {
    let check = check_representation(cw.presentation(), rep, RELATOR_TOL);
    if !check.generator_count_matches {
        return Err(AlgebraError::DimensionMismatch {
            expected: cw.presentation().generator_count(),
            found: rep.generator_count(),
        }
        .into());
    }
    if !check.ok {
        return Err(ComplexError::NotARepresentation {
            residuals: check.residuals,
        });
    }
    let d = basis.dim();
    let mut cache: HashMap<Word, CMatrix> = HashMap::new();
    let mut boundaries = Vec::with_capacity(cw.boundaries.len());
    for b in &cw.boundaries {
        let mut out = CMatrix::zeros(b.rows() * d, b.cols() * d);
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                let mut block = CMatrix::zeros(d, d);
                for (w, m) in b.get(r, c).terms() {
                    if !cache.contains_key(w) {
                        cache.insert(w.clone(), adjoint_matrix(rep, basis, w)?);
                    }
                    block += &cache[w] * c64(m as f64, 0.0);
                }
                out.view_mut((r * d, c * d), (d, d)).copy_from(&block);
            }
        }
        boundaries.push(out);
    }
    let dims = cw.cells.iter().map(|m| m * d).collect();
    let chain = ChainComplex::new(dims, boundaries)?;
    let (degree, residual) = chain.composition_residual();
    if residual > COMPOSITION_TOL {
        return Err(ComplexError::InconsistentLifts { degree, residual });
    }
    Ok(TwistedChainComplex {
        lie_dim: d,
        cell_counts: cw.cells.clone(),
        chain,
    })
}

/// Block-diagonal matrix with `count` copies of `block`.
pub fn repeat_block(block: &CMatrix, count: usize) -> CMatrix {
    block_diagonal(&vec![block.clone(); count])
}

/// Per-degree coordinate changes `old ↦ new` induced by a lift change.
pub fn lift_change_coordinates(
    cw: &CwComplexData,
    rep: &Representation,
    basis: &LieAlgebraBasis,
    change: &LiftChange,
) -> Result<Vec<CMatrix>, ComplexError> {
    let d = basis.dim();
    let mut out: Vec<CMatrix> = cw.cells.iter().map(|m| identity(m * d)).collect();
    // New lift is γ·ẽ; an old chain x corresponds to Ad(γ)⁻¹ x on that block.
    let ad_inv = adjoint_matrix(rep, basis, &change.word.inverse())?;
    out[change.degree]
        .view_mut((change.cell * d, change.cell * d), (d, d))
        .copy_from(&ad_inv);
    Ok(out)
}

/// Per-degree coordinate changes induced by conjugating the representation by `g`.
pub fn conjugation_coordinates(
    cw: &CwComplexData,
    basis: &LieAlgebraBasis,
    g: &CMatrix,
) -> Result<Vec<CMatrix>, ComplexError> {
    let ad = adjoint_of_matrix(g, basis)?;
    Ok(cw.cells.iter().map(|&m| repeat_block(&ad, m)).collect())
}

/// Cycles, boundaries and a homology basis in one degree.
#[derive(Debug, Clone)]
pub struct DegreeHomology {
    pub betti: usize,
    /// Rank of `D_p`.
    pub rank_out: usize,
    /// Orthonormal basis of `Z_p`.
    pub cycles: CMatrix,
    /// Orthonormal basis of `B_p`.
    pub boundaries: CMatrix,
    /// Orthonormal cycles spanning the orthogonal complement of `B_p` in `Z_p`.
    pub h_basis: CMatrix,
}

#[derive(Debug, Clone)]
pub struct HomologyData {
    degrees: Vec<DegreeHomology>,
    tol: f64,
    decompositions: Vec<Decomposition>,
}

impl HomologyData {
    pub fn degrees(&self) -> &[DegreeHomology] {
        &self.degrees
    }

    pub fn degree(&self, p: usize) -> &DegreeHomology {
        &self.degrees[p]
    }

    pub fn bettis(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    pub fn betti(&self, p: usize) -> usize {
        self.degrees.get(p).map(|d| d.betti).unwrap_or(0)
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// The canonical homology bases, one matrix of cycle columns per degree.
    pub fn canonical_bases(&self) -> Vec<CMatrix> {
        self.degrees.iter().map(|d| d.h_basis.clone()).collect()
    }

    /// Rank-revealing decomposition of `D_p` (`p >= 1`).
    pub fn decomposition(&self, p: usize) -> Option<&Decomposition> {
        p.checked_sub(1).and_then(|k| self.decompositions.get(k))
    }

    /// Coordinates of the classes of the columns of `vectors` in the homology
    /// basis `h` of degree `p`. Fails if a column is not a cycle.
    pub fn class_coordinates(
        &self,
        p: usize,
        h: &CMatrix,
        vectors: &CMatrix,
    ) -> Result<CMatrix, ComplexError> {
        let deg = &self.degrees[p];
        let frame = crate::linalg::hstack(&[h, &deg.boundaries]);
        let x = min_norm_solve(&frame, vectors, self.tol).map_err(|e| match e {
            LinalgError::Inconsistent { residual } => ComplexError::NotACycle {
                degree: p,
                residual,
            },
            other => other.into(),
        })?;
        Ok(x.rows(0, h.ncols()).into_owned())
    }
}

/// Numerical homology at relative rank threshold `tol`.
pub fn homology(cc: &ChainComplex, tol: f64) -> Result<HomologyData, ComplexError> {
    let decompositions = cc
        .boundaries()
        .iter()
        .map(|b| decompose(b, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let top = cc.top_degree();
    let mut degrees = Vec::with_capacity(top + 1);
    for p in 0..cc.dims().len() {
        let n = cc.dim(p);
        let (cycles, rank_out) = match p.checked_sub(1).and_then(|k| decompositions.get(k)) {
            Some(d) => (d.kernel.clone(), d.rank),
            None => (identity(n), 0),
        };
        let boundaries = match decompositions.get(p) {
            Some(d) => d.image.clone(),
            None => CMatrix::zeros(n, 0),
        };
        if boundaries.ncols() > cycles.ncols() {
            return Err(ComplexError::InconsistentLifts {
                degree: p,
                residual: f64::NAN,
            });
        }
        let betti = cycles.ncols() - boundaries.ncols();
        let mut h_basis = orthogonal_part(&cycles, &boundaries, betti);
        normalize_phases(&mut h_basis);
        degrees.push(DegreeHomology {
            betti,
            rank_out,
            cycles,
            boundaries,
            h_basis,
        });
    }
    Ok(HomologyData {
        degrees,
        tol,
        decompositions,
    })
}
