use crate::algebra::{check_representation, GroupRingMatrix, Representation};
use crate::complex::{CwComplexData, RELATOR_TOL};
use crate::linalg::CMatrix;

use super::GlueError;

/// `M = M₁ △ M₂` modeled by identifying the 0-cell 0 of both factors, with
/// the cell and generator index maps of the factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskSumResult {
    pub total: CwComplexData,
    /// `left_cells[p][k]`: index in `M` of cell `k` of degree `p` of `M₁`.
    pub left_cells: Vec<Vec<usize>>,
    pub right_cells: Vec<Vec<usize>>,
    /// The 0-cell of `M` the disk is collapsed to.
    pub disk_cell: usize,
    pub left_generators: Vec<u32>,
    pub right_generators: Vec<u32>,
}

pub fn disk_sum(m1: &CwComplexData, m2: &CwComplexData) -> Result<DiskSumResult, GlueError> {
    for (which, m) in [(1, m1), (2, m2)] {
        let b0 = m.untwisted_betti0();
        if b0 != 1 {
            return Err(GlueError::Disconnected {
                factor: which,
                components: b0,
            });
        }
    }
    let top = m1.dimension().max(m2.dimension());
    let count = |m: &CwComplexData, p: usize| m.cells().get(p).cloned().unwrap_or(0);
    let cells: Vec<usize> = (0..=top)
        .map(|p| count(m1, p) + count(m2, p) - usize::from(p == 0))
        .collect();

    let left_cells: Vec<Vec<usize>> = (0..=top).map(|p| (0..count(m1, p)).collect()).collect();
    let right_cells: Vec<Vec<usize>> = (0..=top)
        .map(|p| {
            (0..count(m2, p))
                .map(|k| match (p, k) {
                    (0, 0) => 0,
                    (0, k) => count(m1, 0) + k - 1,
                    (p, k) => count(m1, p) + k,
                })
                .collect()
        })
        .collect();

    let offset = m1.presentation().generator_count() as u32;
    let presentation = m1.presentation().free_product(m2.presentation());
    let mut boundaries = Vec::with_capacity(top);
    for p in 1..=top {
        let mut b = GroupRingMatrix::zeros(cells[p - 1], cells[p]);
        if let Some(d) = m1.boundary(p) {
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    b.set(left_cells[p - 1][r], left_cells[p][c], d.get(r, c).clone());
                }
            }
        }
        if let Some(d) = m2.boundary(p) {
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    let entry = d.get(r, c).shift_generators(offset);
                    b.set(right_cells[p - 1][r], right_cells[p][c], entry);
                }
            }
        }
        boundaries.push(b);
    }
    let name = format!("{} # {}", m1.name(), m2.name());
    let total = CwComplexData::new(name, presentation, cells, boundaries)?;
    Ok(DiskSumResult {
        total,
        left_cells,
        right_cells,
        disk_cell: 0,
        left_generators: (0..offset).collect(),
        right_generators: (0..m2.presentation().generator_count() as u32)
            .map(|g| g + offset)
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl DiskSumResult {
    fn cells(&self, side: Side) -> &[Vec<usize>] {
        match side {
            Side::Left => &self.left_cells,
            Side::Right => &self.right_cells,
        }
    }

    /// Twisted inclusion `C_p(M_side) → C_p(M)` for Lie-algebra dimension `d`.
    pub fn inclusion(&self, side: Side, p: usize, d: usize) -> CMatrix {
        let target = self.total.cells().get(p).cloned().unwrap_or(0);
        let map = self.cells(side).get(p).map(Vec::as_slice).unwrap_or(&[]);
        let mut out = CMatrix::zeros(target * d, map.len() * d);
        for (k, &image) in map.iter().enumerate() {
            out.view_mut((image * d, k * d), (d, d))
                .fill_with_identity();
        }
        out
    }

    /// Twisted inclusion `C_0(D²) → C_0(M_side)`; the disk sits on 0-cell 0.
    pub fn disk_inclusion(factor: &CwComplexData, d: usize) -> CMatrix {
        let mut out = CMatrix::zeros(factor.cells()[0] * d, d);
        out.view_mut((0, 0), (d, d)).fill_with_identity();
        out
    }

    /// Restricts a representation of `π₁(M)` to one factor.
    pub fn restrict(&self, side: Side, rep: &Representation) -> Result<Representation, GlueError> {
        let gens = match side {
            Side::Left => &self.left_generators,
            Side::Right => &self.right_generators,
        };
        let images = gens
            .iter()
            .map(|&g| rep.images()[g as usize].clone())
            .collect();
        Ok(Representation::new(rep.target(), rep.n(), images)?)
    }
}

/// The representation of the free product restricting to `ψ₁` and `ψ₂`.
pub fn free_product_rep(
    psi1: &Representation,
    psi2: &Representation,
    ds: &DiskSumResult,
) -> Result<Representation, GlueError> {
    if psi1.target() != psi2.target() || psi1.n() != psi2.n() {
        return Err(GlueError::TargetMismatch {
            left: format!("{}({})", psi1.target(), psi1.n()),
            right: format!("{}({})", psi2.target(), psi2.n()),
        });
    }
    if psi1.generator_count() != ds.left_generators.len()
        || psi2.generator_count() != ds.right_generators.len()
    {
        return Err(GlueError::Invalid(format!(
            "representations have {} + {} generators, the disk sum has {} + {}",
            psi1.generator_count(),
            psi2.generator_count(),
            ds.left_generators.len(),
            ds.right_generators.len()
        )));
    }
    let images = psi1.images().iter().chain(psi2.images()).cloned().collect();
    let rep = Representation::new(psi1.target(), psi1.n(), images)?;
    let check = check_representation(ds.total.presentation(), &rep, RELATOR_TOL);
    if !check.ok {
        return Err(GlueError::Invalid(format!(
            "factor representations violate relators (residuals {:?})",
            check.residuals
        )));
    }
    Ok(rep)
}
