//! Standard complexes with fixed lifts.

use thiserror::Error;

use crate::algebra::{fox_derivative, GroupPresentation, GroupRingElement, GroupRingMatrix, Word};
use crate::complex::CwComplexData;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuilderError {
    #[error("genus must be at least 1, got {0}")]
    InvalidGenus(usize),
}

/// A single 0-cell.
pub fn point() -> CwComplexData {
    CwComplexData::new("point", GroupPresentation::free(0), vec![1], vec![])
        .expect("point is valid")
}

/// The disk, collapsed to its center.
pub fn disk() -> CwComplexData {
    point().with_name("disk")
}

/// One 0-cell and one 1-cell with `∂₁ = [g - 1]`.
pub fn circle() -> CwComplexData {
    wedge_of_circles(1).expect("genus 1").with_name("circle")
}

/// One 0-cell and `g` loops, `∂₁ = [x₁ - 1, ..., x_g - 1]`.
pub fn wedge_of_circles(g: usize) -> Result<CwComplexData, BuilderError> {
    if g < 1 {
        return Err(BuilderError::InvalidGenus(g));
    }
    let one = GroupRingElement::one();
    let entries = (0..g as u32)
        .map(|j| &GroupRingElement::from_word(Word::generator(j)) - &one)
        .collect();
    let d1 = GroupRingMatrix::from_entries(1, g, entries);
    Ok(CwComplexData::new(
        format!("wedge({g})"),
        GroupPresentation::free(g),
        vec![1, g],
        vec![d1],
    )
    .expect("wedge is valid"))
}

/// A genus-`g` handlebody, which collapses onto a wedge of `g` circles.
pub fn handlebody_model(g: usize) -> Result<CwComplexData, BuilderError> {
    Ok(wedge_of_circles(g)?.with_name(format!("handlebody({g})")))
}

/// The 2-complex of a presentation: `∂₁ = [x_j - 1]`, `∂₂[j][r]` the Fox
/// derivative of relator `r` along `x_j`.
pub fn presentation_complex(pres: &GroupPresentation) -> CwComplexData {
    let g = pres.generator_count();
    let r = pres.relators().len();
    let one = GroupRingElement::one();
    let d1 = GroupRingMatrix::from_entries(
        1,
        g,
        (0..g as u32)
            .map(|j| &GroupRingElement::from_word(Word::generator(j)) - &one)
            .collect(),
    );
    let mut d2 = GroupRingMatrix::zeros(g, r);
    for (k, rel) in pres.relators().iter().enumerate() {
        for j in 0..g {
            d2.set(j, k, fox_derivative(rel, j as u32));
        }
    }
    CwComplexData::new("presentation", pres.clone(), vec![1, g, r], vec![d1, d2])
        .expect("presentation complex is valid")
}
