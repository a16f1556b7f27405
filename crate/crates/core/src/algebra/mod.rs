//! Free-group words, group rings, `sl_n` with its Killing form, and
//! representations into `SL_n(C)` / `PSL_n(C)` with their adjoints.

mod group_ring;
mod lie;
mod representation;
mod word;

use num_complex::Complex64;
use thiserror::Error;

pub use group_ring::{fox_derivative, GroupRingElement, GroupRingMatrix};
pub use lie::{killing_form, orthonormal_sl2_basis, orthonormal_sln_basis, LieAlgebraBasis};
pub use representation::{
    adjoint_matrix, adjoint_of_matrix, check_representation, evaluate_word, Representation,
    RepresentationCheck, Target, DET_TOL,
};
pub use word::Word;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("image of generator {generator} has determinant {det}, not 1")]
    NotUnimodular { generator: usize, det: Complex64 },
    #[error("not an orthonormal basis: {0}")]
    NotABasis(String),
}

/// A finitely presented group `⟨x_0, .., x_{k-1} | relators⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupPresentation {
    generator_count: usize,
    relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generator_count: usize, relators: Vec<Word>) -> Result<Self, AlgebraError> {
        for r in &relators {
            if let Some(g) = r.max_generator() {
                if g as usize >= generator_count {
                    return Err(AlgebraError::GeneratorOutOfRange {
                        index: g as usize,
                        count: generator_count,
                    });
                }
            }
        }
        Ok(GroupPresentation {
            generator_count,
            relators,
        })
    }

    pub fn free(generator_count: usize) -> Self {
        GroupPresentation {
            generator_count,
            relators: Vec::new(),
        }
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Presentation of the free product: generators of `other` are shifted
    /// past those of `self`.
    pub fn free_product(&self, other: &GroupPresentation) -> GroupPresentation {
        let offset = self.generator_count as u32;
        let mut relators = self.relators.clone();
        relators.extend(other.relators.iter().map(|r| r.shift_generators(offset)));
        GroupPresentation {
            generator_count: self.generator_count + other.generator_count,
            relators,
        }
    }
}
