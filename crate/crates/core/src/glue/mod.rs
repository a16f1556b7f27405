//! Disk sums, the Mayer–Vietoris sequence of a disk sum with its corrective
//! term, basis transport, and the multiplicativity verifiers.

mod disk_sum;
mod mv;
mod transport;
mod verify;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::complex::ComplexError;
use crate::linalg::LinalgError;
use crate::torsion::TorsionError;

pub use disk_sum::{disk_sum, free_product_rep, DiskSumResult, Side};
pub use mv::{
    assemble, corrective_term, mv_identity, mv_sequence, DimensionReport, ExactnessReport,
    GluedComplexes, Junction, MvBases, MvIdentity, MvSequence, TwistedPiece, EXACTNESS_TOL,
    MV_DEGREES, MV_SPACES,
};
pub use transport::{transport_bases, ForcedResidual, TransportedBases};
pub use verify::{
    random_bases, verify_mv, verify_theorem1, MvReport, MvTrial, StepReport, Theorem1Report,
    VERIFY_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlueError {
    #[error("factor {factor} is not connected ({components} components)")]
    Disconnected { factor: usize, components: usize },
    #[error("representation targets differ: {left} vs {right}")]
    TargetMismatch { left: String, right: String },
    #[error("{0}")]
    Invalid(String),
    #[error("sequence is not exact at position {position} (composition residual {residual:e})")]
    NotExact { position: usize, residual: f64 },
    #[error("basis transport failed: {0}")]
    Transport(String),
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<GlueError>,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl GlueError {
    pub fn at_step(self, step: usize) -> GlueError {
        match self {
            e @ GlueError::Step { .. } => e,
            e => GlueError::Step {
                step,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, past any step context.
    pub fn root(&self) -> &GlueError {
        match self {
            GlueError::Step { source, .. } => source.root(),
            e => e,
        }
    }
}
