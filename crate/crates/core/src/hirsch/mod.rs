//! Hirsch extensions `C ⊗ Γ[u_1..u_r]` of complexes carrying anticommuting
//! square-zero operators, their truncations and colimit cohomology.

mod datum;
mod extension;
mod maps;
pub mod pd;
mod residue;
mod stabilize;

use thiserror::Error;

use crate::complex::ComplexError;
use crate::filt::FiltError;
use crate::linalg::{LinalgError, SparseVec};

pub use datum::{ExteriorLayout, HirschDatum, HirschQuotient, Identity};
pub(crate) use extension::kron_identity;
pub use extension::TruncatedHirschExtension;
pub use maps::{
    check_compatible, cone_commutation, cone_datum, extend_map, first_map_difference, substitute_variables,
    CommutationVerdict, ConeSign, ExtendedMap, Mismatch,
};
pub use residue::{
    quotient_tower, residue_kernel_defect, residue_sequence, tower_comparison, LongSequenceReport, LongSequenceRow,
    ResidueSequence, TowerRow,
};
pub use stabilize::{
    stabilized_cohomology, stabilized_map, RankEntry, StabilizationCertificate, StabilizeParams, Stabilized,
    StabilizedMap,
};

#[derive(Debug, Error)]
pub enum HirschError {
    #[error("L_{} in degree {degree}: expected shape {expected:?}, found {found:?}", op + 1)]
    OperatorShape { op: usize, degree: i32, expected: (usize, usize), found: (usize, usize) },
    #[error("{identity} fails in degree {degree} on basis vector {basis_index}")]
    DatumViolation { identity: Identity, degree: i32, basis_index: usize, witness: SparseVec },
    #[error("weight tags in degree {degree} are missing or not preserved")]
    WeightMismatch { degree: i32 },
    #[error("map does not intertwine L_{} in degree {degree}", op + 1)]
    CompatibilityViolation { op: usize, degree: i32 },
    #[error("H^{degree} did not stabilize; transition ranks {table:?}")]
    NotStabilized { degree: i32, table: Vec<RankEntry> },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Filt(#[from] FiltError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
