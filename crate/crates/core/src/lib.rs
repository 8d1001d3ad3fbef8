//! Exact multiplicities of rigid tropical curves.
//!
//! Everything here is integer/rational arithmetic over finite-rank lattices:
//! no floats anywhere. The crate computes the multiplicity of a rigid tropical
//! curve by four independent routes and checks the algebraic structures those
//! routes rest on:
//!
//! * [`mult`] — the lattice-index (determinant) definition, the ground truth;
//! * [`trqft`] — evaluation of a Frobenius-algebra field theory over a flow,
//!   returning the squared multiplicity;
//! * [`splitting`] — genus-0 edge splitting and vertex/edge multiplicities;
//! * [`bracket`] — genus-0 flow propagation through brackets of polyvector
//!   fields.
//!
//! Supporting layers: [`lattice`] (Smith/Hermite normal forms, lattice
//! indices, saturation), [`exterior`] (blade-indexed exterior algebra over ℤ
//! with the squaring map and Frobenius trace), [`curve`] (the combinatorial
//! curve model), [`constraints`] (affine incidence conditions), and
//! [`polyvector`] (the bracket algebra with its BV/L∞ identity checks).

pub mod bracket;
pub mod constraints;
pub mod curve;
pub mod doc;
pub mod exterior;
pub mod fixtures;
pub mod lattice;
pub mod mult;
pub mod polyvector;
pub mod splitting;
pub mod suites;
pub mod trqft;

use thiserror::Error;

/// Default cap on the ambient lattice rank of a curve; doubled exterior
/// algebras then have at most 16 generators. Overridable via the
/// `TROPMULT_RANK_CAP` environment variable.
pub const DEFAULT_RANK_CAP: usize = 8;

/// Effective rank cap (env override or default).
pub fn rank_cap() -> usize {
    std::env::var("TROPMULT_RANK_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_RANK_CAP)
}

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input documents (CLI exit code 1).
    #[error("parse error: {0}")]
    Parse(String),
    /// A precondition of the requested operation fails (CLI exit code 2).
    #[error("precondition: {0}")]
    Precondition(String),
    /// An internal invariant that theory guarantees was violated
    /// (CLI exit code 3).
    #[error("invariant violation: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 1,
            Error::Precondition(_) => 2,
            Error::Invariant(_) => 3,
        }
    }
}
