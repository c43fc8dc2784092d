//! Combinatorics and exact homology of flag complexes, splitting complexes
//! and enriched Tits buildings over small finite commutative rings.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`] — exact arithmetic in prime fields, prime-power fields and ℤ/m;
//! * [`modlin`] — linear algebra over those rings: unimodular vectors,
//!   canonical lines, splittings, flags and elements of the poset ℰ(V);
//! * [`complexes`] — simplicial complexes, finite posets and nerves, the
//!   three buildings 𝔽𝕃(V), 𝕊ℙ𝕃(V), 𝔼𝕋(V), and the polyhedral cell
//!   decomposition of 𝔼𝕋(V);
//! * [`homology`] — sparse integer Smith normal form and exact chain-complex
//!   homology with torsion, chain maps and induced maps;
//! * [`field`] — dense exact linear algebra over ℚ and 𝔽_p used for
//!   field-coefficient homology and spectral sequence pages;
//! * [`equivariant`] — finite matrix groups, their actions on the buildings,
//!   orbit canonicalisation and coinvariants;
//! * [`spectral`] — the filtration of 𝔼𝕋(V) by the rank of the smallest
//!   flag step and the resulting spectral sequence;
//! * [`grassmann`] — the general-position complex K(V), the coinvariant
//!   complexes C̄ᵣ(n) with the two differentials ∂′ and ∂″, and the desk-scale
//!   Bloch-group cokernel.

pub mod complexes;
pub mod equivariant;
pub mod field;
pub mod grassmann;
pub mod homology;
pub mod modlin;
pub mod ring;
pub mod spectral;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus polynomial is reducible")]
    ReducibleModulus,
    #[error("invalid ring descriptor: {0}")]
    BadDescriptor(String),
    #[error("ring cardinality {0} out of range (need 2..=65536)")]
    CardinalityOutOfRange(u64),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("operation requires a field, got {0}")]
    NotAField(String),
    #[error("budget exceeded: {what} needs more than {limit}")]
    BudgetExceeded { what: &'static str, limit: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration caps. Constructions refuse to grow past these instead of
/// silently truncating.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Candidate vectors scanned during line/flag enumeration.
    pub max_candidates: u64,
    /// Simplices (or poset elements / cells) held by one complex.
    pub max_simplices: u64,
    /// Group elements produced by generator closure.
    pub max_group: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_candidates: 10_000_000,
            max_simplices: 5_000_000,
            max_group: 1_000_000,
        }
    }
}

impl Budget {
    /// A budget with every cap set to `limit`.
    pub fn uniform(limit: u64) -> Self {
        Budget {
            max_candidates: limit,
            max_simplices: limit,
            max_group: limit,
        }
    }

    pub(crate) fn charge(&self, what: &'static str, count: u64, cap: u64) -> Result<()> {
        if count > cap {
            Err(Error::BudgetExceeded { what, limit: cap })
        } else {
            Ok(())
        }
    }

    pub(crate) fn charge_candidates(&self, what: &'static str, count: u64) -> Result<()> {
        self.charge(what, count, self.max_candidates)
    }

    pub(crate) fn charge_simplices(&self, what: &'static str, count: u64) -> Result<()> {
        self.charge(what, count, self.max_simplices)
    }

    pub(crate) fn charge_group(&self, what: &'static str, count: u64) -> Result<()> {
        self.charge(what, count, self.max_group)
    }
}
