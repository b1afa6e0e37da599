//! Removal-lemma diagnostics for nearly intersecting set families and
//! Monte Carlo experiments on the independence number of random Kneser
//! subgraphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`family`]: k-sets as machine words, canonical families, `(α, β)` statistics.
//! * [`spectral`]: Kneser eigenvalues and the constant/affine/residual split of
//!   a family's indicator.
//! * [`removal`]: nearest unions of stars, the removal bound and the case analysis.
//! * [`kneser`], [`mis`], [`baranyai`]: explicit Kneser graphs, the exact
//!   independent-set solver and perfect-matching partitions.
//! * [`threshold`]: random subgraphs `K_p(n,k)`, superstars and bound evaluators.
//! * [`cli`]: the `sparse-ekr` command line front end.

pub mod baranyai;
pub mod binom;
pub mod cli;
pub mod error;
pub mod family;
pub mod graph;
pub mod kneser;
pub mod mis;
pub mod removal;
pub mod spectral;
pub mod threshold;

pub use error::{Error, Result};
pub use family::{FamilySpec, FamilyStats, GroundParams, KSet, SetFamily};

/// Version tag carried by every machine-readable report.
pub const SCHEMA_VERSION: u32 = 1;
