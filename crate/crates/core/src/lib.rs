//! Generalized Clifford algebras, spectral fractional derivatives and
//! higher-order Dirac-type operators, with numerical verifiers that return
//! structured reports.

pub mod dirac;
pub mod error;
pub mod fractional;
pub mod gencliff;
pub mod linsearch;
mod lm;
pub mod matrix;
pub mod report;

pub use dirac::{FourMomentum, PhysicalUnits, Sign, SolutionSet};
pub use error::{Error, Result};
pub use fractional::{GridFunction, LagrangianSpec, SpectralMultiplier};
pub use gencliff::{BetaRep, Mutation, PauliSet, RelationForm};
pub use linsearch::{CandidateRep, LinearizationSpec, SearchConfig, SearchOutcome};
pub use matrix::{ComplexMatrix, C64};
pub use report::{CaseRecord, ComplexValue, VerificationReport};
