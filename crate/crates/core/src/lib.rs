//! Exact toolkit for abelian difference sets with classical parameters.
pub mod analysis;
pub mod arith;
pub mod dset;
pub mod error;
pub mod field;
pub mod group;
pub mod report;
pub mod resources;
pub mod search;
pub mod setfile;
pub mod singer;

pub use dset::{
    DifferenceSet, IntersectionProfile, Params, Restriction, SetStatus, VerificationReport,
};
pub use error::{Error, Result};
pub use field::{FieldElement, FiniteField, LinearMap};
pub use group::{AbelianGroup, CosetDecomposition, GroupElement, Presentation, Subgroup, Sylow};
pub use report::{Check, Status, TheoremReport};
pub use resources::{Resources, DEFAULT_CEILING};
pub use search::{SearchResult, SearchSpec};
pub use setfile::{SetFile, SetReport};
pub use singer::{SingerSet, SingerSpec};
