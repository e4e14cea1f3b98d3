//! A toolkit for finite truncated stratified simplicial sets.
//!
//! The crate mechanizes the combinatorial core of weak complicial set
//! theory at desk scale: exact simplicial-operator arithmetic, stratified
//! sets presented by non-degenerate generators in Eilenberg-Zilber normal
//! form, the standard zoo of complicial simplices and horns, joins and Gray
//! tensor products with their shuffle-depth filtrations, brute-force
//! right-lifting-property verdicts, and replayable certificates presenting
//! subset inclusions as finite composites of pushouts of elementary anodyne
//! extensions.
//!
//! Everything is dimension-bounded: each object carries an explicit
//! truncation, every verdict names the bound it was checked at, and no
//! claim is made above it.

pub mod certifier;
pub mod delta_ops;
pub mod io;
pub mod lifting;
pub mod strata;
pub mod tensors;
pub mod zoo;

pub use delta_ops::{CubeIndex, DeltaError, ElementaryKind, Operator};
pub use strata::{
    GenId, SimplexRef, StrataError, StratifiedMap, Subset, TruncatedStratifiedSet,
    ValidationReport,
};
