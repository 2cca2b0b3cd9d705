//! Finite bimodules over categorical actions: plethysm products, element
//! representations, Kan extensions, horizontal extensions, decorations, and
//! the correspondences that connect them to operad-like structures.
//!
//! Everything is desk-scale and exact: finite categories with explicit
//! composition tables, finite sets, rational vector spaces, and deterministic
//! canonical representatives throughout.

pub mod algebra;
pub mod basicrep;
pub mod bimodule;
pub mod corecat;
pub mod decorate;
pub mod elements;
pub mod factorize;
pub mod relative;
pub mod report;
pub mod target;
pub mod zoo;

pub use corecat::{FinCategory, FunctorData, NatTransData};
pub use report::LawReport;
pub use target::{Flavor, TargetMor, TargetObj};

#[derive(Debug, thiserror::Error)]
pub enum PlError {
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("law violation: {0}")]
    Law(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}
