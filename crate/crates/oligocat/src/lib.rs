//! Exact computations in finitely-powered regular categories: subobject
//! lattices, degree functions and measures, the relation-basis tensor category
//! and the orbit-matrix tensor category, and the comparison between them.

pub mod atoms;
pub mod deligne;
pub mod error;
pub mod group;
pub mod measure;
pub mod nilpotent;
pub mod poset;
pub mod regcat;
pub mod ring;
pub mod tensor;

pub use error::{Error, Result};
