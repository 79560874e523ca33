//! Computational workbench for equations over groups: free-group word
//! arithmetic, concrete groups with decidable word problems, reduction of
//! equation systems to diagonal form, bounded solution search, verbal
//! subgroups and the symbolic system transformers built on top of them.

pub mod eqsys;
pub mod error;
pub mod freewords;
pub mod groups;
pub mod parse;
pub mod pipeline;
pub mod solver;
pub mod suite;
pub mod verbal;

pub use error::{Error, Result};
