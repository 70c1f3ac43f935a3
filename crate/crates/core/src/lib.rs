//! Trees of extendible nodes for effectively closed subsets of Cantor space.
//!
//! A class is written as a [`ClassExpr`], usually parsed from the small
//! combinator language accepted by [`parse`]. Every expression carries a
//! deterministic extendibility automaton, and all counting, measure and
//! homogeneity computations run over that automaton with exact arithmetic.

pub mod catalog;
pub mod class;
pub mod cli;
pub mod config;
pub mod density;
pub mod error;
pub mod homogeneity;
pub mod measure;
pub mod rational;
pub mod sampler;
pub mod tree;
pub mod verify;
pub mod word;

pub use class::{parse, ClassExpr, RawTree, State};
pub use error::{Error, Result};
pub use word::Word;
