pub mod cli;
pub mod decomposition;
pub mod error;
pub mod gadgets;
pub mod generators;
pub mod geometry;
pub mod harness;
pub mod greedy;
pub mod invariants;
pub mod opt;
pub mod patterns;
pub mod perm;
pub mod rgreedy;
pub mod sequence;
pub mod tree;

pub use error::{Error, Result};
