//! Binary trees under the Tamari order, with a focus on balanced trees.
//!
//! Covers rotations and Tamari intervals, the imbalance calculus behind the
//! closure of balanced intervals, synchronous grammars with truncated
//! generating series, imbalance patterns, the hypercube structure of
//! balanced intervals, and several auxiliary tree families.

pub mod balance;
pub mod dot;
pub mod families;
pub mod grammar;
pub mod intervals;
pub mod patterns;
pub mod poly;
pub mod sequences;
mod error;
pub mod tamari;
pub mod tree;

pub use error::{Error, Result};
pub use tree::BinaryTree;
