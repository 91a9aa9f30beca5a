//! Runs the guide snippets as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}
#[doc = include_str!("../../../book/src/tamari.md")]
pub mod tamari {}
#[doc = include_str!("../../../book/src/balance.md")]
pub mod balance {}
#[doc = include_str!("../../../book/src/grammars.md")]
pub mod grammars {}
#[doc = include_str!("../../../book/src/patterns.md")]
pub mod patterns {}
#[doc = include_str!("../../../book/src/intervals.md")]
pub mod intervals {}
#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
