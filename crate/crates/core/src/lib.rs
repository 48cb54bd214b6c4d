//! Height-1 conditions encoded by graphs, their satisfaction in polymorphism
//! clones of finite templates, and chains of ever weaker such conditions.
//!
//! The guide in `book/` walks through the concepts with runnable snippets;
//! those snippets are compiled as doc-tests of this crate.

pub mod chains;
pub mod conditions;
pub mod encoding;
pub mod error;
pub mod format;
pub mod graph;
pub mod indicator;
pub mod solver;
pub mod structure;
pub mod tuples;
mod unionfind;

pub use error::{Error, Result};
pub use graph::Graph;
pub use structure::RelStructure;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/conditions.md")]
    mod conditions {}
    #[doc = include_str!("../../../book/src/indicator.md")]
    mod indicator {}
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
