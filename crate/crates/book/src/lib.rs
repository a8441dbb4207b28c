//! The guide's chapters, compiled so that their snippets run as doc tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/modeling.md")]
pub mod modeling {}
#[doc = include_str!("../../../book/src/grounding.md")]
pub mod grounding {}
#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("../../../book/src/heuristic.md")]
pub mod heuristic {}
#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}
#[doc = include_str!("../../../book/src/decomposition.md")]
pub mod decomposition {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
