//! Code listings of the book, compiled and run as doctests.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/reduction.md")]
pub mod reduction {}

#[doc = include_str!("../../book/src/primary.md")]
pub mod primary {}

#[doc = include_str!("../../book/src/admission.md")]
pub mod admission {}

#[doc = include_str!("../../book/src/secondary.md")]
pub mod secondary {}

#[doc = include_str!("../../book/src/scenarios.md")]
pub mod scenarios {}
