//! Test harness for the guide in `book/`.
//!
//! Each chapter is attached as module documentation, so every Rust code
//! block in the book compiles and runs under `cargo test`. If a chapter's
//! example drifts from the library's API or behavior, the build breaks
//! here first.
#![doc = include_str!("../../../book/src/introduction.md")]

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}

#[doc = include_str!("../../../book/src/certifying.md")]
pub mod certifying {}

#[doc = include_str!("../../../book/src/switching.md")]
pub mod switching {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
