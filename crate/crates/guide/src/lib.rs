//! Runs the book through the compiler.
//!
//! mdbook renders `book/` but cannot execute its code fences. Including each
//! chapter as module documentation makes `cargo test --doc` compile and run
//! every snippet, so the book and the library cannot drift apart. One module
//! per chapter keeps doctest failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/counting-trie.md")]
pub mod counting_trie {}

#[doc = include_str!("../../../book/src/corpora.md")]
pub mod corpora {}

#[doc = include_str!("../../../book/src/estimation.md")]
pub mod estimation {}

#[doc = include_str!("../../../book/src/correction.md")]
pub mod correction {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}
