//! Presentation-level invariants of finitely presented groups: deficiency,
//! p-deficiency, abelian invariants, finite-quotient lower bounds for
//! residual deficiency, and verifiable largeness certificates built by
//! Reidemeister–Schreier rewriting.

pub mod analysis;
pub mod arith;
pub mod error;
pub mod presentations;
pub mod quotients;
pub mod rewriting;
pub mod words;

pub use error::{Error, Result};
