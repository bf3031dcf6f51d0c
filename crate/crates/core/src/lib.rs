//! Kink-free normal forms for walks on leafy dual graphs of signature-zero
//! triangulations.
//!
//! The crate decides equality in the orbifold fundamental groupoid of a
//! punctured surface, where every puncture is an orbifold point of order
//! two. Walks on the leafy dual graph are brought to standard form, their
//! kinks are resolved until none remain, and the resulting kink-free walk
//! is the unique representative of its class.

pub mod document;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod flips;
pub mod groupoid;
pub mod kinks;
pub mod random;
pub mod ribbon;
pub mod selftest;
pub mod triangulation;
pub mod walks;

pub use error::{Error, Result};
