//! Automorphism groups of cyclic p-gonal pseudo-real Riemann surfaces.
//!
//! The crate evaluates arithmetic existence criteria for the full automorphism
//! group of such surfaces, builds explicit surface-kernel epimorphisms from NEC
//! groups onto the candidate finite groups, and checks both against an
//! exhaustive search.

pub mod actions;
pub mod arith;
pub mod classify;
pub mod cli;
pub mod error;
pub mod groups;
pub mod nec;
mod text;

pub use error::{Error, Result};
