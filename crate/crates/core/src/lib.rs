//! Exact computations on algebraic surfaces: Zariski decompositions,
//! Newton–Okounkov polygons, negative-curve configurations and the
//! Néron–Severi lattices of elliptic surfaces.
//!
//! Every quantity is an exact rational or integer; nothing in this crate
//! touches floating point except the bound tightening in root enumeration,
//! which is re-checked exactly.

#![allow(clippy::needless_range_loop)]

pub mod configmv;
pub mod ellsurf;
pub mod exactmath;
pub mod lattice;
pub mod nob;
pub mod zariski;

pub use exactmath::{int, rat, RMatrix, Rational};
