//! Command-line front end for `nok-core`.

#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod app;
pub mod expr;
pub mod fixtures;
pub mod render;
pub mod search;
pub mod surface_file;
pub mod verify;

pub use app::run;
