//! File formats, command-line front end and parallel simulation for
//! [`coordsolve_core`].

pub mod cli;
pub mod formats;
pub mod parallel;
pub mod render;

pub use coordsolve_core as core;
