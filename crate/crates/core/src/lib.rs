//! Exact analysis of repeated win-lose coordination games.
//!
//! A game is a relational structure: disjoint per-player choice sets plus a
//! winning relation. Players repeat the game until they pick a winning
//! profile, remembering the full history. This crate models games and
//! stages, computes the symmetry structure that structural protocols must
//! respect, evaluates the wait-or-move and loop-avoidance protocols, and
//! computes expected and guaranteed coordination times exactly by solving
//! absorbing Markov chains over renaming classes of stages.
//!
//! The crate is `no_std` (with `alloc`). File formats, the command-line
//! front end and parallel simulation live in the `coordsolve` crate.
//!
//! ```
//! use coordsolve_core::{analysis, notation, protocols::ProtocolSpec};
//!
//! let game = notation::build_str("CM(6)").unwrap();
//! let ect = analysis::exact_ect(&game, &ProtocolSpec::Wm).unwrap();
//! assert_eq!(ect.value.to_string(), "8/3");
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod analysis;
pub mod canon;
pub mod enumeration;
pub mod error;
pub mod game;
pub mod montecarlo;
pub mod notation;
pub mod protocols;
pub mod rational;
pub mod symmetry;

pub use error::{Error, Result};
pub use game::{ChoiceId, Profile, Stage, WlcGame};
pub use rational::Q;
