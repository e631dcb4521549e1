//! Finite-horizon simulation of filter games on the natural numbers.
//!
//! Two players alternate moves in `ℕ = {1, 2, ...}`. Depending on the game,
//! TWO wins when its moves beat ONE's infinitely often (G1) or eventually
//! dominate them (G2), and its move set belongs to a fixed filter. This crate
//! plays such games to a finite horizon, judges them with explicit
//! truncated win conditions, and runs the strategy constructions that decide
//! who wins.

pub mod arith;
pub mod characterizations;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod filters;
pub mod model;
pub mod nat;
pub mod referee;
pub mod strategies;

pub use error::{GameError, Result};
pub use nat::Nat;
