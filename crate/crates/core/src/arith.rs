//! Number domains that strategies can be evaluated over.
//!
//! Strategies only ever compare moves, take maxima and add small constants,
//! so they are evaluated against a [`MoveArith`]. [`Exact`] works on plain
//! naturals; the counterplay construction supplies a positional domain for
//! numbers too large to write down.

use std::fmt::Debug;

use crate::error::{GameError, Result};
use crate::nat::Nat;

pub trait MoveArith {
    type Num: Clone + Ord + Debug;

    /// Embed a concrete natural.
    fn lift(&self, v: &Nat) -> Result<Self::Num>;

    /// `x + c`.
    fn add(&self, x: &Self::Num, c: u64) -> Result<Self::Num>;

    /// The exact value of `x`, if this domain can produce it.
    fn exact(&self, x: &Self::Num) -> Option<Nat>;

    fn exact_or_err(&self, x: &Self::Num, why: &str) -> Result<Nat> {
        self.exact(x)
            .ok_or_else(|| GameError::UnsupportedArith(format!("{why} needs an exact value")))
    }
}

/// Plain arbitrary-precision naturals.
#[derive(Clone, Copy, Debug, Default)]
pub struct Exact;

impl MoveArith for Exact {
    type Num = Nat;

    fn lift(&self, v: &Nat) -> Result<Nat> {
        Ok(v.clone())
    }

    fn add(&self, x: &Nat, c: u64) -> Result<Nat> {
        Ok(x.add_u64(c))
    }

    fn exact(&self, x: &Nat) -> Option<Nat> {
        Some(x.clone())
    }
}
