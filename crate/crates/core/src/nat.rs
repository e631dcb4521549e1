//! Arbitrary-precision natural numbers with an allocation-free small path.
//!
//! Plays against fast-escaping strategies leave the `u64` range after a few
//! dozen innings, while most of the machinery never does. `Nat` stores values
//! up to `u64::MAX` inline and spills to `BigUint` only above that.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GameError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Nat {
    Small(u64),
    /// Invariant: strictly greater than `u64::MAX`.
    Big(BigUint),
}

impl Nat {
    pub const ZERO: Nat = Nat::Small(0);
    pub const ONE: Nat = Nat::Small(1);

    pub fn from_big(b: BigUint) -> Nat {
        match b.to_u64() {
            Some(v) => Nat::Small(v),
            None => Nat::Big(b),
        }
    }

    pub fn to_big(&self) -> BigUint {
        match self {
            Nat::Small(v) => BigUint::from(*v),
            Nat::Big(b) => b.clone(),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Nat::Small(v) => Some(*v),
            Nat::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nat::Small(0))
    }

    pub fn bits(&self) -> u64 {
        match self {
            Nat::Small(v) => 64 - v.leading_zeros() as u64,
            Nat::Big(b) => b.bits(),
        }
    }

    pub fn add_u64(&self, c: u64) -> Nat {
        match self {
            Nat::Small(v) => match v.checked_add(c) {
                Some(s) => Nat::Small(s),
                None => Nat::Big(BigUint::from(*v) + c),
            },
            Nat::Big(b) => Nat::Big(b + c),
        }
    }

    pub fn add(&self, other: &Nat) -> Nat {
        match (self, other) {
            (Nat::Small(a), Nat::Small(b)) => Nat::Small(*a).add_u64(*b),
            _ => Nat::from_big(self.to_big() + other.to_big()),
        }
    }

    pub fn mul(&self, other: &Nat) -> Nat {
        if let (Nat::Small(a), Nat::Small(b)) = (self, other) {
            if let Some(p) = a.checked_mul(*b) {
                return Nat::Small(p);
            }
        }
        Nat::from_big(self.to_big() * other.to_big())
    }

    pub fn mul_u64(&self, c: u64) -> Nat {
        self.mul(&Nat::Small(c))
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Nat) -> Option<Nat> {
        match (self, other) {
            (Nat::Small(a), Nat::Small(b)) => a.checked_sub(*b).map(Nat::Small),
            _ if self < other => None,
            _ => Some(Nat::from_big(self.to_big() - other.to_big())),
        }
    }

    pub fn saturating_sub_u64(&self, c: u64) -> Nat {
        self.checked_sub(&Nat::Small(c)).unwrap_or(Nat::ZERO)
    }

    /// Floor division and remainder by a nonzero `u64`.
    pub fn div_rem_u64(&self, d: u64) -> (Nat, u64) {
        assert!(d != 0, "division by zero");
        match self {
            Nat::Small(v) => (Nat::Small(v / d), v % d),
            Nat::Big(b) => {
                let q = b / d;
                let r = (b % d).to_u64().expect("remainder below divisor");
                (Nat::from_big(q), r)
            }
        }
    }

    pub fn half(&self) -> Nat {
        self.div_rem_u64(2).0
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat::Small(v)
    }
}

impl From<BigUint> for Nat {
    fn from(b: BigUint) -> Self {
        Nat::from_big(b)
    }
}

impl PartialEq<u64> for Nat {
    fn eq(&self, other: &u64) -> bool {
        matches!(self, Nat::Small(v) if v == other)
    }
}

impl PartialOrd<u64> for Nat {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(match self {
            Nat::Small(v) => v.cmp(other),
            Nat::Big(_) => Ordering::Greater,
        })
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Nat::Small(a), Nat::Small(b)) => a.cmp(b),
            (Nat::Small(_), Nat::Big(_)) => Ordering::Less,
            (Nat::Big(_), Nat::Small(_)) => Ordering::Greater,
            (Nat::Big(a), Nat::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Nat {
    fn default() -> Self {
        Nat::ZERO
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nat::Small(v) => write!(f, "{v}"),
            Nat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Nat {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(GameError::Parse(format!("not a natural number: {s:?}")));
        }
        match s.parse::<u64>() {
            Ok(v) => Ok(Nat::Small(v)),
            Err(_) => BigUint::from_str(s)
                .map(Nat::from_big)
                .map_err(|e| GameError::Parse(e.to_string())),
        }
    }
}

// Values that fit in u64 serialize as JSON numbers, larger ones as decimal
// strings so no precision is lost.
impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Nat::Small(v) => serializer.serialize_u64(*v),
            Nat::Big(b) => serializer.serialize_str(&b.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Nat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NatVisitor;

        impl Visitor<'_> for NatVisitor {
            type Value = Nat;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a natural number or its decimal string")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Nat, E> {
                Ok(Nat::Small(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Nat, E> {
                u64::try_from(v)
                    .map(Nat::Small)
                    .map_err(|_| E::custom("negative value"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Nat, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(NatVisitor)
    }
}

impl Zero for Nat {
    fn zero() -> Self {
        Nat::ZERO
    }

    fn is_zero(&self) -> bool {
        Nat::is_zero(self)
    }
}

impl std::ops::Add for Nat {
    type Output = Nat;

    fn add(self, rhs: Nat) -> Nat {
        Nat::add(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spills_past_u64() {
        let x = Nat::Small(u64::MAX).add_u64(1);
        assert!(matches!(x, Nat::Big(_)));
        assert!(x > Nat::Small(u64::MAX));
        assert_eq!(x.checked_sub(&Nat::ONE), Some(Nat::Small(u64::MAX)));
    }

    #[test]
    fn json_forms() {
        let small = serde_json::to_string(&Nat::Small(7)).unwrap();
        assert_eq!(small, "7");
        let big = Nat::Small(u64::MAX).mul_u64(10);
        let text = serde_json::to_string(&big).unwrap();
        assert_eq!(text, "\"184467440737095516150\"");
        let back: Nat = serde_json::from_str(&text).unwrap();
        assert_eq!(back, big);
    }

    proptest! {
        #[test]
        fn arithmetic_agrees_with_biguint(a in any::<u64>(), b in any::<u64>(), c in 1u64..1000) {
            let (x, y) = (Nat::from(a), Nat::from(b));
            prop_assert_eq!(x.add(&y).to_big(), BigUint::from(a) + b);
            prop_assert_eq!(x.mul(&y).to_big(), BigUint::from(a) * b);
            prop_assert_eq!(x.cmp(&y), a.cmp(&b));
            prop_assert_eq!(x.partial_cmp(&b), Some(a.cmp(&b)));
            prop_assert!(x.mul(&y).add_u64(u64::MAX) > a.max(b) || a == 0 || b == 0);
            let big = x.mul(&y).add_u64(c);
            let (q, r) = big.div_rem_u64(c);
            prop_assert_eq!(q.mul_u64(c).add_u64(r), big);
        }
    }
}
