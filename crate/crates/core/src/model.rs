//! Shared vocabulary: moves, transcripts, interval partitions and set prefixes.
//!
//! Everything here is 1-based: the naturals start at 1, inning indices start
//! at 1, and block `I_1` is the first block of a partition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::nat::Nat;
use crate::referee::Verdict;

/// A legal move: a natural number `>= 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Nat", into = "Nat")]
pub struct Move(Nat);

impl Move {
    pub fn new(value: impl Into<Nat>) -> Result<Self> {
        let value = value.into();
        if value.is_zero() {
            return Err(GameError::Precondition("move value < 1".into()));
        }
        Ok(Move(value))
    }

    pub fn value(&self) -> &Nat {
        &self.0
    }

    pub fn into_inner(self) -> Nat {
        self.0
    }
}

impl TryFrom<Nat> for Move {
    type Error = GameError;

    fn try_from(value: Nat) -> Result<Self> {
        Move::new(value)
    }
}

impl From<Move> for Nat {
    fn from(m: Move) -> Nat {
        m.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    G1,
    G2,
}

impl std::str::FromStr for GameKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g1" | "G1" => Ok(GameKind::G1),
            "g2" | "G2" => Ok(GameKind::G2),
            other => Err(GameError::Parse(format!("unknown game {other:?}"))),
        }
    }
}

/// One inning: ONE's move `m`, then TWO's reply `n`.
///
/// Moves are stored unchecked so that malformed transcripts can be
/// represented and rejected by [`validate_transcript`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inning {
    pub k: u64,
    pub m: Nat,
    pub n: Nat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub game: GameKind,
    pub horizon: u64,
    pub innings: Vec<Inning>,
    pub verdict: Option<Verdict>,
}

impl Transcript {
    pub fn new(game: GameKind, horizon: u64) -> Self {
        Transcript {
            game,
            horizon,
            innings: Vec::new(),
            verdict: None,
        }
    }

    /// Build a transcript from parallel move lists, numbering innings from 1.
    pub fn from_moves(game: GameKind, horizon: u64, ones: &[Nat], twos: &[Nat]) -> Self {
        let innings = ones
            .iter()
            .zip(twos)
            .enumerate()
            .map(|(i, (m, n))| Inning {
                k: i as u64 + 1,
                m: m.clone(),
                n: n.clone(),
            })
            .collect();
        Transcript {
            game,
            horizon,
            innings,
            verdict: None,
        }
    }

    pub fn len(&self) -> usize {
        self.innings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.innings.is_empty()
    }

    pub fn one_moves(&self) -> Vec<Nat> {
        self.innings.iter().map(|i| i.m.clone()).collect()
    }

    pub fn two_moves(&self) -> Vec<Nat> {
        self.innings.iter().map(|i| i.n.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MoveBelowOne { k: u64 },
    IndexGap { expected: u64, found: u64 },
    TooLong { len: usize, horizon: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MoveBelowOne { k } => write!(f, "move value < 1 (inning {k})"),
            Violation::IndexGap { expected, found } => {
                write!(f, "inning index gap: expected {expected}, found {found}")
            }
            Violation::TooLong { len, horizon } => {
                write!(f, "{len} innings exceed horizon {horizon}")
            }
        }
    }
}

/// Checks the transcript invariants, reporting the first violation in
/// inning order (index continuity, then move bounds), then the length bound.
pub fn validate_transcript(t: &Transcript) -> std::result::Result<(), Violation> {
    for (i, inning) in t.innings.iter().enumerate() {
        let expected = i as u64 + 1;
        if inning.k != expected {
            return Err(Violation::IndexGap {
                expected,
                found: inning.k,
            });
        }
        if inning.m.is_zero() || inning.n.is_zero() {
            return Err(Violation::MoveBelowOne { k: inning.k });
        }
    }
    if t.innings.len() as u64 > t.horizon {
        return Err(Violation::TooLong {
            len: t.innings.len(),
            horizon: t.horizon,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
enum Shape {
    /// `b_0 = 1 < b_1 < ... < b_last`; finite coverage `[1, b_last)`.
    Breakpoints(Vec<u64>),
    /// Blocks of a fixed size tiling all of the naturals.
    Uniform(u64),
}

/// A partition of an initial segment of the naturals (or all of them, for
/// the uniform shape) into consecutive nonempty blocks `I_n = [b_{n-1}, b_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalPartition {
    shape: Shape,
}

impl IntervalPartition {
    pub fn from_breakpoints(breakpoints: Vec<u64>) -> Result<Self> {
        if breakpoints.first() != Some(&1) {
            return Err(GameError::Precondition(
                "partition breakpoints must start at 1".into(),
            ));
        }
        if breakpoints.len() < 2 {
            return Err(GameError::Precondition(
                "partition needs at least one block".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GameError::Precondition(
                "partition breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(IntervalPartition {
            shape: Shape::Breakpoints(breakpoints),
        })
    }

    pub fn from_block_sizes(sizes: &[u64]) -> Result<Self> {
        let mut breaks = Vec::with_capacity(sizes.len() + 1);
        breaks.push(1u64);
        for &s in sizes {
            let last = *breaks.last().unwrap();
            let next = last
                .checked_add(s)
                .ok_or_else(|| GameError::out_of_range("partition", "block sizes overflow"))?;
            breaks.push(next);
        }
        Self::from_breakpoints(breaks)
    }

    pub fn uniform(size: u64) -> Result<Self> {
        if size == 0 {
            return Err(GameError::Precondition("block size must be >= 1".into()));
        }
        Ok(IntervalPartition {
            shape: Shape::Uniform(size),
        })
    }

    pub fn uniform_size(&self) -> Option<u64> {
        match self.shape {
            Shape::Uniform(s) => Some(s),
            Shape::Breakpoints(_) => None,
        }
    }

    /// Number of blocks, or `None` when the partition tiles all of the naturals.
    pub fn block_count(&self) -> Option<u64> {
        match &self.shape {
            Shape::Breakpoints(b) => Some(b.len() as u64 - 1),
            Shape::Uniform(_) => None,
        }
    }

    /// `b_last`, the exclusive end of coverage, if finite.
    pub fn coverage_end(&self) -> Option<Nat> {
        match &self.shape {
            Shape::Breakpoints(b) => Some(Nat::from(*b.last().unwrap())),
            Shape::Uniform(_) => None,
        }
    }

    pub fn covers(&self, k: &Nat) -> bool {
        !k.is_zero() && self.coverage_end().is_none_or(|end| *k < end)
    }

    /// The breakpoint `b_i` (so `b_0 = 1`).
    pub fn boundary(&self, i: &Nat) -> Result<Nat> {
        match &self.shape {
            Shape::Breakpoints(b) => i
                .to_u64()
                .and_then(|i| b.get(i as usize))
                .map(|&v| Nat::from(v))
                .ok_or_else(|| {
                    GameError::out_of_range(
                        "partition boundary",
                        format!("b_{i} of {}", b.len() - 1),
                    )
                }),
            Shape::Uniform(s) => Ok(i.mul_u64(*s).add_u64(1)),
        }
    }

    /// First element of block `I_n`.
    pub fn block_start(&self, n: &Nat) -> Result<Nat> {
        let prev = n
            .checked_sub(&Nat::ONE)
            .ok_or_else(|| GameError::out_of_range("block index", "blocks are numbered from 1"))?;
        self.boundary(&prev)
    }

    /// Exclusive end of block `I_n`.
    pub fn block_end(&self, n: &Nat) -> Result<Nat> {
        if n.is_zero() {
            return Err(GameError::out_of_range(
                "block index",
                "blocks are numbered from 1",
            ));
        }
        self.boundary(n)
    }

    /// Largest element of block `I_n`, which is also `max ∪_{j<=n} I_j`.
    pub fn block_max(&self, n: &Nat) -> Result<Nat> {
        Ok(self.block_end(n)?.saturating_sub_u64(1))
    }

    pub fn block_len(&self, n: &Nat) -> Result<Nat> {
        let start = self.block_start(n)?;
        let end = self.block_end(n)?;
        Ok(end.checked_sub(&start).expect("breakpoints increase"))
    }
}

/// The unique `n` with `k ∈ I_n`.
pub fn block_of(p: &IntervalPartition, k: &Nat) -> Result<Nat> {
    if !p.covers(k) {
        return Err(GameError::out_of_range(
            "block_of",
            format!("{k} not covered by the partition"),
        ));
    }
    match &p.shape {
        Shape::Breakpoints(b) => {
            let k = k.to_u64().expect("covered values are below b_last");
            // first breakpoint strictly greater than k is b_n
            let n = b.partition_point(|&x| x <= k);
            Ok(Nat::from(n as u64))
        }
        Shape::Uniform(s) => Ok(k.saturating_sub_u64(1).div_rem_u64(*s).0.add_u64(1)),
    }
}

impl fmt::Display for IntervalPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Uniform(s) => write!(f, "uniform:{s}"),
            Shape::Breakpoints(b) => {
                let parts: Vec<String> = b.iter().map(u64::to_string).collect();
                write!(f, "breaks:{}", parts.join(","))
            }
        }
    }
}

impl std::str::FromStr for IntervalPartition {
    type Err = GameError;

    /// `uniform:<size>`, `sizes:<s1>,<s2>,...` or `breaks:1,<b1>,<b2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_list = |body: &str| -> Result<Vec<u64>> {
            body.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|_| GameError::Parse(format!("bad partition entry {x:?}")))
                })
                .collect()
        };
        if let Some(body) = s.strip_prefix("uniform:") {
            let size = body
                .trim()
                .parse::<u64>()
                .map_err(|_| GameError::Parse(format!("bad block size {body:?}")))?;
            IntervalPartition::uniform(size).map_err(|e| GameError::Parse(e.to_string()))
        } else if let Some(body) = s.strip_prefix("sizes:") {
            IntervalPartition::from_block_sizes(&parse_list(body)?)
                .map_err(|e| GameError::Parse(e.to_string()))
        } else if let Some(body) = s.strip_prefix("breaks:") {
            IntervalPartition::from_breakpoints(parse_list(body)?)
                .map_err(|e| GameError::Parse(e.to_string()))
        } else {
            Err(GameError::Parse(format!("unknown partition spec {s:?}")))
        }
    }
}

/// Where a finite set came from; oracle-issued sets carry asserted membership.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    #[default]
    Plain,
    OracleIssued,
}

/// The part of a set that has been examined: its elements in `[1, scanned_upto]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetPrefix {
    elements: Vec<Nat>,
    scanned_upto: Nat,
    #[serde(default)]
    provenance: Provenance,
}

impl SetPrefix {
    pub fn new(elements: Vec<Nat>, scanned_upto: Nat) -> Result<Self> {
        if elements.first().is_some_and(Nat::is_zero) {
            return Err(GameError::Precondition("set elements must be >= 1".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GameError::Precondition(
                "set prefix must be strictly increasing".into(),
            ));
        }
        if elements.last().is_some_and(|x| *x > scanned_upto) {
            return Err(GameError::Precondition(
                "set prefix exceeds its scanned range".into(),
            ));
        }
        Ok(SetPrefix {
            elements,
            scanned_upto,
            provenance: Provenance::Plain,
        })
    }

    pub fn from_u64s(elements: &[u64], scanned_upto: u64) -> Result<Self> {
        Self::new(
            elements.iter().map(|&x| Nat::from(x)).collect(),
            scanned_upto.into(),
        )
    }

    /// The set of distinct values in `values`, scanned up to their maximum.
    pub fn from_values(values: &[Nat]) -> Self {
        let mut elements = values.to_vec();
        elements.sort();
        elements.dedup();
        elements.retain(|x| !x.is_zero());
        let scanned_upto = elements.last().cloned().unwrap_or(Nat::ZERO);
        SetPrefix {
            elements,
            scanned_upto,
            provenance: Provenance::Plain,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn elements(&self) -> &[Nat] {
        &self.elements
    }

    pub fn scanned_upto(&self) -> &Nat {
        &self.scanned_upto
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn contains(&self, x: &Nat) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Number of elements in `[lo, hi]`.
    pub fn count_between(&self, lo: &Nat, hi: &Nat) -> usize {
        let a = self.elements.partition_point(|x| x < lo);
        let b = self.elements.partition_point(|x| x <= hi);
        b.saturating_sub(a)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    fn transcript(innings: &[(u64, u64, u64)], horizon: u64) -> Transcript {
        Transcript {
            game: GameKind::G1,
            horizon,
            innings: innings
                .iter()
                .map(|&(k, m, nn)| Inning {
                    k,
                    m: n(m),
                    n: n(nn),
                })
                .collect(),
            verdict: None,
        }
    }

    #[test]
    fn validate_examples() {
        assert_eq!(
            validate_transcript(&transcript(&[(1, 2, 3), (2, 4, 5)], 10)),
            Ok(())
        );
        assert_eq!(validate_transcript(&transcript(&[], 5)), Ok(()));
        let err = validate_transcript(&transcript(&[(1, 0, 3)], 5)).unwrap_err();
        assert_eq!(err, Violation::MoveBelowOne { k: 1 });
        assert!(err.to_string().contains("move value < 1"));
    }

    #[test]
    fn validate_gaps_and_length() {
        assert_eq!(
            validate_transcript(&transcript(&[(1, 2, 3), (3, 4, 5)], 10)),
            Err(Violation::IndexGap {
                expected: 2,
                found: 3
            })
        );
        assert_eq!(
            validate_transcript(&transcript(&[(1, 2, 3), (2, 4, 5)], 1)),
            Err(Violation::TooLong { len: 2, horizon: 1 })
        );
    }

    #[test]
    fn block_of_examples() {
        let p = IntervalPartition::from_block_sizes(&[2, 2, 2]).unwrap();
        assert_eq!(block_of(&p, &n(4)).unwrap(), n(2));
        let q = IntervalPartition::from_block_sizes(&[2, 2]).unwrap();
        assert_eq!(block_of(&q, &n(1)).unwrap(), n(1));
        assert!(matches!(
            block_of(&q, &n(9)),
            Err(GameError::OutOfRange { .. })
        ));
        assert!(block_of(&q, &n(0)).is_err());
    }

    #[test]
    fn uniform_blocks() {
        let p = IntervalPartition::uniform(3).unwrap();
        assert_eq!(block_of(&p, &n(1)).unwrap(), n(1));
        assert_eq!(block_of(&p, &n(3)).unwrap(), n(1));
        assert_eq!(block_of(&p, &n(4)).unwrap(), n(2));
        assert_eq!(p.block_start(&n(2)).unwrap(), n(4));
        assert_eq!(p.block_max(&n(2)).unwrap(), n(6));
        let huge = Nat::Small(u64::MAX).mul_u64(7);
        let b = block_of(&p, &huge).unwrap();
        assert!(p.block_start(&b).unwrap() <= huge && huge <= p.block_max(&b).unwrap());
    }

    #[test]
    fn partition_spec_round_trip() {
        for spec in ["uniform:3", "breaks:1,3,5,9"] {
            let p: IntervalPartition = spec.parse().unwrap();
            assert_eq!(p.to_string(), spec);
        }
        assert!("breaks:2,3".parse::<IntervalPartition>().is_err());
        assert!("breaks:1,3,3".parse::<IntervalPartition>().is_err());
        assert!("uniform:0".parse::<IntervalPartition>().is_err());
    }

    #[test]
    fn set_prefix_rejects_bad_input() {
        assert!(SetPrefix::from_u64s(&[1, 1], 5).is_err());
        assert!(SetPrefix::from_u64s(&[0, 1], 5).is_err());
        assert!(SetPrefix::from_u64s(&[1, 9], 5).is_err());
        let s = SetPrefix::from_u64s(&[2, 4, 6], 10).unwrap();
        assert_eq!(s.count_between(&n(3), &n(6)), 2);
    }

    fn linear_scan(sizes: &[u64], k: u64) -> Option<u64> {
        let mut start = 1;
        for (i, s) in sizes.iter().enumerate() {
            if k >= start && k < start + s {
                return Some(i as u64 + 1);
            }
            start += s;
        }
        None
    }

    proptest! {
        #[test]
        fn block_of_matches_linear_scan(
            sizes in proptest::collection::vec(1u64..40, 1..400),
            k in 0u64..10_000,
        ) {
            let p = IntervalPartition::from_block_sizes(&sizes).unwrap();
            let got = block_of(&p, &n(k)).ok().and_then(|b| b.to_u64());
            prop_assert_eq!(got, linear_scan(&sizes, k));
        }

        #[test]
        fn blocks_tile_coverage_once(sizes in proptest::collection::vec(1u64..20, 1..50)) {
            let p = IntervalPartition::from_block_sizes(&sizes).unwrap();
            let end = p.coverage_end().unwrap().to_u64().unwrap();
            let mut hits = vec![0u32; end as usize];
            for b in 1..=p.block_count().unwrap() {
                let lo = p.block_start(&n(b)).unwrap().to_u64().unwrap();
                let hi = p.block_end(&n(b)).unwrap().to_u64().unwrap();
                prop_assert!(lo < hi);
                for x in lo..hi {
                    hits[x as usize] += 1;
                }
            }
            prop_assert!(hits[1..].iter().all(|&h| h == 1));
        }
    }
}
