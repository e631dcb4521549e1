//! Finite-window checks of the filter properties the main results turn on:
//! bounded enumerations, escaping a partition, and rareness.
//!
//! Every check certifies a finite window only. Asymptotic claims are never
//! concluded from them.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{GameError, Result};
use crate::filters::{
    block_hit_counts, enum_base, nonzero_block_hits, rare_selector, FilterHandle,
};
use crate::model::{block_of, IntervalPartition, SetPrefix};
use crate::nat::Nat;
use crate::strategies::IntFn;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseBound {
    pub base: u64,
    /// Least `K` with `enum_base(n, k) < g(k)` on `[K, scan]`.
    pub threshold: Option<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundednessReport {
    pub g: String,
    pub scan: u64,
    pub results: Vec<BaseBound>,
    pub all_pass: bool,
}

/// For each base index in `bases`, the least `K <= scan` such that the base
/// enumeration stays below `g` on `[K, scan]`.
///
/// Supersets of a base enumerate pointwise lower, so bases are the worst case.
pub fn check_enum_bounded(
    f: &FilterHandle,
    g: &IntFn,
    bases: RangeInclusive<u64>,
    scan: u64,
) -> Result<BoundednessReport> {
    if f.is_oracle() {
        return Err(GameError::UnsupportedKind(format!(
            "{f} has no enumerable bases"
        )));
    }
    if *bases.start() == 0 || scan == 0 {
        return Err(GameError::out_of_range(
            "check_enum_bounded",
            "bases and scan start at 1",
        ));
    }
    let mut results = Vec::new();
    for n in bases {
        let nn = Nat::from(n);
        let mut k = scan + 1;
        while k > 1 && enum_base(f, &nn, &Nat::from(k - 1))? < g.eval(k - 1) {
            k -= 1;
        }
        let pass = k <= scan;
        results.push(BaseBound {
            base: n,
            threshold: pass.then_some(k),
            pass,
        });
    }
    Ok(BoundednessReport {
        g: g.to_string(),
        scan,
        all_pass: results.iter().all(|r| r.pass),
        results,
    })
}

/// `B_n ∩ [1, scan]`.
fn base_prefix(f: &FilterHandle, n: u64, scan: u64) -> Result<SetPrefix> {
    let nn = Nat::from(n);
    let top = Nat::from(scan);
    let mut elements = Vec::new();
    for k in 1.. {
        let x = enum_base(f, &nn, &Nat::from(k))?;
        if x > top {
            break;
        }
        elements.push(x);
    }
    SetPrefix::new(elements, top)
}

/// Base indices `n` with `min B_n <= limit`.
fn bases_starting_by(f: &FilterHandle, limit: u64, cap: u64) -> Result<Vec<u64>> {
    let limit = Nat::from(limit);
    let mut out = Vec::new();
    for n in 1..=cap {
        if enum_base(f, &Nat::from(n), &Nat::ONE)? > limit {
            break;
        }
        out.push(n);
    }
    Ok(out)
}

fn require_cover(p: &IntervalPartition, scan: u64) -> Result<()> {
    if scan > 1 && !p.covers(&Nat::from(scan - 1)) {
        return Err(GameError::out_of_range(
            "partition",
            format!("does not cover [1, {scan})"),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum EscapeReport {
    Escape {
        base: Option<u64>,
        missed_blocks: Vec<Nat>,
        oracle_asserted: bool,
    },
    NoneFound {
        bases_checked: u64,
        reason: String,
    },
}

/// Look for a member disjoint from at least `threshold` blocks lying between
/// its least element and `scan`.
pub fn check_partition_escape(
    f: &FilterHandle,
    p: &IntervalPartition,
    threshold: u64,
    scan: u64,
) -> Result<EscapeReport> {
    require_cover(p, scan)?;
    if f.is_oracle() {
        // a selector meets every block; the stock oracle issues nothing else
        return Ok(EscapeReport::NoneFound {
            bases_checked: 0,
            reason: "oracle members issued as selectors meet every block".into(),
        });
    }
    let bases = bases_starting_by(f, scan, scan)?;
    for &n in &bases {
        let s = base_prefix(f, n, scan)?;
        let Some(first) = s.elements().first() else {
            continue;
        };
        let counts = block_hit_counts(&s, p)?;
        let first_block = block_of(p, first)?;
        let missed: Vec<Nat> = counts
            .into_iter()
            .filter(|(b, c)| {
                *c == 0
                    && *b >= first_block
                    && p.block_max(b)
                        .is_ok_and(|m| m.to_u64().is_some_and(|m| m <= scan))
            })
            .map(|(b, _)| b)
            .collect();
        if missed.len() as u64 >= threshold {
            return Ok(EscapeReport::Escape {
                base: Some(n),
                missed_blocks: missed,
                oracle_asserted: false,
            });
        }
    }
    Ok(EscapeReport::NoneFound {
        bases_checked: bases.len() as u64,
        reason: format!("no base starting by {scan} misses {threshold} blocks within the window"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleHit {
    pub base: u64,
    pub block: Nat,
    pub hits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum RareReport {
    /// The oracle's selector restricted to `[1, scan]`.
    Selector {
        elements: Vec<Nat>,
        max_hits_per_block: u64,
        verified: bool,
    },
    /// Every base that could witness membership at horizon `scan` meets some
    /// block at least twice, so no witnessed set is a selector.
    Obstruction {
        bases_checked: u64,
        all_hit_twice: bool,
        /// First doubly hit block per base, or its absence.
        witnesses: Vec<DoubleHit>,
        unobstructed: Vec<u64>,
    },
}

pub fn check_rare_at_horizon(
    f: &FilterHandle,
    p: &IntervalPartition,
    scan: u64,
) -> Result<RareReport> {
    require_cover(p, scan)?;
    if f.is_oracle() {
        let sel = rare_selector(f, p, &BTreeSet::new())?;
        let prefix = sel.prefix(&Nat::from(scan));
        let max_hits = nonzero_block_hits(&prefix, p)?
            .into_iter()
            .map(|(_, c)| c)
            .max()
            .unwrap_or(0);
        return Ok(RareReport::Selector {
            elements: prefix.elements().to_vec(),
            max_hits_per_block: max_hits,
            verified: max_hits <= 1,
        });
    }
    // Witnessed at horizon `scan` needs a base starting by ⌈scan/2⌉
    let bases = bases_starting_by(f, scan.div_ceil(2), scan)?;
    let mut witnesses = Vec::new();
    let mut unobstructed = Vec::new();
    for &n in &bases {
        let s = base_prefix(f, n, scan)?;
        match nonzero_block_hits(&s, p)?
            .into_iter()
            .find(|(_, c)| *c >= 2)
        {
            Some((block, hits)) => witnesses.push(DoubleHit {
                base: n,
                block,
                hits,
            }),
            None => unobstructed.push(n),
        }
    }
    Ok(RareReport::Obstruction {
        bases_checked: bases.len() as u64,
        all_hit_twice: unobstructed.is_empty(),
        witnesses,
        unobstructed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{BaseGenerator, SelectorRule};

    fn g(s: &str) -> IntFn {
        s.parse().unwrap()
    }

    fn nonrare3() -> FilterHandle {
        FilterHandle::non_rare_witness(IntervalPartition::uniform(3).unwrap()).unwrap()
    }

    #[test]
    fn enum_bounded_examples() {
        let r = check_enum_bounded(&FilterHandle::Frechet, &g("2k"), 1..=50, 1000).unwrap();
        assert!(r.all_pass);
        for b in &r.results {
            // n + k - 1 < 2k exactly when k >= n
            assert_eq!(b.threshold, Some(b.base));
        }
        let r = check_enum_bounded(&FilterHandle::Frechet, &g("k+10"), 1..=50, 1000).unwrap();
        let r12 = r.results.iter().find(|b| b.base == 12).unwrap();
        assert!(!r12.pass);
        assert!(r.results.iter().filter(|b| b.base <= 10).all(|b| b.pass));
        let r = check_enum_bounded(&nonrare3(), &g("2k"), 1..=20, 1000).unwrap();
        assert!(r.all_pass);
        let oracle = FilterHandle::RareOracle(SelectorRule::Leftmost);
        assert!(matches!(
            check_enum_bounded(&oracle, &g("2k"), 1..=3, 10),
            Err(GameError::UnsupportedKind(_))
        ));
    }

    #[test]
    fn thresholds_are_least() {
        let f = nonrare3();
        let r = check_enum_bounded(&f, &g("2k"), 1..=20, 300).unwrap();
        for b in &r.results {
            let k = b.threshold.unwrap();
            if k > 1 {
                let at = enum_base(&f, &Nat::from(b.base), &Nat::from(k - 1)).unwrap();
                assert!(at >= g("2k").eval(k - 1));
            }
        }
    }

    #[test]
    fn escape_examples() {
        let p3 = IntervalPartition::uniform(3).unwrap();
        for f in FilterHandle::stock_concrete() {
            let r = check_partition_escape(&f, &p3, 5, 300).unwrap();
            assert!(matches!(r, EscapeReport::NoneFound { .. }), "{f}");
        }
        let r = check_partition_escape(&nonrare3(), &p3, 1, 300).unwrap();
        assert!(matches!(r, EscapeReport::NoneFound { .. }));
        let oracle = FilterHandle::RareOracle(SelectorRule::Leftmost);
        let r = check_partition_escape(&oracle, &IntervalPartition::uniform(2).unwrap(), 5, 300)
            .unwrap();
        assert!(matches!(r, EscapeReport::NoneFound { .. }));
    }

    #[test]
    fn escape_is_found_for_sparse_bases() {
        // B_n = even numbers >= 2n: misses every odd singleton block
        let evens = FilterHandle::BaseGenerated(BaseGenerator::new("evens", |n, i| {
            n.add(i).saturating_sub_u64(1).mul_u64(2)
        }));
        let r =
            check_partition_escape(&evens, &IntervalPartition::uniform(1).unwrap(), 5, 50).unwrap();
        match r {
            EscapeReport::Escape {
                base,
                missed_blocks,
                ..
            } => {
                assert_eq!(base, Some(1));
                assert!(missed_blocks.iter().all(|b| b.div_rem_u64(2).1 == 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rare_examples() {
        let p2 = IntervalPartition::uniform(2).unwrap();
        match check_rare_at_horizon(&FilterHandle::Frechet, &p2, 100).unwrap() {
            RareReport::Obstruction {
                all_hit_twice,
                bases_checked,
                ..
            } => {
                assert!(all_hit_twice);
                assert_eq!(bases_checked, 50);
            }
            other => panic!("{other:?}"),
        }
        let oracle = FilterHandle::RareOracle(SelectorRule::Leftmost);
        match check_rare_at_horizon(&oracle, &p2, 100).unwrap() {
            RareReport::Selector {
                elements, verified, ..
            } => {
                assert!(verified);
                let odds: Vec<Nat> = (0..50).map(|i| Nat::from(2 * i + 1)).collect();
                assert_eq!(elements, odds);
            }
            other => panic!("{other:?}"),
        }
        let p3 = IntervalPartition::uniform(3).unwrap();
        match check_rare_at_horizon(&nonrare3(), &p3, 300).unwrap() {
            RareReport::Obstruction { all_hit_twice, .. } => assert!(all_hit_twice),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singleton_blocks_are_unobstructed() {
        let p1 = IntervalPartition::uniform(1).unwrap();
        match check_rare_at_horizon(&FilterHandle::Frechet, &p1, 40).unwrap() {
            RareReport::Obstruction {
                all_hit_twice,
                unobstructed,
                ..
            } => {
                assert!(!all_hit_twice);
                assert_eq!(unobstructed.len(), 20);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_partitions_are_rejected() {
        let p = IntervalPartition::from_block_sizes(&[3, 3]).unwrap();
        assert!(check_rare_at_horizon(&FilterHandle::Frechet, &p, 100).is_err());
    }
}
