//! Finitely representable non-principal filters on the naturals.
//!
//! A concrete filter is given by a decreasing base `B_1 ⊇ B_2 ⊇ ...`; a set
//! belongs to the filter when it contains some `B_n`. Membership of an
//! infinite set cannot be decided from a finite prefix, so
//! [`prefix_status`] returns a three-valued [`PrefixStatus`].
//!
//! Every countably based filter is meager. Non-meager and rare behaviour is
//! therefore only available through [`FilterHandle::RareOracle`], whose
//! membership claims are asserted rather than checked.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::MoveArith;
use crate::error::{GameError, Result};
use crate::model::{block_of, IntervalPartition, Provenance, SetPrefix};
use crate::nat::Nat;

type BaseFn = dyn Fn(&Nat, &Nat) -> Nat + Send + Sync;

/// `β(n, i)`: the `i`-th element (1-based) of base set `B_n`.
#[derive(Clone)]
pub struct BaseGenerator {
    name: String,
    beta: Arc<BaseFn>,
}

impl BaseGenerator {
    pub fn new(
        name: impl Into<String>,
        beta: impl Fn(&Nat, &Nat) -> Nat + Send + Sync + 'static,
    ) -> Self {
        BaseGenerator {
            name: name.into(),
            beta: Arc::new(beta),
        }
    }

    /// `B_n = [n, ∞)`, the same sets as the Fréchet filter, built through the
    /// generic base machinery.
    pub fn tail() -> Self {
        BaseGenerator::new("tail", |n, i| n.add(i).saturating_sub_u64(1))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nth(&self, n: &Nat, i: &Nat) -> Nat {
        (self.beta)(n, i)
    }
}

impl fmt::Debug for BaseGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseGenerator")
            .field("name", &self.name)
            .finish()
    }
}

/// How a rare-selector oracle picks its point in each block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectorRule {
    /// Smallest element of the block outside the avoid set.
    Leftmost,
}

impl SelectorRule {
    /// Pick from the block `[lo, hi)` in an arbitrary number domain.
    pub fn pick<A: MoveArith>(
        &self,
        arith: &A,
        lo: &A::Num,
        hi: &A::Num,
        avoid: impl Fn(&A::Num) -> bool,
    ) -> Result<Option<A::Num>> {
        match self {
            SelectorRule::Leftmost => {
                let mut x = lo.clone();
                while x < *hi {
                    if !avoid(&x) {
                        return Ok(Some(x));
                    }
                    x = arith.add(&x, 1)?;
                }
                Ok(None)
            }
        }
    }

    /// Pick among the (sorted) members of an already-issued set lying in a
    /// block. A rare filter meets any of its members in a selector of any
    /// partition, so restricting the choice to `candidates` stays inside the
    /// filter.
    pub fn pick_from<'a, N: Ord + 'a>(
        &self,
        candidates: impl IntoIterator<Item = &'a N>,
        avoid: impl Fn(&N) -> bool,
    ) -> Option<&'a N> {
        match self {
            SelectorRule::Leftmost => candidates.into_iter().find(|x| !avoid(x)),
        }
    }
}

#[derive(Clone, Debug)]
pub enum FilterHandle {
    /// Cofinite sets; `B_n = [n, ∞)`.
    Frechet,
    BaseGenerated(BaseGenerator),
    /// Filter generated by `U_m` = the two smallest elements of every block
    /// `P_n` with `n >= m`. Every member meets cofinitely many blocks twice.
    NonRareWitness(IntervalPartition),
    RareOracle(SelectorRule),
}

impl FilterHandle {
    pub fn non_rare_witness(partition: IntervalPartition) -> Result<Self> {
        match partition.uniform_size() {
            Some(s) if s >= 3 => Ok(FilterHandle::NonRareWitness(partition)),
            Some(_) => Err(GameError::Precondition(
                "non-rare witness blocks must have size >= 3".into(),
            )),
            None => Err(GameError::Precondition(
                "non-rare witness needs a partition of all of the naturals".into(),
            )),
        }
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, FilterHandle::RareOracle(_))
    }

    /// The stock filters with enumerable bases.
    pub fn stock_concrete() -> Vec<FilterHandle> {
        vec![
            FilterHandle::Frechet,
            FilterHandle::BaseGenerated(BaseGenerator::tail()),
            FilterHandle::non_rare_witness(IntervalPartition::uniform(3).unwrap()).unwrap(),
        ]
    }

    fn unsupported(&self, op: &str) -> GameError {
        GameError::UnsupportedKind(format!("{op} is not available for {self}"))
    }

    /// Number of elements of `B_n` that are `<= x`.
    pub(crate) fn base_count_upto(&self, n: &Nat, x: &Nat) -> Result<Nat> {
        match self {
            FilterHandle::Frechet => Ok(x.add_u64(1).checked_sub(n).unwrap_or(Nat::ZERO)),
            FilterHandle::BaseGenerated(g) => Ok(count_by_search(|i| g.nth(n, i), x)),
            FilterHandle::NonRareWitness(p) => {
                let start = p.block_start(n)?;
                if *x < start {
                    return Ok(Nat::ZERO);
                }
                let last = block_of(p, x)?;
                let full_blocks = last.checked_sub(n).expect("x lies at or after block n");
                let offset = x
                    .checked_sub(&p.block_start(&last)?)
                    .expect("x in its block");
                let partial = if offset.is_zero() { 1 } else { 2 };
                Ok(full_blocks.mul_u64(2).add_u64(partial))
            }
            FilterHandle::RareOracle(_) => Err(self.unsupported("base counting")),
        }
    }

    /// `min B_n`.
    pub(crate) fn base_min(&self, n: &Nat) -> Result<Nat> {
        enum_base(self, n, &Nat::ONE)
    }

    /// Largest `n` with `min B_n <= t`, if any. Base minima never decrease.
    fn last_base_starting_by(&self, t: &Nat) -> Result<Option<Nat>> {
        match self {
            FilterHandle::Frechet => Ok(if t.is_zero() { None } else { Some(t.clone()) }),
            FilterHandle::NonRareWitness(p) => {
                if t.is_zero() {
                    Ok(None)
                } else {
                    block_of(p, t).map(Some)
                }
            }
            FilterHandle::BaseGenerated(_) => {
                if self.base_min(&Nat::ONE)? > *t {
                    return Ok(None);
                }
                // gallop then bisect on n
                let mut lo = Nat::ONE;
                let mut hi = Nat::from(2u64);
                while self.base_min(&hi)? <= *t {
                    lo = hi.clone();
                    hi = hi.mul_u64(2);
                    if hi.bits() > 128 {
                        return Err(GameError::ResourceCap(
                            "base minima do not grow; cannot bound base index".into(),
                        ));
                    }
                }
                while hi.checked_sub(&lo).unwrap() > Nat::ONE {
                    let mid = lo.add(&hi).half();
                    if self.base_min(&mid)? <= *t {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(Some(lo))
            }
            FilterHandle::RareOracle(_) => Err(self.unsupported("base search")),
        }
    }

    /// Whether `B_n ∩ [1, h] ⊆ s`.
    fn base_contained(&self, n: &Nat, s: &SetPrefix, h: &Nat) -> Result<bool> {
        let count = self.base_count_upto(n, h)?;
        let min = self.base_min(n)?;
        let available = s.count_between(&min, h) as u64;
        match count.to_u64() {
            Some(c) if c <= available => {
                for i in 1..=c {
                    if !s.contains(&enum_base(self, n, &Nat::from(i))?) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

/// `#{i >= 1 : f(i) <= x}` for strictly increasing `f`.
fn count_by_search(f: impl Fn(&Nat) -> Nat, x: &Nat) -> Nat {
    if f(&Nat::ONE) > *x {
        return Nat::ZERO;
    }
    let mut lo = Nat::ONE;
    let mut hi = Nat::from(2u64);
    while f(&hi) <= *x {
        lo = hi.clone();
        hi = hi.mul_u64(2);
    }
    while hi.checked_sub(&lo).unwrap() > Nat::ONE {
        let mid = lo.add(&hi).half();
        if f(&mid) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

impl fmt::Display for FilterHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterHandle::Frechet => f.write_str("frechet"),
            FilterHandle::BaseGenerated(g) => write!(f, "base:{}", g.name()),
            FilterHandle::NonRareWitness(p) => match p.uniform_size() {
                Some(s) => write!(f, "nonrare:block={s}"),
                None => write!(f, "nonrare:{p}"),
            },
            FilterHandle::RareOracle(SelectorRule::Leftmost) => f.write_str("rare:leftmost"),
        }
    }
}

impl std::str::FromStr for FilterHandle {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "frechet" => Ok(FilterHandle::Frechet),
            "base:tail" => Ok(FilterHandle::BaseGenerated(BaseGenerator::tail())),
            "rare:leftmost" => Ok(FilterHandle::RareOracle(SelectorRule::Leftmost)),
            other => {
                let size = other
                    .strip_prefix("nonrare:block=")
                    .ok_or_else(|| GameError::Parse(format!("unknown filter spec {other:?}")))?;
                let size: u64 = size
                    .parse()
                    .map_err(|_| GameError::Parse(format!("bad block size {size:?}")))?;
                if size < 3 {
                    return Err(GameError::Parse("nonrare block size must be >= 3".into()));
                }
                FilterHandle::non_rare_witness(IntervalPartition::uniform(size)?)
            }
        }
    }
}

/// Finite-horizon membership status of a set prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum PrefixStatus {
    /// A finite certificate of non-membership. No stock filter emits it.
    Violated,
    Compatible,
    /// The prefix contains a whole base set on the scanned window. Oracle
    /// filters witness their own sets without a base certificate.
    Witnessed {
        #[serde(skip_serializing_if = "Option::is_none", default)]
        base: Option<Nat>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        tail_start: Option<Nat>,
    },
}

impl PrefixStatus {
    pub fn is_witnessed(&self) -> bool {
        matches!(self, PrefixStatus::Witnessed { .. })
    }
}

/// Membership status of `s` at horizon `h`.
///
/// `Witnessed` means some base set `B_n` with `min B_n <= ⌈h/2⌉` satisfies
/// `B_n ∩ [1, h] ⊆ s`; the reported witness is the least such `n`, with
/// tail start `min B_n`. Requiring the base to start in the first half of
/// the window keeps a single large element from certifying membership.
pub fn prefix_status(f: &FilterHandle, s: &SetPrefix, h: &Nat) -> Result<PrefixStatus> {
    if s.scanned_upto() > h {
        return Err(GameError::Precondition(format!(
            "prefix scanned to {} beyond horizon {h}",
            s.scanned_upto()
        )));
    }
    if let FilterHandle::RareOracle(_) = f {
        return Ok(match s.provenance() {
            Provenance::OracleIssued => PrefixStatus::Witnessed {
                base: None,
                tail_start: None,
            },
            Provenance::Plain => PrefixStatus::Compatible,
        });
    }
    if h.is_zero() {
        return Ok(PrefixStatus::Compatible);
    }
    let window_start = h.add_u64(1).half();
    let Some(n_max) = f.last_base_starting_by(&window_start)? else {
        return Ok(PrefixStatus::Compatible);
    };
    if !f.base_contained(&n_max, s, h)? {
        return Ok(PrefixStatus::Compatible);
    }
    // containment is monotone in n: bisect for the least witness
    let (mut lo, mut hi) = (Nat::ZERO, n_max);
    while hi.checked_sub(&lo).unwrap() > Nat::ONE {
        let mid = lo.add(&hi).half();
        if f.base_contained(&mid, s, h)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tail_start = f.base_min(&hi)?;
    Ok(PrefixStatus::Witnessed {
        base: Some(hi),
        tail_start: Some(tail_start),
    })
}

/// The `k`-th smallest element of `B_n`.
pub fn enum_base(f: &FilterHandle, n: &Nat, k: &Nat) -> Result<Nat> {
    if n.is_zero() || k.is_zero() {
        return Err(GameError::out_of_range("enum_base", "indices start at 1"));
    }
    match f {
        FilterHandle::Frechet => Ok(n.add(k).saturating_sub_u64(1)),
        FilterHandle::BaseGenerated(g) => Ok(g.nth(n, k)),
        FilterHandle::NonRareWitness(p) => {
            let (q, r) = k.saturating_sub_u64(1).div_rem_u64(2);
            let block = n.add(&q);
            Ok(p.block_start(&block)?.add_u64(r))
        }
        FilterHandle::RareOracle(_) => Err(f.unsupported("enum_base")),
    }
}

type NthFn = dyn Fn(&Nat) -> Option<Nat> + Send + Sync;

/// A strictly increasing enumeration `γ(1) < γ(2) < ...`, possibly finite.
#[derive(Clone)]
pub struct SetGenerator {
    label: String,
    nth: Arc<NthFn>,
    provenance: Provenance,
}

impl SetGenerator {
    pub fn new(
        label: impl Into<String>,
        nth: impl Fn(&Nat) -> Option<Nat> + Send + Sync + 'static,
    ) -> Self {
        SetGenerator {
            label: label.into(),
            nth: Arc::new(nth),
            provenance: Provenance::Plain,
        }
    }

    pub fn oracle_issued(mut self) -> Self {
        self.provenance = Provenance::OracleIssued;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `γ(i)`, 1-based.
    pub fn nth(&self, i: u64) -> Option<Nat> {
        if i == 0 {
            return None;
        }
        (self.nth)(&Nat::from(i))
    }

    pub fn take(&self, count: u64) -> Vec<Nat> {
        (1..=count).map_while(|i| self.nth(i)).collect()
    }

    /// All elements `<= h`.
    pub fn prefix(&self, h: &Nat) -> SetPrefix {
        let elements: Vec<Nat> = (1..)
            .map_while(|i| self.nth(i))
            .take_while(|x| x <= h)
            .collect();
        SetPrefix::new(elements, h.clone())
            .expect("generators enumerate increasingly")
            .with_provenance(self.provenance)
    }
}

impl fmt::Debug for SetGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetGenerator")
            .field("label", &self.label)
            .field("provenance", &self.provenance)
            .finish()
    }
}

/// A selector of `p` avoiding `avoid`, issued by a rare-filter oracle.
///
/// The result meets every block in exactly one point; blocks lying entirely
/// inside `avoid` make selection impossible.
pub fn rare_selector(
    f: &FilterHandle,
    p: &IntervalPartition,
    avoid: &BTreeSet<Nat>,
) -> Result<SetGenerator> {
    let FilterHandle::RareOracle(rule) = f else {
        return Err(f.unsupported("rare_selector"));
    };
    let rule = *rule;
    // only blocks touching the finite avoid set can be exhausted
    for a in avoid {
        if !p.covers(a) {
            continue;
        }
        let b = block_of(p, a)?;
        if select_in_block(rule, p, &b, avoid)?.is_none() {
            return Err(GameError::NoSelector(format!(
                "block {b} lies inside the avoid set"
            )));
        }
    }
    let p = p.clone();
    let avoid = avoid.clone();
    let blocks = p.block_count();
    let label = format!("{rule:?} selector of {p}").to_lowercase();
    Ok(SetGenerator::new(label, move |i| {
        if blocks.is_some_and(|c| *i > c) {
            return None;
        }
        select_in_block(rule, &p, i, &avoid).ok().flatten()
    })
    .oracle_issued())
}

fn select_in_block(
    rule: SelectorRule,
    p: &IntervalPartition,
    block: &Nat,
    avoid: &BTreeSet<Nat>,
) -> Result<Option<Nat>> {
    let lo = p.block_start(block)?;
    let hi = p.block_end(block)?;
    rule.pick(&crate::arith::Exact, &lo, &hi, |x| avoid.contains(x))
}

/// `|s ∩ I_n|` for every block starting within `s.scanned_upto`.
pub fn block_hit_counts(s: &SetPrefix, p: &IntervalPartition) -> Result<Vec<(Nat, u64)>> {
    const MAX_BLOCKS: u64 = 10_000_000;
    let h = s.scanned_upto();
    let mut last = if h.is_zero() {
        Nat::ZERO
    } else if p.covers(h) {
        block_of(p, h)?
    } else {
        Nat::from(p.block_count().unwrap_or(0))
    };
    if let Some(c) = p.block_count() {
        last = last.min(Nat::from(c));
    }
    let last = last
        .to_u64()
        .filter(|&b| b <= MAX_BLOCKS)
        .ok_or_else(|| GameError::ResourceCap(format!("{last} blocks to count")))?;
    let mut counts: Vec<(Nat, u64)> = (1..=last).map(|b| (Nat::from(b), 0)).collect();
    for x in s.elements() {
        if !p.covers(x) {
            continue;
        }
        if let Some(b) = block_of(p, x)?.to_u64() {
            if b >= 1 && b <= last {
                counts[b as usize - 1].1 += 1;
            }
        }
    }
    Ok(counts)
}

/// Sparse variant of [`block_hit_counts`]: only the blocks `s` meets, in
/// order. Works for prefixes whose values are far beyond enumerable range.
pub fn nonzero_block_hits(s: &SetPrefix, p: &IntervalPartition) -> Result<Vec<(Nat, u64)>> {
    let mut out: Vec<(Nat, u64)> = Vec::new();
    for x in s.elements() {
        let b = block_of(p, x)?;
        match out.last_mut() {
            Some((last, c)) if *last == b => *c += 1,
            _ => out.push((b, 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    fn nats(v: &[u64]) -> Vec<Nat> {
        v.iter().map(|&x| n(x)).collect()
    }

    fn nonrare3() -> FilterHandle {
        "nonrare:block=3".parse().unwrap()
    }

    fn pairs(v: &[(u64, u64)]) -> Vec<(Nat, u64)> {
        v.iter().map(|&(b, c)| (n(b), c)).collect()
    }

    #[test]
    fn frechet_full_tail_is_witnessed() {
        let s = SetPrefix::from_u64s(&(4..=20).collect::<Vec<_>>(), 20).unwrap();
        let st = prefix_status(&FilterHandle::Frechet, &s, &n(20)).unwrap();
        assert_eq!(
            st,
            PrefixStatus::Witnessed {
                base: Some(n(4)),
                tail_start: Some(n(4))
            }
        );
    }

    #[test]
    fn frechet_odds_are_compatible() {
        let odds: Vec<u64> = (1..20).step_by(2).collect();
        let s = SetPrefix::from_u64s(&odds, 20).unwrap();
        assert_eq!(
            prefix_status(&FilterHandle::Frechet, &s, &n(20)).unwrap(),
            PrefixStatus::Compatible
        );
    }

    #[test]
    fn nonrare_base_shape_is_witnessed() {
        let s = SetPrefix::from_u64s(&[4, 5, 7, 8, 10, 11], 12).unwrap();
        assert_eq!(
            prefix_status(&nonrare3(), &s, &n(12)).unwrap(),
            PrefixStatus::Witnessed {
                base: Some(n(2)),
                tail_start: Some(n(4))
            }
        );
    }

    #[test]
    fn base_tail_matches_frechet() {
        let tail = FilterHandle::BaseGenerated(BaseGenerator::tail());
        for (elems, h) in [
            ((4..=20).collect::<Vec<u64>>(), 20u64),
            ((7..=30).collect(), 30),
            (vec![1, 3, 5], 6),
        ] {
            let s = SetPrefix::from_u64s(&elems, h).unwrap();
            assert_eq!(
                prefix_status(&tail, &s, &n(h)).unwrap(),
                prefix_status(&FilterHandle::Frechet, &s, &n(h)).unwrap()
            );
        }
    }

    #[test]
    fn oracle_status_follows_provenance() {
        let rare = FilterHandle::RareOracle(SelectorRule::Leftmost);
        let s = SetPrefix::from_u64s(&[1, 3, 5], 6).unwrap();
        assert_eq!(
            prefix_status(&rare, &s, &n(6)).unwrap(),
            PrefixStatus::Compatible
        );
        let issued = s.with_provenance(Provenance::OracleIssued);
        assert!(prefix_status(&rare, &issued, &n(6)).unwrap().is_witnessed());
    }

    #[test]
    fn prefix_beyond_horizon_is_rejected() {
        let s = SetPrefix::from_u64s(&[1, 2], 10).unwrap();
        assert!(prefix_status(&FilterHandle::Frechet, &s, &n(5)).is_err());
    }

    #[test]
    fn enum_base_examples() {
        assert_eq!(
            enum_base(&FilterHandle::Frechet, &n(2), &n(3)).unwrap(),
            n(4)
        );
        assert_eq!(enum_base(&nonrare3(), &n(2), &n(1)).unwrap(), n(4));
        assert_eq!(enum_base(&nonrare3(), &n(2), &n(3)).unwrap(), n(7));
        let rare: FilterHandle = "rare:leftmost".parse().unwrap();
        assert!(matches!(
            enum_base(&rare, &n(1), &n(1)),
            Err(GameError::UnsupportedKind(_))
        ));
    }

    #[test]
    fn rare_selector_examples() {
        let rare: FilterHandle = "rare:leftmost".parse().unwrap();
        let p = IntervalPartition::from_block_sizes(&[2, 2, 2]).unwrap();
        let x = rare_selector(&rare, &p, &BTreeSet::new()).unwrap();
        assert_eq!(x.take(10), nats(&[1, 3, 5]));

        let q = IntervalPartition::from_block_sizes(&[2, 2]).unwrap();
        let avoid: BTreeSet<Nat> = [n(1)].into_iter().collect();
        assert_eq!(
            rare_selector(&rare, &q, &avoid).unwrap().take(10),
            nats(&[2, 3])
        );

        let one = IntervalPartition::from_block_sizes(&[1]).unwrap();
        assert!(matches!(
            rare_selector(&rare, &one, &avoid),
            Err(GameError::NoSelector(_))
        ));
        assert!(rare_selector(&FilterHandle::Frechet, &p, &BTreeSet::new()).is_err());
    }

    #[test]
    fn block_hit_count_examples() {
        let p = IntervalPartition::from_block_sizes(&[2, 2, 2]).unwrap();
        let s = SetPrefix::from_u64s(&[1, 2, 5], 6).unwrap();
        assert_eq!(
            block_hit_counts(&s, &p).unwrap(),
            pairs(&[(1, 2), (2, 0), (3, 1)])
        );
        let empty = SetPrefix::from_u64s(&[], 6).unwrap();
        assert_eq!(
            block_hit_counts(&empty, &p).unwrap(),
            pairs(&[(1, 0), (2, 0), (3, 0)])
        );
        let q = IntervalPartition::from_block_sizes(&[2, 2]).unwrap();
        let s = SetPrefix::from_u64s(&[3, 4], 4).unwrap();
        assert_eq!(block_hit_counts(&s, &q).unwrap(), pairs(&[(1, 0), (2, 2)]));
        assert_eq!(nonzero_block_hits(&s, &q).unwrap(), pairs(&[(2, 2)]));
    }

    #[test]
    fn filter_specs_round_trip() {
        for spec in [
            "frechet",
            "base:tail",
            "nonrare:block=3",
            "nonrare:block=5",
            "rare:leftmost",
        ] {
            let f: FilterHandle = spec.parse().unwrap();
            assert_eq!(f.to_string(), spec);
        }
        assert!("nonrare:block=2".parse::<FilterHandle>().is_err());
        assert!("ultra".parse::<FilterHandle>().is_err());
    }

    #[test]
    fn non_principality_proxy() {
        for f in FilterHandle::stock_concrete() {
            for k in 1..=1000u64 {
                // some base set misses k
                let found = (1..=k + 1).any(|b| {
                    let b = n(b);
                    let cnt_k = f.base_count_upto(&b, &n(k)).unwrap();
                    let cnt_before = f.base_count_upto(&b, &n(k - 1)).unwrap();
                    cnt_k == cnt_before
                });
                assert!(found, "{f}: every base contains {k}");
            }
        }
    }

    #[test]
    fn bases_decrease() {
        for f in FilterHandle::stock_concrete() {
            for b in 1..=20u64 {
                let outer: BTreeSet<Nat> = (1..=3000u64)
                    .map(|i| enum_base(&f, &n(b), &n(i)).unwrap())
                    .take_while(|x| *x <= n(2000))
                    .collect();
                for i in 1..=2000u64 {
                    let x = enum_base(&f, &n(b + 1), &n(i)).unwrap();
                    if x > n(2000) {
                        break;
                    }
                    assert!(outer.contains(&x), "{f}: B_{} ⊄ B_{b} at {x}", b + 1);
                }
            }
        }
    }

    #[test]
    fn nonrare_bases_meet_blocks_twice() {
        let f = nonrare3();
        let p = IntervalPartition::uniform(3).unwrap();
        for m in 1..=10u64 {
            let elems: Vec<Nat> = (1..=200u64)
                .map(|i| enum_base(&f, &n(m), &n(i)).unwrap())
                .collect();
            let s = SetPrefix::from_values(&elems);
            for (b, c) in block_hit_counts(&s, &p).unwrap() {
                let expect = if b < n(m) { 0 } else { 2 };
                if b < block_of(&p, s.scanned_upto()).unwrap() {
                    assert_eq!(c, expect);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn base_counts_match_enumeration(which in 0usize..3, b in 1u64..30, x in 0u64..500) {
            let f = &FilterHandle::stock_concrete()[which];
            let brute = (1..=600u64)
                .map(|i| enum_base(f, &n(b), &n(i)).unwrap())
                .filter(|v| *v <= n(x))
                .count() as u64;
            prop_assert_eq!(f.base_count_upto(&n(b), &n(x)).unwrap(), n(brute));
        }

        #[test]
        fn witnessed_is_monotone(
            which in 0usize..3,
            base in proptest::collection::btree_set(1u64..120, 0..120),
            extra in proptest::collection::btree_set(1u64..120, 0..40),
        ) {
            let f = &FilterHandle::stock_concrete()[which];
            let h = n(120);
            let s = SetPrefix::new(base.iter().map(|&x| n(x)).collect(), h.clone()).unwrap();
            let sup = SetPrefix::new(base.union(&extra).map(|&x| n(x)).collect(), h.clone()).unwrap();
            if prefix_status(f, &s, &h).unwrap().is_witnessed() {
                prop_assert!(prefix_status(f, &sup, &h).unwrap().is_witnessed());
            }
        }

        #[test]
        fn selectors_hit_blocks_at_most_once(
            sizes in proptest::collection::vec(1u64..8, 1..60),
            avoid in proptest::collection::btree_set(1u64..300, 0..20),
        ) {
            let rare = FilterHandle::RareOracle(SelectorRule::Leftmost);
            let p = IntervalPartition::from_block_sizes(&sizes).unwrap();
            let avoid: BTreeSet<Nat> = avoid.into_iter().map(n).collect();
            if let Ok(x) = rare_selector(&rare, &p, &avoid) {
                let end = p.coverage_end().unwrap();
                let s = x.prefix(&end);
                for (_, c) in block_hit_counts(&s, &p).unwrap() {
                    prop_assert!(c <= 1);
                }
                prop_assert!(s.elements().iter().all(|e| !avoid.contains(e)));
            }
        }
    }
}
