//! TWO's counterplay in G2 against any strategy for ONE, over a rare filter.
//!
//! The construction lays a partition `I` on the growth function `h` of
//! ONE's strategy and lets the rare-filter oracle pick sets `X, Z` meeting
//! each block at most once. TWO plays a sparse subsequence of `T = X ∩ Z`;
//! each move sits so far beyond the last one that ONE's answer cannot reach
//! it.
//!
//! `h` grows doubly exponentially, so moves are handled positionally: a
//! [`TowerNum`] is an offset into a block of `I`. Block lengths are exact
//! while `h` fits a bit budget and certified lower bounds beyond it.

use serde::Serialize;

use crate::arith::MoveArith;
use crate::error::{GameError, Result};
use crate::filters::{FilterHandle, SelectorRule};
use crate::model::{GameKind, Provenance, Transcript};
use crate::nat::Nat;
use crate::referee::{domination_index, judge_g2_with, G2Verdict, JudgeConfig, Verdict};
use crate::strategies::{Role, Strategy};

use super::extract::{h_sequence, GFunction, H_BITS_CAP};

/// How many entries of `g` and of each set the evidence lists.
const SHOWN: usize = 40;

/// `start(I_block) + offset`, with `offset < |I_block|`. The derived order
/// is numeric order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TowerNum {
    pub block: u64,
    pub offset: Nat,
}

impl TowerNum {
    pub fn block_start(block: u64) -> Self {
        TowerNum {
            block,
            offset: Nat::ZERO,
        }
    }
}

/// Positional arithmetic on `I_1 = [1, h(1))`, `I_{b+1} = [h(b), h(b+1))`.
#[derive(Clone, Debug)]
pub struct TowerScale {
    /// `h(1..=E)`, known exactly.
    h: Vec<Nat>,
    /// Lower bound on `|I_b|` for `b > E`.
    tail_len: Nat,
}

enum BlockLen<'a> {
    Exact(Nat),
    AtLeast(&'a Nat),
}

impl TowerScale {
    /// `h` must be strictly increasing with nondecreasing gaps from `h(1)` on,
    /// which holds for the `h` of any G2-normalized strategy.
    pub fn new(h: Vec<Nat>) -> Result<Self> {
        if h.len() < 2 {
            return Err(GameError::ResourceCap(
                "need at least two exact values of h".into(),
            ));
        }
        let gaps: Vec<Nat> = h
            .windows(2)
            .map(|w| w[1].checked_sub(&w[0]).filter(|d| !d.is_zero()))
            .collect::<Option<_>>()
            .ok_or_else(|| GameError::Precondition("h must be strictly increasing".into()))?;
        if gaps.windows(2).any(|w| w[0] > w[1]) {
            return Err(GameError::Precondition(
                "h must have nondecreasing gaps".into(),
            ));
        }
        let tail_len = gaps.last().expect("two values").clone();
        Ok(TowerScale { h, tail_len })
    }

    /// Number of blocks whose end is known exactly.
    pub fn exact_blocks(&self) -> u64 {
        self.h.len() as u64
    }

    /// `start(I_b)` for `b <= E + 1`.
    fn exact_start(&self, b: u64) -> Option<Nat> {
        match b {
            0 => None,
            1 => Some(Nat::ONE),
            _ => self.h.get(b as usize - 2).cloned(),
        }
    }

    fn block_len(&self, b: u64) -> BlockLen<'_> {
        match (self.exact_start(b), self.h.get(b as usize - 1)) {
            (Some(s), Some(e)) => BlockLen::Exact(e.checked_sub(&s).expect("increasing")),
            _ => BlockLen::AtLeast(&self.tail_len),
        }
    }

    fn beyond(&self, what: &str) -> GameError {
        GameError::UnsupportedArith(format!("{what} lies beyond the certified block bounds"))
    }
}

impl MoveArith for TowerScale {
    type Num = TowerNum;

    fn lift(&self, v: &Nat) -> Result<TowerNum> {
        if v.is_zero() {
            return Err(GameError::out_of_range("tower", "values start at 1"));
        }
        // blocks 1..=E+1 have exact starts 1, h(1), .., h(E)
        let later = self.h.partition_point(|x| x <= v);
        let block = later as u64 + 1;
        let start = self.exact_start(block).expect("exact start");
        let offset = v.checked_sub(&start).expect("v >= start");
        if block as usize > self.h.len() && offset >= self.tail_len {
            return Err(self.beyond(&format!("value {v}")));
        }
        Ok(TowerNum { block, offset })
    }

    fn add(&self, x: &TowerNum, c: u64) -> Result<TowerNum> {
        let mut block = x.block;
        let mut offset = x.offset.add_u64(c);
        loop {
            match self.block_len(block) {
                BlockLen::Exact(len) => match offset.checked_sub(&len) {
                    Some(rest) => {
                        offset = rest;
                        block += 1;
                    }
                    None => return Ok(TowerNum { block, offset }),
                },
                BlockLen::AtLeast(len) => {
                    return if offset < *len {
                        Ok(TowerNum { block, offset })
                    } else {
                        Err(self.beyond(&format!("offset {offset} in block {block}")))
                    };
                }
            }
        }
    }

    fn exact(&self, x: &TowerNum) -> Option<Nat> {
        self.exact_start(x.block).map(|s| s.add(&x.offset))
    }
}

/// `X`: one point per block `[starts[b-1], starts[b])`, avoiding block starts.
fn select_avoiding_starts<A: MoveArith>(
    arith: &A,
    rule: SelectorRule,
    starts: &[A::Num],
) -> Result<Vec<A::Num>> {
    starts
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            rule.pick(arith, &w[0], &w[1], |x| *x == w[0])?
                .ok_or_else(|| GameError::NoSelector(format!("block {} has only its start", i + 1)))
        })
        .collect()
}

/// `S`: the selector of `K_1 = [1, x_1)`, `K_{j+1} = [x_{j²}, x_{(j+1)²})`.
fn square_block_selector<A: MoveArith>(
    arith: &A,
    rule: SelectorRule,
    xs: &[A::Num],
) -> Result<Vec<A::Num>> {
    let mut bounds = vec![arith.lift(&Nat::ONE)?];
    let mut j = 1usize;
    while j * j <= xs.len() {
        bounds.push(xs[j * j - 1].clone());
        j += 1;
    }
    let mut out = Vec::new();
    for w in bounds.windows(2) {
        if let Some(s) = rule.pick(arith, &w[0], &w[1], |_| false)? {
            out.push(s);
        }
    }
    Ok(out)
}

/// `Z`: in each `J_1 = [1, y_1)`, `J_{s+1} = [y_s, y_{s+1})`, the oracle's
/// pick among members of `X` that are not endpoints. Returns `(z, s)`.
fn endpoint_avoiding_selector<A: MoveArith>(
    arith: &A,
    rule: SelectorRule,
    xs: &[A::Num],
    ys: &[A::Num],
) -> Result<Vec<(A::Num, usize)>> {
    let mut bounds = vec![arith.lift(&Nat::ONE)?];
    bounds.extend(ys.iter().cloned());
    let is_endpoint = |x: &A::Num| ys.binary_search(x).is_ok();
    let mut out = Vec::new();
    for (i, w) in bounds.windows(2).enumerate() {
        let (lo, hi) = (&w[0], &w[1]);
        if is_endpoint(lo) && arith.add(lo, 1)? == *hi {
            return Err(GameError::NoSelector(format!(
                "J_{} consists of an endpoint",
                i + 1
            )));
        }
        let a = xs.partition_point(|x| x < lo);
        let b = xs.partition_point(|x| x < hi);
        if let Some(z) = rule.pick_from(&xs[a..b], is_endpoint) {
            out.push((z.clone(), i + 1));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HEntry {
    pub n: u64,
    pub bits: u64,
    /// Omitted above 256 bits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Nat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetSummary {
    pub name: &'static str,
    pub provenance: Provenance,
    pub size: u64,
    pub first: Vec<TowerNum>,
}

/// Order facts for one inning. `max B = end(B) - 1` for an interval block, so
/// the comparisons of maxima are checked on block ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InningChecks {
    /// `min I_{n_i} <= x_{m_i} < min I_{n_i+1}`
    pub move_in_block: bool,
    /// `min I_{n_i+1} < y_{s_i}`
    pub block_end_below_y: bool,
    /// `y_{s_i} < min I_{n_{i+1}}`
    pub y_below_next_block: bool,
    /// `max I_{n_i} < max J_{s_i}`
    pub max_i_below_max_j: bool,
    /// `max J_{s_i} < min I_{n_{i+1}}`
    pub max_j_below_next_min: bool,
    /// `F(x_{m_1}, .., x_{m_i}) < min I_{n_i+2}`
    pub response_below_block_after_next: bool,
    /// `n_{i+1} >= n_i + 2`
    pub blocks_spaced: bool,
    /// `m_i < x_{m_i}` (ONE's move this inning, below TWO's)
    pub dominated: bool,
}

impl InningChecks {
    /// The inequality chain, domination excluded.
    pub fn chain_ok(&self) -> bool {
        self.move_in_block
            && self.block_end_below_y
            && self.y_below_next_block
            && self.max_i_below_max_j
            && self.max_j_below_next_min
            && self.response_below_block_after_next
            && self.blocks_spaced
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterplayInning {
    pub i: u64,
    /// `I`-block of TWO's move.
    pub n_i: u64,
    /// Index of TWO's move in `X`.
    pub m_i: u64,
    /// `J`-block of TWO's move.
    pub s_i: u64,
    pub one_move: TowerNum,
    pub two_move: TowerNum,
    pub y: TowerNum,
    pub checks: InningChecks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterplayEvidence {
    pub one: String,
    /// Number of `I`-blocks laid out.
    pub horizon: u64,
    /// `g(1..)`, first entries.
    pub g_table: Vec<Nat>,
    pub h_table: Vec<HEntry>,
    pub exact_blocks: u64,
    pub sets: Vec<SetSummary>,
    pub innings: Vec<CounterplayInning>,
    /// ONE's reply to TWO's last move.
    pub final_response: TowerNum,
    pub domination_index: Option<u64>,
    pub chain_ok: bool,
    /// The play with every value replaced by its rank among all values in
    /// it. Order, and so every verdict field, is preserved.
    pub ranked_transcript: Transcript,
    pub verdict: G2Verdict,
}

fn summary(name: &'static str, provenance: Provenance, v: &[TowerNum]) -> SetSummary {
    SetSummary {
        name,
        provenance,
        size: v.len() as u64,
        first: v.iter().take(SHOWN).cloned().collect(),
    }
}

/// Build TWO's counterplay against `one` on `horizon` blocks of `I`.
pub fn defeat_one_g2(
    one: &Strategy,
    oracle: &FilterHandle,
    horizon: u64,
) -> Result<CounterplayEvidence> {
    let FilterHandle::RareOracle(rule) = oracle else {
        return Err(GameError::UnsupportedKind(format!(
            "{oracle} is not a rare-filter oracle"
        )));
    };
    let rule = *rule;
    if horizon < 2 {
        return Err(GameError::Precondition(
            "horizon must be at least 2 blocks".into(),
        ));
    }
    let gf = GFunction::new(one)?;
    let f = gf.strategy().clone();
    let h = h_sequence(&gf, horizon + 2, H_BITS_CAP)?;
    let scale = TowerScale::new(h.clone())?;

    let starts: Vec<TowerNum> = (1..=horizon + 1).map(TowerNum::block_start).collect();
    let xs = select_avoiding_starts(&scale, rule, &starts)?;
    let ss = square_block_selector(&scale, rule, &xs)?;
    let ys: Vec<TowerNum> = xs
        .iter()
        .filter(|x| ss.binary_search(x).is_err())
        .cloned()
        .collect();
    let zs = endpoint_avoiding_selector(&scale, rule, &xs, &ys)?;
    let ts: Vec<(TowerNum, usize)> = zs
        .iter()
        .filter(|(z, _)| xs.binary_search(z).is_ok())
        .cloned()
        .collect();

    // greedy: the next move's block must start above the last y
    let mut picks: Vec<(TowerNum, usize)> = Vec::new();
    for (t, s) in &ts {
        if *s > ys.len() {
            break;
        }
        let clear = match picks.last() {
            None => true,
            Some((_, ps)) => TowerNum::block_start(t.block) > ys[ps - 1],
        };
        if clear {
            picks.push((t.clone(), *s));
        }
    }
    // the last pick only closes the chain of the one before it
    if picks.len() < 4 {
        return Err(GameError::Precondition(format!(
            "insufficient horizon: {} blocks give {} innings",
            horizon,
            picks.len().saturating_sub(1)
        )));
    }

    let mut cur = f.start_as(&scale, Role::One)?;
    let mut ones: Vec<TowerNum> = Vec::new();
    for (t, _) in &picks {
        ones.push(f.value(&scale, &cur)?);
        f.push(&scale, &mut cur, t)?;
    }
    let final_response = f.value(&scale, &cur)?;
    let played = picks.len() - 1;

    let mut innings = Vec::with_capacity(played);
    for i in 0..played {
        let (t, s) = &picks[i];
        let (next, _) = &picks[i + 1];
        let n_i = t.block;
        let y = ys[s - 1].clone();
        let block_end = TowerNum::block_start(n_i + 1);
        let next_min = TowerNum::block_start(next.block);
        let response = &ones[i + 1];
        let checks = InningChecks {
            move_in_block: TowerNum::block_start(n_i) <= *t && *t < block_end,
            block_end_below_y: block_end < y,
            y_below_next_block: y < next_min,
            max_i_below_max_j: block_end < y,
            max_j_below_next_min: y <= next_min,
            response_below_block_after_next: *response < TowerNum::block_start(n_i + 2),
            blocks_spaced: next.block >= n_i + 2,
            dominated: ones[i] < *t,
        };
        innings.push(CounterplayInning {
            i: i as u64 + 1,
            n_i,
            m_i: xs.binary_search(t).expect("t in X") as u64 + 1,
            s_i: *s as u64,
            one_move: ones[i].clone(),
            two_move: t.clone(),
            y,
            checks,
        });
    }
    let twos: Vec<TowerNum> = picks[..played].iter().map(|(t, _)| t.clone()).collect();
    let ones = &ones[..played];
    let dom = domination_index(ones, &twos);

    let mut all: Vec<&TowerNum> = ones.iter().chain(&twos).collect();
    all.sort();
    all.dedup();
    let rank = |x: &TowerNum| Nat::from(all.binary_search(&x).expect("present") as u64 + 1);
    let mut ranked = Transcript::from_moves(
        GameKind::G2,
        played as u64,
        &ones.iter().map(rank).collect::<Vec<_>>(),
        &twos.iter().map(rank).collect::<Vec<_>>(),
    );
    let cfg = JudgeConfig {
        two_provenance: Provenance::OracleIssued,
        ..JudgeConfig::default()
    };
    let verdict = judge_g2_with(&ranked, oracle, &cfg)?;
    ranked.verdict = Some(Verdict::G2(verdict.clone()));

    let g_table = (1..=SHOWN as u64)
        .map(|x| gf.eval(&Nat::from(x)))
        .collect::<Result<Vec<_>>>()?;
    let h_table = h
        .iter()
        .enumerate()
        .map(|(i, v)| HEntry {
            n: i as u64 + 1,
            bits: v.bits(),
            value: (v.bits() <= 256).then(|| v.clone()),
        })
        .collect();
    let zs_only: Vec<TowerNum> = zs.into_iter().map(|(z, _)| z).collect();
    let ts_only: Vec<TowerNum> = ts.into_iter().map(|(t, _)| t).collect();
    let chain_ok = innings.iter().all(|i| i.checks.chain_ok());
    Ok(CounterplayEvidence {
        one: f.name().to_string(),
        horizon,
        g_table,
        h_table,
        exact_blocks: scale.exact_blocks(),
        sets: vec![
            summary("X", Provenance::OracleIssued, &xs),
            summary("S", Provenance::OracleIssued, &ss),
            summary("Y", Provenance::Plain, &ys),
            summary("Z", Provenance::OracleIssued, &zs_only),
            summary("T", Provenance::OracleIssued, &ts_only),
        ],
        innings,
        final_response,
        domination_index: dom,
        chain_ok,
        ranked_transcript: ranked,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Exact;
    use crate::strategies::stock_strategy;
    use proptest::prelude::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    fn oracle() -> FilterHandle {
        FilterHandle::RareOracle(SelectorRule::Leftmost)
    }

    fn small_scale() -> TowerScale {
        // maxplus:2: h = 3, 11, 87
        TowerScale::new(vec![n(3), n(11), n(87)]).unwrap()
    }

    #[test]
    fn tower_positions() {
        let s = small_scale();
        assert_eq!(
            s.lift(&n(1)).unwrap(),
            TowerNum {
                block: 1,
                offset: n(0)
            }
        );
        assert_eq!(
            s.lift(&n(3)).unwrap(),
            TowerNum {
                block: 2,
                offset: n(0)
            }
        );
        assert_eq!(
            s.lift(&n(90)).unwrap(),
            TowerNum {
                block: 4,
                offset: n(3)
            }
        );
        let x = s.add(&s.lift(&n(10)).unwrap(), 5).unwrap();
        assert_eq!(s.exact(&x), Some(n(15)));
        let far = TowerNum {
            block: 9,
            offset: n(5),
        };
        assert_eq!(
            s.add(&far, 1).unwrap(),
            TowerNum {
                block: 9,
                offset: n(6)
            }
        );
        assert_eq!(s.exact(&far), None);
        assert!(s.add(&far, 100).is_err());
        assert!(TowerScale::new(vec![n(3), n(11), n(12)]).is_err());
    }

    proptest! {
        #[test]
        fn tower_matches_exact(v in 1u64..120, c in 0u64..40) {
            let s = small_scale();
            let x = s.lift(&n(v)).unwrap();
            prop_assert_eq!(s.exact(&x), Some(n(v)));
            let y = s.add(&x, c).unwrap();
            prop_assert_eq!(s.exact(&y), Some(n(v + c)));
            for w in 1u64..160 {
                let z = s.lift(&n(w)).unwrap();
                prop_assert_eq!(z.cmp(&x), w.cmp(&v));
            }
        }
    }

    #[test]
    fn selectors_on_exact_numbers() {
        let starts = vec![n(1), n(3), n(6), n(10), n(15)];
        let xs = select_avoiding_starts(&Exact, SelectorRule::Leftmost, &starts).unwrap();
        assert_eq!(xs, vec![n(2), n(4), n(7), n(11)]);
        let ss = square_block_selector(&Exact, SelectorRule::Leftmost, &xs).unwrap();
        assert_eq!(ss, vec![n(1), n(2)]);
        let ys = vec![n(4), n(7)];
        let zs = endpoint_avoiding_selector(&Exact, SelectorRule::Leftmost, &xs, &ys).unwrap();
        assert_eq!(zs, vec![(n(2), 1)]);
        let err = select_avoiding_starts(&Exact, SelectorRule::Leftmost, &[n(1), n(2)]);
        assert!(matches!(err, Err(GameError::NoSelector(_))));
    }

    #[test]
    fn degenerate_j_block_has_no_selector() {
        let xs = vec![n(2), n(4), n(5)];
        let ys = vec![n(4), n(5)];
        let err = endpoint_avoiding_selector(&Exact, SelectorRule::Leftmost, &xs, &ys);
        assert!(matches!(err, Err(GameError::NoSelector(_))));
    }

    #[test]
    fn counterplay_against_maxplus() {
        for spec in ["maxplus:1", "maxplus:2", "maxplus:5"] {
            let ev = defeat_one_g2(&stock_strategy(spec).unwrap(), &oracle(), 1000).unwrap();
            assert!(ev.innings.len() >= 10, "{spec}: {}", ev.innings.len());
            assert!(ev.chain_ok, "{spec}");
            let d = ev.domination_index.unwrap();
            assert!(d <= 2, "{spec}: {d}");
            assert_eq!(ev.verdict.domination_index, Some(d));
            assert!(ev.verdict.two_winning_at_horizon);
        }
    }

    #[test]
    fn innings_follow_square_blocks() {
        let ev = defeat_one_g2(&stock_strategy("maxplus:2").unwrap(), &oracle(), 100).unwrap();
        let blocks: Vec<u64> = ev.innings.iter().map(|i| i.n_i).collect();
        assert_eq!(blocks, vec![1, 4, 9, 16, 25, 36, 49, 64]);
    }

    #[test]
    fn counterplay_contract_errors() {
        let slow = stock_strategy("maxplus:2").unwrap().without_fast_path();
        assert!(matches!(
            defeat_one_g2(&slow, &oracle(), 100),
            Err(GameError::ResourceCap(_))
        ));
        let one = stock_strategy("maxplus:2").unwrap();
        assert!(matches!(
            defeat_one_g2(&one, &FilterHandle::Frechet, 100),
            Err(GameError::UnsupportedKind(_))
        ));
        assert!(matches!(
            defeat_one_g2(&one, &oracle(), 9),
            Err(GameError::Precondition(_))
        ));
    }
}
