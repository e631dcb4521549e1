//! Refuting a would-be winning strategy for TWO in G1.
//!
//! Given TWO's strategy `F`, either some extension `σ⌢τ` makes `F` beat
//! every later move `y > n`, or the failure branch yields a play on which
//! `F` never beats ONE. Iterating the first alternative along two
//! interleaved chains produces two ONE-plays whose response sets overlap
//! only finitely, so `F` cannot keep both in a non-principal filter.

use std::cmp::max;

use serde::Serialize;

use crate::arith::Exact;
use crate::error::{GameError, Result};
use crate::filters::FilterHandle;
use crate::model::{GameKind, Transcript};
use crate::nat::Nat;
use crate::referee::{judge_g1, G1Verdict};
use crate::strategies::{Cursor, Role, Strategy};

/// Bounds for [`claim_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClaimConfig {
    /// Longest `τ` tried.
    pub max_tau_len: usize,
    /// Largest entry of `τ` tried.
    pub max_entry: u64,
    /// Largest threshold `n` tried, and the width of the verified window.
    pub budget: u64,
}

impl ClaimConfig {
    pub fn new(budget: u64) -> Self {
        ClaimConfig {
            max_tau_len: 2,
            max_entry: 32,
            budget,
        }
    }
}

/// `F(σ⌢τ⌢(y)) > y` for every `y ∈ (n, n + verified_window]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimWitness {
    pub sigma: Vec<Nat>,
    pub tau: Vec<Nat>,
    pub n: u64,
    pub verified_window: u64,
}

impl ClaimWitness {
    /// Re-check the inequality over the whole window.
    pub fn replay(&self, two: &Strategy) -> Result<bool> {
        let cur = two_cursor(two, self.sigma.iter().chain(&self.tau))?;
        for y in self.n + 1..=self.n + self.verified_window {
            let y = Nat::from(y);
            if response_after(two, &cur, &y)? <= y {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ClaimOutcome {
    Witness(ClaimWitness),
    /// `y_1 < y_2 < ...` above `max σ` with `F(σ⌢(y_1..y_k)) <= y_k` for each `k`.
    Refuted {
        sigma: Vec<Nat>,
        ys: Vec<Nat>,
    },
    Inconclusive {
        sigma: Vec<Nat>,
    },
}

fn two_cursor<'a>(two: &Strategy, moves: impl IntoIterator<Item = &'a Nat>) -> Result<Cursor<Nat>> {
    let mut cur = two.start_as(&Exact, Role::Two)?;
    for mv in moves {
        two.push(&Exact, &mut cur, mv)?;
    }
    Ok(cur)
}

fn response_after(two: &Strategy, cur: &Cursor<Nat>, y: &Nat) -> Result<Nat> {
    let mut c = cur.clone();
    two.push(&Exact, &mut c, y)?;
    two.value(&Exact, &c)
}

/// Advance `t` to the next tuple over `[1, max_entry]` in lexicographic order.
fn next_tuple(t: &mut [u64], max_entry: u64) -> bool {
    for i in (0..t.len()).rev() {
        if t[i] < max_entry {
            t[i] += 1;
            t[i + 1..].iter_mut().for_each(|x| *x = 1);
            return true;
        }
    }
    false
}

/// Least `n <= budget` with `F(..⌢y) > y` on `(n, n + budget]`.
fn least_threshold(two: &Strategy, cur: &Cursor<Nat>, budget: u64) -> Result<Option<u64>> {
    let mut n = 0u64;
    let mut y = 1u64;
    while y <= n + budget {
        let yn = Nat::from(y);
        if response_after(two, cur, &yn)? <= yn {
            n = y;
            if n > budget {
                return Ok(None);
            }
        }
        y += 1;
    }
    Ok(Some(n))
}

/// Greedily extend with the least `y` above the previous move such that
/// `F` does not beat `y`, looking at most `window` values ahead each time.
fn failure_branch(
    two: &Strategy,
    cur: &Cursor<Nat>,
    after: &Nat,
    count: u64,
    window: u64,
) -> Result<Vec<Nat>> {
    let mut cur = cur.clone();
    let mut prev = after.clone();
    let mut ys = Vec::new();
    'next: while (ys.len() as u64) < count {
        let mut y = prev.add_u64(1);
        for _ in 0..window {
            let mut c = cur.clone();
            two.push(&Exact, &mut c, &y)?;
            if two.value(&Exact, &c)? <= y {
                cur = c;
                prev = y.clone();
                ys.push(y);
                continue 'next;
            }
            y = y.add_u64(1);
        }
        break;
    }
    Ok(ys)
}

enum Found {
    Witness { tau: Vec<Nat>, n: u64 },
    Refuted(Vec<Nat>),
    Inconclusive,
}

fn search_at(
    two: &Strategy,
    cur: &Cursor<Nat>,
    sigma_max: &Nat,
    cfg: &ClaimConfig,
) -> Result<Found> {
    for len in 0..=cfg.max_tau_len {
        let mut tau = vec![1u64; len];
        loop {
            let mut c = cur.clone();
            for &t in &tau {
                two.push(&Exact, &mut c, &Nat::from(t))?;
            }
            if let Some(n) = least_threshold(two, &c, cfg.budget)? {
                let tau = tau.iter().map(|&t| Nat::from(t)).collect();
                return Ok(Found::Witness { tau, n });
            }
            if !next_tuple(&mut tau, cfg.max_entry) {
                break;
            }
        }
    }
    let ys = failure_branch(two, cur, sigma_max, cfg.budget, cfg.budget)?;
    if ys.len() as u64 == cfg.budget {
        Ok(Found::Refuted(ys))
    } else {
        Ok(Found::Inconclusive)
    }
}

/// Look for `τ, n` with `F(σ⌢τ⌢(y)) > y` for all `y ∈ (n, n + budget]`.
///
/// `τ` runs over tuples by length, then lexicographically; the first
/// witness wins. Without one, the failure branch is tried.
pub fn claim_search(two: &Strategy, sigma: &[Nat], cfg: &ClaimConfig) -> Result<ClaimOutcome> {
    if cfg.budget == 0 {
        return Err(GameError::Precondition(
            "claim budget must be at least 1".into(),
        ));
    }
    let cur = two_cursor(two, sigma)?;
    let sigma_max = sigma.iter().max().cloned().unwrap_or(Nat::ZERO);
    Ok(match search_at(two, &cur, &sigma_max, cfg)? {
        Found::Witness { tau, n } => ClaimOutcome::Witness(ClaimWitness {
            sigma: sigma.to_vec(),
            tau,
            n,
            verified_window: cfg.budget,
        }),
        Found::Refuted(ys) => ClaimOutcome::Refuted {
            sigma: sigma.to_vec(),
            ys,
        },
        Found::Inconclusive => ClaimOutcome::Inconclusive {
            sigma: sigma.to_vec(),
        },
    })
}

/// One step of the interleaved construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    /// Index `i` of `y_i` and `σ_i`.
    pub step: u64,
    pub y: Nat,
    /// `|σ_i|`.
    pub sigma_len: u64,
    /// Witness for `σ_i`.
    pub tau: Vec<Nat>,
    pub n: u64,
    /// `F(σ_i) > y_i`.
    pub beaten: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalChecks {
    pub ys_increasing: bool,
    /// Each `y_i` exceeds every response along the other chain.
    pub ys_above_other_chain: bool,
    pub shared_prefix_is_tau_empty: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalPair {
    pub two: String,
    pub horizon: u64,
    pub tau_empty: Vec<Nat>,
    pub n_empty: u64,
    pub f: Vec<Nat>,
    pub g: Vec<Nat>,
    /// `F(f↾k)` for `k = 1..=N`.
    pub f_responses: Vec<Nat>,
    pub g_responses: Vec<Nat>,
    pub ys: Vec<Nat>,
    pub ledger: Vec<LedgerEntry>,
    pub intersection: Vec<Nat>,
    pub intersection_size: u64,
    pub checks: DiagonalChecks,
}

impl DiagonalPair {
    /// `A_f` as a sorted set.
    pub fn a_f(&self) -> Vec<Nat> {
        sorted_set(&self.f_responses)
    }

    pub fn a_g(&self) -> Vec<Nat> {
        sorted_set(&self.g_responses)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectDefeat {
    pub two: String,
    pub horizon: u64,
    pub sigma: Vec<Nat>,
    pub ys: Vec<Nat>,
    pub transcript: Transcript,
    /// Judged against the Fréchet filter.
    pub verdict: G1Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum RefutationEvidence {
    DiagonalPair(DiagonalPair),
    DirectDefeat(DirectDefeat),
}

impl RefutationEvidence {
    /// The G1 plays carried by the evidence.
    pub fn plays(&self) -> Vec<Transcript> {
        match self {
            RefutationEvidence::DiagonalPair(d) => vec![
                Transcript::from_moves(GameKind::G1, d.f.len() as u64, &d.f, &d.f_responses),
                Transcript::from_moves(GameKind::G1, d.g.len() as u64, &d.g, &d.g_responses),
            ],
            RefutationEvidence::DirectDefeat(d) => vec![d.transcript.clone()],
        }
    }
}

fn sorted_set(v: &[Nat]) -> Vec<Nat> {
    let mut s = v.to_vec();
    s.sort();
    s.dedup();
    s
}

/// A ONE-play with TWO's responses, extended move by move.
#[derive(Clone)]
struct Chain {
    cur: Cursor<Nat>,
    moves: Vec<Nat>,
    responses: Vec<Nat>,
    max_response: Nat,
}

impl Chain {
    fn new(two: &Strategy) -> Result<Self> {
        Ok(Chain {
            cur: two.start_as(&Exact, Role::Two)?,
            moves: Vec::new(),
            responses: Vec::new(),
            max_response: Nat::ZERO,
        })
    }

    fn push(&mut self, two: &Strategy, mv: &Nat) -> Result<()> {
        two.push(&Exact, &mut self.cur, mv)?;
        let r = two.value(&Exact, &self.cur)?;
        if r > self.max_response {
            self.max_response = r.clone();
        }
        self.moves.push(mv.clone());
        self.responses.push(r);
        Ok(())
    }
}

fn direct_defeat(
    two: &Strategy,
    chain: &Chain,
    ys: Vec<Nat>,
    budget: u64,
    horizon: u64,
) -> Result<RefutationEvidence> {
    let sigma = chain.moves.clone();
    let mut play = chain.clone();
    for y in &ys {
        play.push(two, y)?;
    }
    let have = play.moves.len() as u64;
    if have < horizon {
        let after = play.moves.last().cloned().unwrap_or(Nat::ZERO);
        for y in failure_branch(two, &play.cur.clone(), &after, horizon - have, budget)? {
            play.push(two, &y)?;
        }
    }
    let len = play.moves.len().min(horizon as usize);
    let transcript = Transcript::from_moves(
        GameKind::G1,
        len as u64,
        &play.moves[..len],
        &play.responses[..len],
    );
    let verdict = judge_g1(&transcript, &FilterHandle::Frechet)?;
    Ok(RefutationEvidence::DirectDefeat(DirectDefeat {
        two: two.name().to_string(),
        horizon,
        sigma,
        ys,
        transcript,
        verdict,
    }))
}

fn stalled(sigma: &[Nat]) -> GameError {
    GameError::Inconclusive(format!(
        "claim search found neither witness nor refutation at |σ| = {}",
        sigma.len()
    ))
}

/// Run the diagonal construction against TWO's strategy to horizon `n`.
pub fn refute_two_g1(two: &Strategy, budget: u64, horizon: u64) -> Result<RefutationEvidence> {
    refute_two_g1_with(two, &ClaimConfig::new(budget), horizon)
}

pub fn refute_two_g1_with(
    two: &Strategy,
    cfg: &ClaimConfig,
    horizon: u64,
) -> Result<RefutationEvidence> {
    if cfg.budget == 0 || horizon == 0 {
        return Err(GameError::Precondition(
            "budget and horizon must be at least 1".into(),
        ));
    }
    let root = Chain::new(two)?;
    let (tau_empty, n_empty) = match search_at(two, &root.cur, &Nat::ZERO, cfg)? {
        Found::Witness { tau, n } => (tau, n),
        Found::Refuted(ys) => return direct_defeat(two, &root, ys, cfg.budget, horizon),
        Found::Inconclusive => return Err(stalled(&[])),
    };
    let mut base = root;
    for t in &tau_empty {
        base.push(two, t)?;
    }
    // pending[p]: the parity-p chain extended by its latest τ, with its threshold
    let mut pending = [(base.clone(), n_empty), (base, n_empty)];
    let mut ys: Vec<Nat> = Vec::new();
    let mut ledger = Vec::new();
    let mut above_other = true;
    let step_cap = 4 * horizon + 16;
    let mut i = 0u64;
    while pending
        .iter()
        .any(|(c, _)| (c.moves.len() as u64) < horizon)
    {
        if i >= step_cap {
            return Err(GameError::ResourceCap(format!(
                "diagonal construction exceeded {step_cap} steps"
            )));
        }
        let p = (i % 2) as usize;
        let other_max = pending[1 - p].0.max_response.clone();
        let floor = max(
            ys.last().cloned().unwrap_or(Nat::ZERO),
            max(Nat::from(pending[p].1), other_max.clone()),
        );
        let y = floor.add_u64(1);
        above_other &= y > other_max;
        let mut sigma = pending[p].0.clone();
        sigma.push(two, &y)?;
        let beaten = sigma.responses.last().expect("just pushed") > &y;
        let sigma_max = max(
            y.clone(),
            sigma.moves.iter().max().cloned().unwrap_or(Nat::ZERO),
        );
        match search_at(two, &sigma.cur, &sigma_max, cfg)? {
            Found::Witness { tau, n } => {
                ledger.push(LedgerEntry {
                    step: i,
                    y: y.clone(),
                    sigma_len: sigma.moves.len() as u64,
                    tau: tau.clone(),
                    n,
                    beaten,
                });
                for t in &tau {
                    sigma.push(two, t)?;
                }
                pending[p] = (sigma, n);
            }
            Found::Refuted(found) => return direct_defeat(two, &sigma, found, cfg.budget, horizon),
            Found::Inconclusive => return Err(stalled(&sigma.moves)),
        }
        ys.push(y);
        i += 1;
    }
    let [(even, _), (odd, _)] = pending;
    let cut = horizon as usize;
    let (f, f_responses) = (even.moves[..cut].to_vec(), even.responses[..cut].to_vec());
    let (g, g_responses) = (odd.moves[..cut].to_vec(), odd.responses[..cut].to_vec());
    let a_g = sorted_set(&g_responses);
    let intersection: Vec<Nat> = sorted_set(&f_responses)
        .into_iter()
        .filter(|x| a_g.binary_search(x).is_ok())
        .collect();
    let shared = f.iter().zip(&g).take_while(|(a, b)| a == b).count();
    let checks = DiagonalChecks {
        ys_increasing: ys.windows(2).all(|w| w[0] < w[1]),
        ys_above_other_chain: above_other,
        shared_prefix_is_tau_empty: shared == tau_empty.len().min(cut),
    };
    Ok(RefutationEvidence::DiagonalPair(DiagonalPair {
        two: two.name().to_string(),
        horizon,
        tau_empty,
        n_empty,
        f,
        g,
        f_responses,
        g_responses,
        ys,
        ledger,
        intersection_size: intersection.len() as u64,
        intersection,
        checks,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::stock_strategy;

    fn st(s: &str) -> Strategy {
        stock_strategy(s).unwrap()
    }

    fn nats(v: &[u64]) -> Vec<Nat> {
        v.iter().map(|&x| Nat::from(x)).collect()
    }

    #[test]
    fn claim_examples() {
        let cfg = ClaimConfig::new(50);
        for sigma in [vec![], nats(&[2])] {
            match claim_search(&st("offset:1"), &sigma, &cfg).unwrap() {
                ClaimOutcome::Witness(w) => {
                    assert!(w.tau.is_empty());
                    assert_eq!(w.n, 0);
                    assert!(w.replay(&st("offset:1")).unwrap());
                }
                other => panic!("{other:?}"),
            }
        }
        match claim_search(&st("copy"), &[], &cfg).unwrap() {
            ClaimOutcome::Refuted { ys, .. } => assert_eq!(ys, nats(&(1..=50).collect::<Vec<_>>())),
            other => panic!("{other:?}"),
        }
        assert!(claim_search(&st("copy"), &[], &ClaimConfig::new(0)).is_err());
    }

    #[test]
    fn claim_needs_a_threshold() {
        // TWO plays 10 until inning 3, then beats everything
        let two = Strategy::custom("late", |h| {
            Ok(if h.len() < 3 {
                Nat::from(10)
            } else {
                h.last().unwrap().add_u64(1)
            })
        });
        match claim_search(&two, &[], &ClaimConfig::new(20)).unwrap() {
            ClaimOutcome::Witness(w) => {
                assert_eq!(w.tau, nats(&[1, 1]));
                assert!(w.replay(&two).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tuples_in_lex_order() {
        let mut t = vec![1, 1];
        let mut seen = vec![t.clone()];
        while next_tuple(&mut t, 3) {
            seen.push(t.clone());
        }
        assert_eq!(seen.len(), 9);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn offset_one_diagonal() {
        let ev = refute_two_g1(&st("offset:1"), 100, 200).unwrap();
        let RefutationEvidence::DiagonalPair(d) = ev else {
            panic!()
        };
        assert!(d.tau_empty.is_empty());
        assert_eq!(d.intersection_size, 0);
        assert_eq!(d.f.len(), 200);
        assert_eq!(d.g.len(), 200);
        assert!(d.checks.ys_increasing && d.checks.ys_above_other_chain);
        assert!(d.ledger.iter().all(|e| e.beaten));
    }

    #[test]
    fn copy_is_defeated_directly() {
        let ev = refute_two_g1(&st("copy"), 100, 300).unwrap();
        let RefutationEvidence::DirectDefeat(d) = ev else {
            panic!()
        };
        assert_eq!(d.verdict.beat_count, 0);
        assert_eq!(d.transcript.len(), 300);
        assert!(!d.verdict.two_winning_at_horizon);
    }

    #[test]
    fn diagonal_ys_clear_the_other_chain() {
        // independent recomputation of the y rule from the recorded plays
        let ev = refute_two_g1(&st("maxinning"), 50, 100).unwrap();
        let RefutationEvidence::DiagonalPair(d) = ev else {
            panic!()
        };
        let two = st("maxinning");
        let resp = |seq: &[Nat]| two.next_as(Role::Two, seq).unwrap();
        for e in &d.ledger {
            let (mine, other) = if e.step % 2 == 0 {
                (&d.f, &d.g)
            } else {
                (&d.g, &d.f)
            };
            let at = e.sigma_len as usize - 1;
            if at < mine.len() {
                assert_eq!(mine[at], e.y);
            }
            // every response along the other chain produced before y_i was chosen
            let earlier: Vec<&LedgerEntry> = d
                .ledger
                .iter()
                .filter(|o| o.step < e.step && o.step % 2 != e.step % 2)
                .collect();
            let reach = earlier
                .last()
                .map(|o| o.sigma_len as usize + o.tau.len())
                .unwrap_or(d.tau_empty.len())
                .min(other.len());
            for j in 1..=reach {
                assert!(resp(&other[..j]) < e.y);
            }
        }
    }
}
