//! Playing games to a horizon and judging the result.
//!
//! "Infinitely many innings" and "eventually" cannot be observed on a finite
//! play, so they are truncated to thresholds on the observed horizon `N`:
//! TWO must beat ONE in at least `⌊N/2⌋` innings in G1, and dominate from an
//! inning `<= ⌈N/2⌉` on in G2. Both thresholds can be overridden.

use serde::{Deserialize, Serialize};

use crate::arith::Exact;
use crate::error::{GameError, Result};
use crate::filters::{prefix_status, FilterHandle, PrefixStatus};
use crate::model::{GameKind, Provenance, SetPrefix, Transcript};
use crate::nat::Nat;
use crate::strategies::{Role, Strategy};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct G1Verdict {
    pub increasing_ok: bool,
    pub beat_count: u64,
    pub status: PrefixStatus,
    pub two_winning_at_horizon: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct G2Verdict {
    pub domination_index: Option<u64>,
    pub status: PrefixStatus,
    pub two_winning_at_horizon: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Verdict {
    G1(G1Verdict),
    G2(G2Verdict),
}

impl Verdict {
    pub fn two_winning_at_horizon(&self) -> bool {
        match self {
            Verdict::G1(v) => v.two_winning_at_horizon,
            Verdict::G2(v) => v.two_winning_at_horizon,
        }
    }

    pub fn status(&self) -> &PrefixStatus {
        match self {
            Verdict::G1(v) => &v.status,
            Verdict::G2(v) => &v.status,
        }
    }
}

/// Truncation thresholds. `None` selects the default for the horizon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Thresholds {
    /// Minimum beat count in G1; default `⌊N/2⌋`.
    pub beat_min: Option<u64>,
    /// Maximum domination index in G2; default `⌈N/2⌉`.
    pub domination_max: Option<u64>,
}

impl Thresholds {
    pub fn beat_threshold(&self, n: u64) -> u64 {
        self.beat_min.unwrap_or(n / 2)
    }

    pub fn domination_threshold(&self, n: u64) -> u64 {
        self.domination_max.unwrap_or(n.div_ceil(2))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JudgeConfig {
    pub thresholds: Thresholds,
    /// Provenance attached to TWO's move set. Oracle filters only witness
    /// sets they issued themselves.
    pub two_provenance: Provenance,
}

/// Play `n` innings. ONE moves first each inning, seeing TWO's earlier
/// moves; TWO then answers seeing all of ONE's moves so far.
pub fn play(game: GameKind, one: &Strategy, two: &Strategy, n: u64) -> Result<Transcript> {
    if n == 0 {
        return Err(GameError::Precondition("horizon must be at least 1".into()));
    }
    let mut one_cur = one.start_as(&Exact, Role::One)?;
    let mut two_cur = two.start_as(&Exact, Role::Two)?;
    let mut ones = Vec::with_capacity(n as usize);
    let mut twos = Vec::with_capacity(n as usize);
    for k in 1..=n as usize {
        let m = one.value(&Exact, &one_cur).map_err(|e| e.at_inning(k))?;
        two.push(&Exact, &mut two_cur, &m)
            .map_err(|e| e.at_inning(k))?;
        let reply = two.value(&Exact, &two_cur).map_err(|e| e.at_inning(k))?;
        one.push(&Exact, &mut one_cur, &reply)
            .map_err(|e| e.at_inning(k))?;
        for (who, v) in [("ONE", &m), ("TWO", &reply)] {
            if v.is_zero() {
                return Err(GameError::Precondition(format!("{who} played 0")).at_inning(k));
            }
        }
        ones.push(m);
        twos.push(reply);
    }
    Ok(Transcript::from_moves(game, n, &ones, &twos))
}

/// Least `d` with `m_k < n_k` for every `k ∈ [d, N]` (1-based), found by a
/// backward scan. `None` when the last inning is not a win for TWO.
pub fn domination_index<T: Ord>(ms: &[T], ns: &[T]) -> Option<u64> {
    let len = ms.len().min(ns.len());
    let mut d = len + 1;
    while d > 1 && ms[d - 2] < ns[d - 2] {
        d -= 1;
    }
    (d <= len).then_some(d as u64)
}

fn two_set_status(
    t: &Transcript,
    f: &FilterHandle,
    provenance: Provenance,
) -> Result<PrefixStatus> {
    let set = SetPrefix::from_values(&t.two_moves()).with_provenance(provenance);
    let h = set.scanned_upto().clone();
    prefix_status(f, &set, &h)
}

pub fn judge_g1(t: &Transcript, f: &FilterHandle) -> Result<G1Verdict> {
    judge_g1_with(t, f, &JudgeConfig::default())
}

pub fn judge_g1_with(t: &Transcript, f: &FilterHandle, cfg: &JudgeConfig) -> Result<G1Verdict> {
    let increasing_ok = t.innings.windows(2).all(|w| w[0].n < w[1].n);
    let beat_count = t.innings.iter().filter(|i| i.m < i.n).count() as u64;
    let status = two_set_status(t, f, cfg.two_provenance)?;
    let two_winning_at_horizon = increasing_ok
        && status.is_witnessed()
        && beat_count >= cfg.thresholds.beat_threshold(t.len() as u64);
    Ok(G1Verdict {
        increasing_ok,
        beat_count,
        status,
        two_winning_at_horizon,
    })
}

pub fn judge_g2(t: &Transcript, f: &FilterHandle) -> Result<G2Verdict> {
    judge_g2_with(t, f, &JudgeConfig::default())
}

pub fn judge_g2_with(t: &Transcript, f: &FilterHandle, cfg: &JudgeConfig) -> Result<G2Verdict> {
    let ms: Vec<&Nat> = t.innings.iter().map(|i| &i.m).collect();
    let ns: Vec<&Nat> = t.innings.iter().map(|i| &i.n).collect();
    let domination_index = domination_index(&ms, &ns);
    let status = two_set_status(t, f, cfg.two_provenance)?;
    let limit = cfg.thresholds.domination_threshold(t.len() as u64);
    let two_winning_at_horizon =
        domination_index.is_some_and(|d| d <= limit) && status.is_witnessed();
    Ok(G2Verdict {
        domination_index,
        status,
        two_winning_at_horizon,
    })
}

/// Judge according to the transcript's own game.
pub fn judge(t: &Transcript, f: &FilterHandle, cfg: &JudgeConfig) -> Result<Verdict> {
    Ok(match t.game {
        GameKind::G1 => Verdict::G1(judge_g1_with(t, f, cfg)?),
        GameKind::G2 => Verdict::G2(judge_g2_with(t, f, cfg)?),
    })
}
