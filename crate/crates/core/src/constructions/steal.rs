//! Strategy stealing in G2: ONE answers TWO's strategy with itself.

use serde::Serialize;

use crate::arith::Exact;
use crate::error::{GameError, Result};
use crate::model::{GameKind, Move, Transcript};
use crate::nat::Nat;
use crate::strategies::{Role, Strategy};

/// Where strict interleaving `m_i < n_i < m_{i+1}` first broke.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterleaveFailure {
    pub inning: u64,
    /// `"m_i >= n_i"` when TWO's own reply fails to dominate, else `"n_i >= m_{i+1}"`.
    pub condition: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StealEvidence {
    pub two: String,
    pub transcript: Transcript,
    pub one_set: Vec<Nat>,
    pub two_set: Vec<Nat>,
    pub interleaving_ok: bool,
    pub failure: Option<InterleaveFailure>,
    pub intersection: Vec<Nat>,
}

fn sorted_set(v: &[Nat]) -> Vec<Nat> {
    let mut s = v.to_vec();
    s.sort();
    s.dedup();
    s
}

/// Self-play `n_i = F(m_1..m_i)`, `m_{i+1} = F(n_1..n_i)` with `m_1 = first_move`.
pub fn steal_two_g2(two: &Strategy, first_move: &Move, horizon: u64) -> Result<StealEvidence> {
    if horizon == 0 {
        return Err(GameError::Precondition("horizon must be at least 1".into()));
    }
    let mut on_ms = two.start_as(&Exact, Role::Two)?;
    let mut on_ns = two.start_as(&Exact, Role::Two)?;
    let mut ms = vec![first_move.value().clone()];
    let mut ns = Vec::with_capacity(horizon as usize);
    let mut failure = None;
    for i in 1..=horizon {
        let k = i as usize;
        two.push(&Exact, &mut on_ms, &ms[k - 1])
            .map_err(|e| e.at_inning(k))?;
        let n = two.value(&Exact, &on_ms).map_err(|e| e.at_inning(k))?;
        if failure.is_none() && ms[k - 1] >= n {
            failure = Some(InterleaveFailure {
                inning: i,
                condition: "m_i >= n_i",
            });
        }
        two.push(&Exact, &mut on_ns, &n)
            .map_err(|e| e.at_inning(k))?;
        ns.push(n);
        if i < horizon {
            let m = two.value(&Exact, &on_ns).map_err(|e| e.at_inning(k + 1))?;
            if failure.is_none() && ns[k - 1] >= m {
                failure = Some(InterleaveFailure {
                    inning: i,
                    condition: "n_i >= m_{i+1}",
                });
            }
            ms.push(m);
        }
    }
    let one_set = sorted_set(&ms);
    let two_set = sorted_set(&ns);
    let intersection = one_set
        .iter()
        .filter(|x| two_set.binary_search(x).is_ok())
        .cloned()
        .collect();
    Ok(StealEvidence {
        two: two.name().to_string(),
        transcript: Transcript::from_moves(GameKind::G2, horizon, &ms, &ns),
        one_set,
        two_set,
        interleaving_ok: failure.is_none(),
        failure,
        intersection,
    })
}
