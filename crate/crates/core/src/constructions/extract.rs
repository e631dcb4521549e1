//! Growth functions read off a strategy for ONE.
//!
//! [`extract_dominating_function`] turns a G1 strategy for ONE into a
//! function `g` that eventually dominates the enumeration of every set TWO
//! could win with. [`build_g_h`] computes the growth tables the G2
//! counterplay is laid out on.

use std::cmp::max;

use serde::Serialize;

use crate::error::{GameError, Result};
use crate::nat::Nat;
use crate::strategies::{bound_over, normalize_strategy, BoundForm, NormMode, Strategy};

/// `h` tables are only kept for `n, m` up to this bound.
pub const H_TABLE_MAX: u64 = 64;

/// `h(n)` values above this many bits are refused by [`build_g_h`].
pub const H_BITS_CAP: u64 = 1 << 16;

/// Sums of `bound_over` without a closed form are refused above this argument.
const G_SUM_CAP: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominatingFunctionTable {
    pub one: String,
    pub upto: u64,
    /// `f(n)` for `n = 1..=upto`.
    pub f: Vec<Nat>,
    /// `h[n-1][m-1] = h_n(m) = f^m(n)` for `n, m <= min(upto, H_TABLE_MAX)`.
    pub h: Vec<Vec<Nat>>,
    /// `g(k)` for `k = 1..=upto`.
    pub g: Vec<Nat>,
}

impl DominatingFunctionTable {
    /// `g(k)`, 1-based.
    pub fn g_at(&self, k: u64) -> Option<&Nat> {
        k.checked_sub(1).and_then(|i| self.g.get(i as usize))
    }
}

/// `f(n) = bound_over(F, n)`, `h_n(m) = f^m(n)` and
/// `g(k) = max{h_m(n), h_n(m) : m, n <= k} + 1` on `[1, upto]`.
///
/// `one` is G1-normalized first; this is a no-op for compliant strategies.
pub fn extract_dominating_function(one: &Strategy, upto: u64) -> Result<DominatingFunctionTable> {
    let one = normalize_strategy(one, NormMode::G1One);
    let f = |n: &Nat| bound_over(&one, n);
    let shown = upto.min(H_TABLE_MAX) as usize;
    let mut f_table = Vec::with_capacity(upto as usize);
    let mut h_table: Vec<Vec<Nat>> = vec![Vec::with_capacity(shown); shown];
    let mut g = Vec::with_capacity(upto as usize);
    // iter[n-1] = f^{k-1}(n) before step k
    let mut iter: Vec<Nat> = Vec::with_capacity(upto as usize);
    let mut best = Nat::ZERO;
    for k in 1..=upto {
        let kn = Nat::from(k);
        f_table.push(f(&kn)?);
        // column k: h_n(k) for n < k
        for (n, it) in iter.iter_mut().enumerate() {
            *it = f(it)?;
            best = max(best, it.clone());
            if n < shown && (k as usize) <= shown {
                h_table[n].push(it.clone());
            }
        }
        // row k: h_k(m) for m <= k
        let mut x = kn.clone();
        for _ in 0..k {
            x = f(&x)?;
            best = max(best, x.clone());
            if (k as usize) <= shown {
                h_table[k as usize - 1].push(x.clone());
            }
        }
        iter.push(x);
        g.push(best.add_u64(1));
    }
    Ok(DominatingFunctionTable {
        one: one.name().to_string(),
        upto,
        f: f_table,
        h: h_table,
        g,
    })
}

/// `g(1) = F(∅)`, `g(x+1) = bound_over(F, x+1) + g(x)` for a G2-normalized `F`.
#[derive(Clone, Debug)]
pub struct GFunction {
    one: Strategy,
    g1: Nat,
    form: Option<(u64, u64)>,
}

impl GFunction {
    pub fn new(one: &Strategy) -> Result<Self> {
        let one = normalize_strategy(one, NormMode::G2One);
        let g1 = one.next(&[])?;
        let form = match one.bound_form() {
            Some(BoundForm::LastPlus { c, empty }) => Some((c, empty)),
            _ => None,
        };
        Ok(GFunction { one, g1, form })
    }

    pub fn strategy(&self) -> &Strategy {
        &self.one
    }

    pub fn has_closed_form(&self) -> bool {
        self.form.is_some()
    }

    pub fn eval(&self, x: &Nat) -> Result<Nat> {
        if x.is_zero() {
            return Err(GameError::out_of_range("g", "argument starts at 1"));
        }
        match self.form {
            Some((c, e)) => Ok(self.g1.add(&last_plus_sum(c, e, x))),
            None => {
                let top = x.to_u64().filter(|&v| v <= G_SUM_CAP).ok_or_else(|| {
                    GameError::ResourceCap(format!("g({x}) without a closed form"))
                })?;
                let mut acc = self.g1.clone();
                for j in 2..=top {
                    acc = acc.add(&bound_over(&self.one, &Nat::from(j))?);
                }
                Ok(acc)
            }
        }
    }
}

/// `Σ_{j=2}^{x} max(e, j + c)`.
fn last_plus_sum(c: u64, e: u64, x: &Nat) -> Nat {
    let two = Nat::from(2u64);
    if *x < two {
        return Nat::ZERO;
    }
    // j + c < e exactly for j < e - c
    let flat_until = e.saturating_sub(c);
    let flat_hi = if flat_until > 2 {
        let hi = Nat::from(flat_until - 1);
        if *x < hi {
            x.clone()
        } else {
            hi
        }
    } else {
        Nat::ONE
    };
    let flat = flat_hi.saturating_sub_u64(1).mul_u64(e);
    let a = flat_hi.add_u64(1);
    if *x < a {
        return flat;
    }
    let count = x.checked_sub(&a).expect("x >= a").add_u64(1);
    let ramp = a.add(x).mul(&count).half().add(&count.mul_u64(c));
    flat.add(&ramp)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhTables {
    pub one: String,
    /// `g(x)` for `x = 1..=upto`.
    pub g: Vec<Nat>,
    /// `h(n)` for `n = 1..=upto`.
    pub h: Vec<Nat>,
}

/// `h(1) = F(∅) + 1`, `h(n+1) = g(h(n))`, while `h(n)` stays under [`H_BITS_CAP`] bits.
pub(crate) fn h_sequence(gf: &GFunction, upto: u64, bits_cap: u64) -> Result<Vec<Nat>> {
    let mut h = vec![gf.g1.add_u64(1)];
    while (h.len() as u64) < upto {
        let next = gf.eval(h.last().expect("nonempty"))?;
        if next.bits() > bits_cap {
            break;
        }
        h.push(next);
    }
    Ok(h)
}

/// The `g` and `h` tables for a G2 strategy of ONE, both to `upto`.
pub fn build_g_h(one: &Strategy, upto: u64) -> Result<GhTables> {
    if upto == 0 {
        return Err(GameError::Precondition("upto must be at least 1".into()));
    }
    let gf = GFunction::new(one)?;
    let g = (1..=upto)
        .map(|x| gf.eval(&Nat::from(x)))
        .collect::<Result<Vec<_>>>()?;
    let h = h_sequence(&gf, upto, H_BITS_CAP)?;
    if (h.len() as u64) < upto {
        return Err(GameError::ResourceCap(format!(
            "h({}) exceeds {H_BITS_CAP} bits",
            h.len() + 1
        )));
    }
    Ok(GhTables {
        one: gf.one.name().to_string(),
        g,
        h,
    })
}
