//! Strategies for either player.
//!
//! A strategy maps the opponent's moves so far to its next move; its own
//! earlier moves can always be recomputed from those, so they are not
//! passed in. Evaluation is incremental: a [`Cursor`] summarises a history
//! and is extended one move at a time, which keeps long plays linear.

use std::cmp::max;
use std::fmt;
use std::sync::Arc;

use crate::arith::{Exact, MoveArith};
use crate::error::{GameError, Result};
use crate::model::{block_of, IntervalPartition};
use crate::nat::Nat;

/// Exhaustive `bound_over` enumerates `2^n` tuples; this is the default cap on `n`.
pub const EXHAUSTIVE_CAP: u64 = 20;

/// Linear-time fast paths refuse arguments above this.
const LINEAR_FAST_PATH_CAP: u64 = 10_000_000;

type IntFnBody = dyn Fn(u64) -> Nat + Send + Sync;

/// An integer function `k ↦ g(k)` on inning indices.
#[derive(Clone)]
pub enum IntFn {
    /// `a·k + b`
    Linear {
        a: u64,
        b: u64,
    },
    Custom {
        name: String,
        f: Arc<IntFnBody>,
    },
}

impl IntFn {
    pub fn linear(a: u64, b: u64) -> Self {
        IntFn::Linear { a, b }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(u64) -> Nat + Send + Sync + 'static) -> Self {
        IntFn::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, k: u64) -> Nat {
        match self {
            IntFn::Linear { a, b } => Nat::from(*a).mul_u64(k).add_u64(*b),
            IntFn::Custom { f, .. } => f(k),
        }
    }
}

impl fmt::Display for IntFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntFn::Linear { a: 0, b } => write!(f, "{b}"),
            IntFn::Linear { a, b } => {
                if *a != 1 {
                    write!(f, "{a}")?;
                }
                f.write_str("k")?;
                if *b != 0 {
                    write!(f, "+{b}")?;
                }
                Ok(())
            }
            IntFn::Custom { name, .. } => f.write_str(name),
        }
    }
}

impl fmt::Debug for IntFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntFn({self})")
    }
}

impl std::str::FromStr for IntFn {
    type Err = GameError;

    /// `<a>k+<b>`, `<a>*k+<b>`, `k`, or a constant.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || GameError::Parse(format!("bad integer function {s:?}"));
        let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
        match s.split_once('k') {
            None => Ok(IntFn::linear(0, num(&s)?)),
            Some((coef, rest)) => {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let a = if coef.is_empty() { 1 } else { num(coef)? };
                let b = if rest.is_empty() {
                    0
                } else {
                    num(rest.strip_prefix('+').ok_or_else(bad)?)?
                };
                Ok(IntFn::linear(a, b))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    /// `F'(h) = max(F(h), max(h)+1)`.
    G1One,
    /// `F'(h) = max(F(h), max(h)+2, F'(h minus its last entry)+1)`.
    G2One,
}

impl NormMode {
    fn floor_gap(self) -> u64 {
        match self {
            NormMode::G1One => 1,
            NormMode::G2One => 2,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            NormMode::G1One => "norm-g1",
            NormMode::G2One => "norm-g2",
        }
    }
}

type CustomBody = dyn Fn(&[Nat]) -> Result<Nat> + Send + Sync;

#[derive(Clone)]
pub enum StrategyKind {
    /// `last + c`; `c` on the empty history.
    Offset(u64),
    /// `last`; 1 on the empty history.
    Copy,
    /// `max(history) + c`; `c` on the empty history.
    MaxPlus(u64),
    /// `max(history) + |history|`; 1 on the empty history.
    MaxInning,
    /// `g(k)` at inning `k`, ignoring the moves themselves.
    GPlay(IntFn),
    /// The `k`-th element of `[c, ∞)` at inning `k`.
    CofiniteFill(u64),
    /// Least value above the opponent's last move among the two smallest
    /// elements of its block.
    Blockwise(IntervalPartition),
    /// 1-tactic escaping a partition: `k ↦ max(∪_{j<=n+k} I_j) + n + k + 1`
    /// where `k ∈ I_n`.
    Tactic(IntervalPartition),
    Normalized {
        mode: NormMode,
        inner: Box<Strategy>,
    },
    Custom(Arc<CustomBody>),
}

impl fmt::Debug for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Offset(c) => write!(f, "Offset({c})"),
            StrategyKind::Copy => f.write_str("Copy"),
            StrategyKind::MaxPlus(c) => write!(f, "MaxPlus({c})"),
            StrategyKind::MaxInning => f.write_str("MaxInning"),
            StrategyKind::GPlay(g) => write!(f, "GPlay({g})"),
            StrategyKind::CofiniteFill(c) => write!(f, "CofiniteFill({c})"),
            StrategyKind::Blockwise(p) => write!(f, "Blockwise({p})"),
            StrategyKind::Tactic(p) => write!(f, "Tactic({p})"),
            StrategyKind::Normalized { mode, inner } => {
                write!(f, "Normalized({mode:?}, {inner:?})")
            }
            StrategyKind::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// Closed forms for [`bound_over`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundForm {
    /// On every strictly increasing nonempty tuple the value is `last + c`;
    /// on the empty tuple it is `empty`. Then `bound_over(n) = max(empty, n + c)`.
    LastPlus { c: u64, empty: u64 },
    /// The value depends only on the history length.
    ByLength,
    /// The value depends only on the most recent move.
    LastOnly,
}

#[derive(Clone, Debug)]
pub struct Strategy {
    name: String,
    kind: StrategyKind,
    fast_path: bool,
}

/// Which player a strategy moves for. ONE sees `k - 1` opponent moves at
/// inning `k`, TWO sees `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Role {
    #[default]
    One,
    Two,
}

/// Summary of a history, sufficient to evaluate a strategy on it.
#[derive(Clone, Debug)]
pub struct Cursor<N> {
    role: Role,
    len: u64,
    max: Option<N>,
    last: Option<N>,
    history: Option<Vec<N>>,
    inner: Option<Box<Cursor<N>>>,
    /// Cached value of a normalized strategy at this history.
    value: Option<N>,
}

impl<N> Cursor<N> {
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn last(&self) -> Option<&N> {
        self.last.as_ref()
    }

    /// Index of the inning whose move this cursor is about to produce.
    pub fn inning(&self) -> u64 {
        match self.role {
            Role::One => self.len + 1,
            Role::Two => self.len.max(1),
        }
    }
}

fn require_positive(v: Nat, who: &str) -> Result<Nat> {
    if v.is_zero() {
        return Err(GameError::Precondition(format!("{who} produced move 0")));
    }
    Ok(v)
}

impl Strategy {
    pub fn new(name: impl Into<String>, kind: StrategyKind) -> Self {
        Strategy {
            name: name.into(),
            kind,
            fast_path: true,
        }
    }

    /// A strategy given by an arbitrary function of the opponent's history.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(&[Nat]) -> Result<Nat> + Send + Sync + 'static,
    ) -> Self {
        Strategy::new(name, StrategyKind::Custom(Arc::new(f)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &StrategyKind {
        &self.kind
    }

    /// Normalization wrappers applied, outermost first.
    pub fn normalizations(&self) -> Vec<NormMode> {
        let mut out = Vec::new();
        let mut s = self;
        while let StrategyKind::Normalized { mode, inner } = &s.kind {
            out.push(*mode);
            s = inner;
        }
        out
    }

    /// The same strategy with the closed-form `bound_over` disabled.
    pub fn without_fast_path(mut self) -> Self {
        self.fast_path = false;
        if let StrategyKind::Normalized { inner, .. } = &mut self.kind {
            let taken = std::mem::replace(inner.as_mut(), Strategy::new("", StrategyKind::Copy));
            **inner = taken.without_fast_path();
        }
        self
    }

    pub fn has_fast_path(&self) -> bool {
        self.bound_form().is_some()
    }

    /// Closed form for `bound_over`, when one is known and enabled.
    pub fn bound_form(&self) -> Option<BoundForm> {
        if !self.fast_path {
            return None;
        }
        match &self.kind {
            StrategyKind::Offset(c) | StrategyKind::MaxPlus(c) => Some(BoundForm::LastPlus {
                c: *c,
                empty: max(*c, 1),
            }),
            StrategyKind::Copy => Some(BoundForm::LastPlus { c: 0, empty: 1 }),
            StrategyKind::GPlay(_) | StrategyKind::CofiniteFill(_) => Some(BoundForm::ByLength),
            StrategyKind::Blockwise(_) | StrategyKind::Tactic(_) => Some(BoundForm::LastOnly),
            StrategyKind::MaxInning | StrategyKind::Custom(_) => None,
            StrategyKind::Normalized { mode, inner } => match inner.bound_form()? {
                BoundForm::LastPlus { c, empty } => {
                    let gap = mode.floor_gap();
                    let (c, empty) = (max(c, gap), max(empty, gap));
                    match mode {
                        NormMode::G1One => Some(BoundForm::LastPlus { c, empty }),
                        // the prefix term stays dormant only when empty <= c
                        NormMode::G2One if empty <= c => Some(BoundForm::LastPlus { c, empty }),
                        NormMode::G2One => None,
                    }
                }
                _ => None,
            },
        }
    }

    fn keeps_history(&self) -> bool {
        matches!(self.kind, StrategyKind::Custom(_))
    }

    /// Cursor for the empty history, moving for ONE.
    pub fn start<A: MoveArith>(&self, arith: &A) -> Result<Cursor<A::Num>> {
        self.start_as(arith, Role::One)
    }

    pub fn start_as<A: MoveArith>(&self, arith: &A, role: Role) -> Result<Cursor<A::Num>> {
        let mut cur = Cursor {
            role,
            len: 0,
            max: None,
            last: None,
            history: self.keeps_history().then(Vec::new),
            inner: None,
            value: None,
        };
        if let StrategyKind::Normalized { mode, inner } = &self.kind {
            let inner_cur = inner.start_as(arith, role)?;
            let v = inner.value(arith, &inner_cur)?;
            let floor = arith.lift(&Nat::from(mode.floor_gap()))?;
            cur.value = Some(max(v, floor));
            cur.inner = Some(Box::new(inner_cur));
        }
        Ok(cur)
    }

    /// Extend the history summarised by `cur` with `mv`.
    pub fn push<A: MoveArith>(
        &self,
        arith: &A,
        cur: &mut Cursor<A::Num>,
        mv: &A::Num,
    ) -> Result<()> {
        cur.len += 1;
        cur.max = Some(match cur.max.take() {
            Some(m) if m >= *mv => m,
            _ => mv.clone(),
        });
        cur.last = Some(mv.clone());
        if let Some(h) = cur.history.as_mut() {
            h.push(mv.clone());
        }
        if let StrategyKind::Normalized { mode, inner } = &self.kind {
            let inner_cur = cur
                .inner
                .as_mut()
                .expect("normalized cursor has inner state");
            inner.push(arith, inner_cur, mv)?;
            let mut v = inner.value(arith, inner_cur)?;
            let hist_max = cur.max.as_ref().expect("just pushed");
            v = max(v, arith.add(hist_max, mode.floor_gap())?);
            if *mode == NormMode::G2One {
                let prev = cur.value.as_ref().expect("normalized cursor has a value");
                v = max(v, arith.add(prev, 1)?);
            }
            cur.value = Some(v);
        }
        Ok(())
    }

    /// The strategy's move on the history summarised by `cur`.
    pub fn value<A: MoveArith>(&self, arith: &A, cur: &Cursor<A::Num>) -> Result<A::Num> {
        let lift_u64 = |v: u64| arith.lift(&Nat::from(v));
        match &self.kind {
            StrategyKind::Offset(c) => match &cur.last {
                Some(l) => arith.add(l, *c),
                None => lift_u64(max(*c, 1)),
            },
            StrategyKind::Copy => match &cur.last {
                Some(l) => Ok(l.clone()),
                None => lift_u64(1),
            },
            StrategyKind::MaxPlus(c) => match &cur.max {
                Some(m) => arith.add(m, *c),
                None => lift_u64(max(*c, 1)),
            },
            StrategyKind::MaxInning => match &cur.max {
                Some(m) => arith.add(m, cur.len),
                None => lift_u64(1),
            },
            StrategyKind::GPlay(g) => {
                arith.lift(&require_positive(g.eval(cur.inning()), &self.name)?)
            }
            StrategyKind::CofiniteFill(c) => lift_u64(max(*c, 1) + cur.inning() - 1),
            StrategyKind::Blockwise(p) => {
                let from = match &cur.last {
                    Some(l) => arith.exact_or_err(l, "blockwise")?.add_u64(1),
                    None => Nat::ONE,
                };
                let b = block_of(p, &from)?;
                let start = p.block_start(&b)?;
                let v = if from.checked_sub(&start).expect("in block") < 2u64 {
                    from
                } else {
                    p.block_end(&b)?
                };
                arith.lift(&v)
            }
            StrategyKind::Tactic(p) => {
                let k = match &cur.last {
                    Some(l) => arith.exact_or_err(l, "1-tactic")?,
                    None => Nat::ONE,
                };
                arith.lift(&tactic_value(p, &k)?)
            }
            StrategyKind::Normalized { .. } => {
                Ok(cur.value.clone().expect("normalized cursor has a value"))
            }
            StrategyKind::Custom(f) => {
                let hist = cur
                    .history
                    .as_ref()
                    .expect("custom cursor keeps history")
                    .iter()
                    .map(|x| arith.exact_or_err(x, "custom strategy"))
                    .collect::<Result<Vec<_>>>()?;
                arith.lift(&require_positive(f(&hist)?, &self.name)?)
            }
        }
    }

    /// Cursor for an explicit history, moving for ONE.
    pub fn cursor_for<A: MoveArith>(
        &self,
        arith: &A,
        history: &[A::Num],
    ) -> Result<Cursor<A::Num>> {
        let mut cur = self.start(arith)?;
        for mv in history {
            self.push(arith, &mut cur, mv)?;
        }
        Ok(cur)
    }

    /// ONE's next move after `history`.
    pub fn next(&self, history: &[Nat]) -> Result<Nat> {
        self.next_as(Role::One, history)
    }

    pub fn next_as(&self, role: Role, history: &[Nat]) -> Result<Nat> {
        let mut cur = self.start_as(&Exact, role)?;
        for mv in history {
            self.push(&Exact, &mut cur, mv)?;
        }
        self.value(&Exact, &cur)
    }

    pub fn next_u64(&self, history: &[u64]) -> Result<Nat> {
        let h: Vec<Nat> = history.iter().map(|&x| Nat::from(x)).collect();
        self.next(&h)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `max(∪_{j<=n+k} I_j) + n + k + 1` for `k ∈ I_n`.
fn tactic_value(p: &IntervalPartition, k: &Nat) -> Result<Nat> {
    let n = block_of(p, k)?;
    let reach = n.add(k);
    let top = p.block_max(&reach).map_err(|_| {
        GameError::out_of_range("1-tactic", format!("partition too short for block {reach}"))
    })?;
    Ok(top.add(&reach).add_u64(1))
}

/// Parse a strategy from the spec mini-language.
///
/// `offset:c`, `copy`, `maxplus:c`, `maxinning`, `gplay:<g>`,
/// `cofinite-fill:c`, `blockwise:<partition>`, `tactic:<partition>`,
/// `norm-g1(<spec>)`, `norm-g2(<spec>)`.
pub fn stock_strategy(spec: &str) -> Result<Strategy> {
    let spec = spec.trim();
    let bad = |why: &str| GameError::Parse(format!("strategy {spec:?}: {why}"));
    for mode in [NormMode::G1One, NormMode::G2One] {
        if let Some(rest) = spec.strip_prefix(mode.tag()) {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| bad("wrapper needs parentheses"))?;
            return Ok(normalize_strategy(&stock_strategy(body)?, mode));
        }
    }
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let int_arg = || -> Result<u64> {
        arg.ok_or_else(|| bad("missing argument"))?
            .parse::<u64>()
            .map_err(|_| bad("argument must be a natural number"))
    };
    let kind = match (head, arg) {
        ("offset", Some(_)) => StrategyKind::Offset(int_arg()?),
        ("maxplus", Some(_)) => StrategyKind::MaxPlus(int_arg()?),
        ("cofinite-fill", Some(_)) => {
            let c = int_arg()?;
            if c == 0 {
                return Err(bad("cofinite-fill starts at 1 or later"));
            }
            StrategyKind::CofiniteFill(c)
        }
        ("copy", None) => StrategyKind::Copy,
        ("maxinning" | "max+inning", None) => StrategyKind::MaxInning,
        ("gplay", Some(g)) => StrategyKind::GPlay(g.parse()?),
        ("blockwise", Some(p)) => StrategyKind::Blockwise(p.parse()?),
        ("tactic", Some(p)) => StrategyKind::Tactic(p.parse()?),
        _ => return Err(bad("unknown strategy")),
    };
    let name = match &kind {
        StrategyKind::MaxInning => "maxinning".to_string(),
        _ => spec.to_string(),
    };
    Ok(Strategy::new(name, kind))
}

/// Wrap `s` so it satisfies the standing assumptions on ONE's strategies.
///
/// Applying the same mode twice is a no-op.
pub fn normalize_strategy(s: &Strategy, mode: NormMode) -> Strategy {
    if let StrategyKind::Normalized { mode: m, .. } = s.kind {
        if m == mode {
            return s.clone();
        }
    }
    Strategy {
        name: format!("{}({})", mode.tag(), s.name),
        kind: StrategyKind::Normalized {
            mode,
            inner: Box::new(s.clone()),
        },
        fast_path: s.fast_path,
    }
}

/// ONE plays `g(k)` at inning `k`.
pub fn one_dominator(g: IntFn) -> Strategy {
    Strategy::new(format!("gplay:{g}"), StrategyKind::GPlay(g))
}

/// ONE's 1-tactic against a partition witnessing non-rareness. The first
/// move applies the tactic to `k = 1`.
pub fn one_tactic_nonrare(p: IntervalPartition) -> Strategy {
    Strategy::new(format!("tactic:{p}"), StrategyKind::Tactic(p))
}

/// Maximum of `s` over all strictly increasing tuples with entries `<= n`,
/// the empty tuple included.
pub fn bound_over(s: &Strategy, n: &Nat) -> Result<Nat> {
    bound_over_capped(s, n, EXHAUSTIVE_CAP)
}

pub fn bound_over_capped(s: &Strategy, n: &Nat, cap: u64) -> Result<Nat> {
    match s.bound_form() {
        Some(BoundForm::LastPlus { c, empty }) => {
            let empty = Nat::from(empty);
            if n.is_zero() {
                Ok(empty)
            } else {
                Ok(max(empty, n.add_u64(c)))
            }
        }
        Some(form @ (BoundForm::ByLength | BoundForm::LastOnly)) => {
            let n = n
                .to_u64()
                .filter(|&n| n <= LINEAR_FAST_PATH_CAP)
                .ok_or_else(|| GameError::ResourceCap(format!("bound_over({n}) for {s}")))?;
            linear_bound(s, form, n)
        }
        None => {
            let n = n.to_u64().filter(|&n| n <= cap).ok_or_else(|| {
                GameError::ResourceCap(format!(
                    "bound_over({n}) for {s} needs exhaustive search beyond cap {cap}"
                ))
            })?;
            exhaustive_bound(s, n)
        }
    }
}

fn linear_bound(s: &Strategy, form: BoundForm, n: u64) -> Result<Nat> {
    let mut cur = s.start(&Exact)?;
    let mut best = s.value(&Exact, &cur)?;
    for x in 1..=n {
        let v = match form {
            // the tuple (1, ..., x) has length x
            BoundForm::ByLength => {
                s.push(&Exact, &mut cur, &Nat::from(x))?;
                s.value(&Exact, &cur)?
            }
            _ => {
                let single = s.cursor_for(&Exact, &[Nat::from(x)])?;
                s.value(&Exact, &single)?
            }
        };
        best = max(best, v);
    }
    Ok(best)
}

/// Depth-first over all `2^n` strictly increasing tuples.
pub fn exhaustive_bound(s: &Strategy, n: u64) -> Result<Nat> {
    fn walk(s: &Strategy, cur: &Cursor<Nat>, from: u64, n: u64, best: &mut Nat) -> Result<()> {
        let v = s.value(&Exact, cur)?;
        if v > *best {
            *best = v;
        }
        for x in from..=n {
            let mut next = cur.clone();
            s.push(&Exact, &mut next, &Nat::from(x))?;
            walk(s, &next, x + 1, n, best)?;
        }
        Ok(())
    }
    let root = s.start(&Exact)?;
    let mut best = Nat::ZERO;
    walk(s, &root, 1, n, &mut best)?;
    Ok(best)
}
