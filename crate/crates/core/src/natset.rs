//! Subsets of ℕ with exact membership, ordered enumeration and prefix counts.
//!
//! A [`NatSet`] is one of a handful of shapes. The named families (evens,
//! squares, powers, progressions, interval unions, finite and cofinite lists)
//! have closed-form counting; unions, intersections and predicate sets are
//! counted by enumeration. Predicate sets carry a declared enumeration bound
//! and every query that would look at or past the bound fails with
//! [`SetError::PastBound`] instead of silently truncating.
//!
//! Prefix counts `|A ∩ [0, n)|` of the enumerated shapes are memoized as
//! sorted checkpoints; the memo is shared between clones of a set and is
//! idempotent, so concurrent readers see the same answers a fresh
//! computation would give.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::expr::Expr;
use crate::parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("query up to {query} reaches past the declared enumeration bound {bound}")]
    PastBound { bound: u64, query: u64 },
    #[error("malformed set: {0}")]
    Malformed(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cannot read set file {path}: {message}")]
    File { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetKind {
    Empty,
    All,
    /// `{start + j * step : j ≥ 0}`, `step ≥ 1`.
    Progression { start: u64, step: u64 },
    Squares,
    /// `{base^j : j ≥ 0}`, `base ≥ 2`.
    Powers(u64),
    /// Sorted, disjoint, non-adjacent, non-empty half-open intervals.
    Intervals(Vec<(u64, u64)>),
    /// Strictly increasing.
    Finite(Vec<u64>),
    /// ℕ minus a strictly increasing list.
    Cofinite(Vec<u64>),
    Union(NatSet, NatSet),
    Intersection(NatSet, NatSet),
    /// `{x < bound : expr(x) ≠ 0}`.
    Predicate { expr: Expr, bound: u64 },
}

#[derive(Clone)]
pub struct NatSet {
    kind: Arc<SetKind>,
    cache: Arc<Mutex<BTreeMap<u64, u64>>>,
}

impl PartialEq for NatSet {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for NatSet {}

impl fmt::Debug for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NatSet({self})")
    }
}

fn ceil_sqrt(n: u64) -> u64 {
    if n == 0 {
        0
    } else {
        (n - 1).isqrt() + 1
    }
}

fn powers_below(base: u64, n: u64) -> impl Iterator<Item = u64> {
    std::iter::successors(Some(1u64), move |p| p.checked_mul(base)).take_while(move |&p| p < n)
}

impl NatSet {
    fn from_kind(kind: SetKind) -> Self {
        NatSet { kind: Arc::new(kind), cache: Arc::new(Mutex::new(BTreeMap::new())) }
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn empty() -> Self {
        Self::from_kind(SetKind::Empty)
    }

    pub fn all() -> Self {
        Self::from_kind(SetKind::All)
    }

    pub fn evens() -> Self {
        Self::from_kind(SetKind::Progression { start: 0, step: 2 })
    }

    pub fn multiples(m: u64) -> Result<Self, SetError> {
        Self::progression(0, m)
    }

    pub fn progression(start: u64, step: u64) -> Result<Self, SetError> {
        if step == 0 {
            return Err(SetError::Malformed("progression step must be at least 1".into()));
        }
        if step == 1 && start == 0 {
            return Ok(Self::all());
        }
        Ok(Self::from_kind(SetKind::Progression { start, step }))
    }

    pub fn squares() -> Self {
        Self::from_kind(SetKind::Squares)
    }

    pub fn powers(base: u64) -> Result<Self, SetError> {
        if base < 2 {
            return Err(SetError::Malformed("powers base must be at least 2".into()));
        }
        Ok(Self::from_kind(SetKind::Powers(base)))
    }

    /// Union of half-open intervals `[a, b)`; empty intervals are dropped and
    /// overlapping or adjacent ones merged.
    pub fn intervals(mut ranges: Vec<(u64, u64)>) -> Result<Self, SetError> {
        if let Some(&(a, b)) = ranges.iter().find(|(a, b)| a > b) {
            return Err(SetError::Malformed(format!("interval [{a},{b}) has a > b")));
        }
        ranges.retain(|(a, b)| a < b);
        ranges.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(ranges.len());
        for (a, b) in ranges {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        if merged.is_empty() {
            return Ok(Self::empty());
        }
        Ok(Self::from_kind(SetKind::Intervals(merged)))
    }

    /// Finite set from arbitrary elements (sorted and deduplicated).
    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self::from_kind(SetKind::Finite(v))
    }

    /// Finite set from a list that must already be strictly increasing.
    pub fn from_sorted(elements: Vec<u64>) -> Result<Self, SetError> {
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(SetError::Malformed(format!("elements not strictly increasing at {} then {}", w[0], w[1])));
        }
        Ok(Self::from_kind(SetKind::Finite(elements)))
    }

    pub fn complement_of(excluded: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = excluded.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self::from_kind(SetKind::Cofinite(v))
    }

    pub fn union(a: NatSet, b: NatSet) -> Self {
        Self::from_kind(SetKind::Union(a, b))
    }

    pub fn intersection(a: NatSet, b: NatSet) -> Self {
        Self::from_kind(SetKind::Intersection(a, b))
    }

    /// `{x < bound : expr(x) ≠ 0}` where `x` is bound to variable `x1`.
    pub fn predicate(expr: Expr, bound: u64) -> Result<Self, SetError> {
        if expr.max_var() > 1 {
            return Err(SetError::Malformed("predicate may only use the variable x1".into()));
        }
        Ok(Self::from_kind(SetKind::Predicate { expr, bound }))
    }

    pub fn parse(spec: &str) -> Result<Self, SetError> {
        crate::setspec::parse_set(spec)
    }

    fn check_bound(bound: u64, query: u64) -> Result<(), SetError> {
        if query > bound {
            Err(SetError::PastBound { bound, query })
        } else {
            Ok(())
        }
    }

    pub fn contains(&self, x: u64) -> Result<bool, SetError> {
        Ok(match &*self.kind {
            SetKind::Empty => false,
            SetKind::All => true,
            SetKind::Progression { start, step } => x >= *start && (x - start) % step == 0,
            SetKind::Squares => {
                let r = x.isqrt();
                r * r == x
            }
            SetKind::Powers(b) => {
                let mut p = 1u64;
                loop {
                    if p == x {
                        break true;
                    }
                    match p.checked_mul(*b) {
                        Some(q) if q <= x => p = q,
                        _ => break false,
                    }
                }
            }
            SetKind::Intervals(iv) => {
                let i = iv.partition_point(|&(_, b)| b <= x);
                i < iv.len() && iv[i].0 <= x
            }
            SetKind::Finite(v) => v.binary_search(&x).is_ok(),
            SetKind::Cofinite(v) => v.binary_search(&x).is_err(),
            SetKind::Union(a, b) => a.contains(x)? || b.contains(x)?,
            SetKind::Intersection(a, b) => a.contains(x)? && b.contains(x)?,
            SetKind::Predicate { expr, bound } => {
                Self::check_bound(*bound, x.saturating_add(1))?;
                expr.eval(&[x]) != 0
            }
        })
    }

    /// `|A ∩ [0, n)|` for the closed-form shapes, `None` otherwise.
    fn closed_count_below(&self, n: u64) -> Option<u64> {
        Some(match &*self.kind {
            SetKind::Empty => 0,
            SetKind::All => n,
            SetKind::Progression { start, step } => {
                if n <= *start {
                    0
                } else {
                    (n - start - 1) / step + 1
                }
            }
            SetKind::Squares => ceil_sqrt(n),
            SetKind::Powers(b) => powers_below(*b, n).count() as u64,
            SetKind::Intervals(iv) => iv.iter().map(|&(a, b)| b.min(n).saturating_sub(a)).sum(),
            SetKind::Finite(v) => v.partition_point(|&e| e < n) as u64,
            SetKind::Cofinite(v) => n - v.partition_point(|&e| e < n) as u64,
            _ => return None,
        })
    }

    /// `|A ∩ [lo, hi)|`.
    pub fn count_in(&self, lo: u64, hi: u64) -> Result<u64, SetError> {
        if hi <= lo {
            return Ok(0);
        }
        match (self.closed_count_below(hi), self.closed_count_below(lo)) {
            (Some(h), Some(l)) => Ok(h - l),
            _ => Ok(self.elements_in(lo, hi)?.len() as u64),
        }
    }

    /// Sorted elements of `A ∩ [lo, hi)`.
    pub fn elements_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>, SetError> {
        if hi <= lo {
            return Ok(Vec::new());
        }
        Ok(match &*self.kind {
            SetKind::Empty => Vec::new(),
            SetKind::All => (lo..hi).collect(),
            SetKind::Progression { start, step } => {
                let first = if lo <= *start {
                    *start
                } else {
                    let j = (lo - start).div_ceil(*step);
                    match j.checked_mul(*step).and_then(|o| o.checked_add(*start)) {
                        Some(v) => v,
                        None => return Ok(Vec::new()),
                    }
                };
                if first >= hi {
                    Vec::new()
                } else {
                    (first..hi).step_by(*step as usize).collect()
                }
            }
            SetKind::Squares => {
                let mut out = Vec::new();
                let mut s = ceil_sqrt(lo);
                while let Some(sq) = s.checked_mul(s) {
                    if sq >= hi {
                        break;
                    }
                    out.push(sq);
                    s += 1;
                }
                out
            }
            SetKind::Powers(b) => powers_below(*b, hi).filter(|&p| p >= lo).collect(),
            SetKind::Intervals(iv) => iv
                .iter()
                .flat_map(|&(a, b)| a.max(lo)..b.min(hi))
                .collect(),
            SetKind::Finite(v) => {
                let i = v.partition_point(|&e| e < lo);
                let j = v.partition_point(|&e| e < hi);
                v[i..j].to_vec()
            }
            SetKind::Cofinite(v) => (lo..hi).filter(|x| v.binary_search(x).is_err()).collect(),
            SetKind::Union(a, b) => {
                let xs = a.elements_in(lo, hi)?;
                let ys = b.elements_in(lo, hi)?;
                merge_union(&xs, &ys)
            }
            SetKind::Intersection(a, b) => {
                let xs = a.elements_in(lo, hi)?;
                let ys = b.elements_in(lo, hi)?;
                merge_intersection(&xs, &ys)
            }
            SetKind::Predicate { expr, bound } => {
                Self::check_bound(*bound, hi)?;
                (lo..hi).filter(|&x| expr.eval(&[x]) != 0).collect()
            }
        })
    }

    pub fn elements_below(&self, n: u64) -> Result<Vec<u64>, SetError> {
        self.elements_in(0, n)
    }

    /// `|A ∩ [0, n)|`.
    pub fn prefix_count(&self, n: u64) -> Result<u64, SetError> {
        if let Some(c) = self.closed_count_below(n) {
            return Ok(c);
        }
        let (from, base) = {
            let cache = self.cache.lock().expect("prefix cache poisoned");
            cache.range(..=n).next_back().map(|(&k, &v)| (k, v)).unwrap_or((0, 0))
        };
        let count = base + self.count_in(from, n)?;
        self.cache.lock().expect("prefix cache poisoned").insert(n, count);
        Ok(count)
    }

    /// Checkpoints currently memoized.
    pub fn cached_checkpoints(&self) -> Vec<(u64, u64)> {
        self.cache.lock().expect("prefix cache poisoned").iter().map(|(&k, &v)| (k, v)).collect()
    }

    /// An exclusive bound on all elements, when the shape makes one evident.
    pub fn upper_limit(&self) -> Option<u64> {
        match &*self.kind {
            SetKind::Empty => Some(0),
            SetKind::Intervals(iv) => iv.last().map(|&(_, b)| b),
            SetKind::Finite(v) => Some(v.last().map_or(0, |&e| e + 1)),
            SetKind::Union(a, b) => Some(a.upper_limit()?.max(b.upper_limit()?)),
            SetKind::Intersection(a, b) => match (a.upper_limit(), b.upper_limit()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            _ => None,
        }
    }

    /// The `m`-th element (0-based) in increasing order, `None` if the set has
    /// fewer elements representable in 64 bits.
    pub fn nth(&self, m: u64) -> Result<Option<u64>, SetError> {
        Ok(match &*self.kind {
            SetKind::Empty => None,
            SetKind::All => Some(m),
            SetKind::Progression { start, step } => m.checked_mul(*step).and_then(|o| o.checked_add(*start)),
            SetKind::Squares => m.checked_mul(m),
            SetKind::Powers(b) => b.checked_pow(u32::try_from(m).unwrap_or(u32::MAX)),
            SetKind::Intervals(iv) => {
                let mut left = m;
                let mut found = None;
                for &(a, b) in iv {
                    if left < b - a {
                        found = Some(a + left);
                        break;
                    }
                    left -= b - a;
                }
                found
            }
            SetKind::Finite(v) => usize::try_from(m).ok().and_then(|i| v.get(i).copied()),
            _ => self.nth_by_scan(m)?,
        })
    }

    /// Least enumeration bound of any predicate inside the set.
    fn scan_bound(&self) -> Option<u64> {
        match &*self.kind {
            SetKind::Predicate { bound, .. } => Some(*bound),
            SetKind::Union(a, b) | SetKind::Intersection(a, b) => match (a.scan_bound(), b.scan_bound()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            _ => None,
        }
    }

    fn nth_by_scan(&self, m: u64) -> Result<Option<u64>, SetError> {
        let limit = self.upper_limit();
        let bound = self.scan_bound();
        let mut lo = 0u64;
        let mut width = 1024u64;
        let mut seen = 0u64;
        loop {
            if limit.is_some_and(|l| lo >= l) || lo == u64::MAX {
                return Ok(None);
            }
            let mut hi = lo.saturating_add(width);
            if let Some(b) = bound {
                if lo >= b {
                    return Err(SetError::PastBound { bound: b, query: lo + 1 });
                }
                hi = hi.min(b);
            }
            let chunk = self.elements_in(lo, hi)?;
            if seen + chunk.len() as u64 > m {
                return Ok(Some(chunk[(m - seen) as usize]));
            }
            seen += chunk.len() as u64;
            lo = hi;
            width = width.saturating_mul(2);
        }
    }

    /// Ordered enumeration of the elements `≥ lo`, in growing chunks.
    pub fn iter_from(&self, lo: u64) -> SetIter {
        SetIter { set: self.clone(), next_lo: lo, width: 1024, buf: Vec::new(), idx: 0, done: false }
    }

    /// Text form in the set-specification language.
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

fn merge_union(xs: &[u64], ys: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() || j < ys.len() {
        let next = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                i += 1;
                j += 1;
                a
            }
            (Some(&a), Some(&b)) if a < b => {
                i += 1;
                a
            }
            (Some(_), Some(&b)) => {
                j += 1;
                b
            }
            (Some(&a), None) => {
                i += 1;
                a
            }
            (None, Some(&b)) => {
                j += 1;
                b
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

fn merge_intersection(xs: &[u64], ys: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(xs[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Streaming enumerator returned by [`NatSet::iter_from`].
pub struct SetIter {
    set: NatSet,
    next_lo: u64,
    width: u64,
    buf: Vec<u64>,
    idx: usize,
    done: bool,
}

impl Iterator for SetIter {
    type Item = Result<u64, SetError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(&x) = self.buf.get(self.idx) {
                self.idx += 1;
                return Some(Ok(x));
            }
            if self.done || self.next_lo == u64::MAX {
                return None;
            }
            if self.set.upper_limit().is_some_and(|l| self.next_lo >= l) {
                return None;
            }
            let mut hi = self.next_lo.saturating_add(self.width);
            if let Some(bound) = self.set.scan_bound() {
                if self.next_lo >= bound {
                    self.done = true;
                    return Some(Err(SetError::PastBound { bound, query: self.next_lo + 1 }));
                }
                hi = hi.min(bound);
            }
            match self.set.elements_in(self.next_lo, hi) {
                Ok(chunk) => {
                    self.buf = chunk;
                    self.idx = 0;
                    self.next_lo = hi;
                    self.width = self.width.saturating_mul(2).min(1 << 24);
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, v: &[u64]) -> fmt::Result {
    write!(f, "{{")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.kind {
            SetKind::Empty => write!(f, "empty"),
            SetKind::All => write!(f, "all"),
            SetKind::Progression { start: 0, step: 2 } => write!(f, "evens"),
            SetKind::Progression { start: 0, step } => write!(f, "multiples:{step}"),
            SetKind::Progression { start, step } => write!(f, "progression:{start},{step}"),
            SetKind::Squares => write!(f, "squares"),
            SetKind::Powers(b) => write!(f, "powers:{b}"),
            SetKind::Intervals(iv) => {
                write!(f, "intervals:")?;
                for (i, (a, b)) in iv.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "[{a},{b})")?;
                }
                Ok(())
            }
            SetKind::Finite(v) => {
                write!(f, "finite:")?;
                write_list(f, v)
            }
            SetKind::Cofinite(v) => {
                write!(f, "complement:")?;
                write_list(f, v)
            }
            SetKind::Union(a, b) => write!(f, "union({a},{b})"),
            SetKind::Intersection(a, b) => write!(f, "inter({a},{b})"),
            SetKind::Predicate { expr, bound } => write!(f, "pred({bound}):{expr}"),
        }
    }
}
