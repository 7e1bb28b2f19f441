//! Searches and finite-horizon checks around the ideal of upper-density-zero
//! sets: badness entries drawn from a witness set, the inductive assembly of
//! a global witness, membership probes over shadows, and the lifting of a
//! shadow witness back to the original function.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::certificate::{sparse_at, BadnessCertificate, CertEntry};
use crate::density::MAX_BLOCK;
use crate::func::{for_each_tuple, shadow, FinFun};
use crate::natset::{NatSet, SetError};
use crate::rational::Rat;
use crate::shadow::{enumerate_shadow_specs, ShadowSpec};

/// Calls `visit` on every tuple in `elems^k`, in lexicographic index order.
fn for_each_power(elems: &[u64], k: usize, mut visit: impl FnMut(&[u64])) {
    let mut args = vec![0u64; k];
    for_each_tuple(k, elems.len() as u64, |idx| {
        for (slot, &j) in args.iter_mut().zip(idx) {
            *slot = elems[j as usize];
        }
        visit(&args);
        true
    });
}

/// Sorted distinct values of `f[elems^k]` below `t`.
pub fn image_below(f: &FinFun, elems: &[u64], t: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_power(elems, f.arity(), |x| {
        let y = f.call(x);
        if y < t {
            out.push(y);
        }
    });
    out.sort_unstable();
    out.dedup();
    out
}

/// `|elems|^k`, saturating.
pub fn image_cost(elems: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, _| acc.saturating_mul(elems as u128))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchHorizons {
    pub m_max: u64,
    pub t_max: u64,
    pub n_max: u64,
}

impl Default for SearchHorizons {
    fn default() -> Self {
        SearchHorizons { m_max: 1 << 40, t_max: 1 << 24, n_max: 1 << 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BadnessError {
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("no m in [{i}, {m_max}] keeps B sparse with respect to {i} up to {n_max}")]
    NoMFound { i: u64, m_max: u64, n_max: u64 },
    #[error("no t in [{i}, {t_max}] makes the image {eps}-dense (images taken below {n_max})")]
    NoTFound { i: u64, t_max: u64, n_max: u64, eps: Rat },
    #[error(transparent)]
    Set(#[from] SetError),
}

/// A successful search, with the intermediate quantities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadnessSearch {
    pub entry: CertEntry,
    /// Least `m ≥ i` with `|B ∩ [0, j)| ≤ j / 2^i` for all `j ∈ [m, n_max]`.
    pub m: u64,
    /// `|f[A^k] ∩ [0, t)|` for the returned `A`.
    pub image_count: u64,
}

/// Least `m ≥ i` such that `|B ∩ [0, j)| ≤ j/2^i` for all `j ∈ [m, n_max]`,
/// given the elements of `B` below `n_max`.
fn least_sparse_start(elems: &[u64], i: u64, n_max: u64) -> u64 {
    // On (b_{c-1}, b_c] the count is c, so the violating j there are those below c·2^i.
    let threshold = |c: u64| -> u128 {
        if c == 0 {
            0
        } else if i >= 64 {
            u128::MAX
        } else {
            (c as u128) << i
        }
    };
    let mut last_bad: Option<u64> = None;
    let mut lo = 0u64;
    for c in 0..=elems.len() {
        let hi = if c < elems.len() { elems[c] } else { n_max };
        // Interval of j with count c: [lo, hi].
        if lo <= hi {
            let t = threshold(c as u64);
            if t > lo as u128 {
                let bad = if t > hi as u128 { hi } else { t as u64 - 1 };
                last_bad = Some(last_bad.map_or(bad, |b| b.max(bad)));
            }
        }
        lo = hi.saturating_add(1);
    }
    last_bad.map_or(i, |b| (b + 1).max(i))
}

/// Follows the proof that minimal functions are bad: finds a tail `D` of
/// `B` that is sparse with respect to `i`, the least `t` making `f[D^k]`
/// ε-dense in `[0, t)`, and the least `n` after which the image below `t`
/// no longer grows.
pub fn badness_from_witness(
    f: &FinFun,
    b: &NatSet,
    eps: &Rat,
    i: u64,
    h: SearchHorizons,
) -> Result<BadnessSearch, BadnessError> {
    if !eps.is_positive() {
        return Err(BadnessError::NonPositiveEpsilon);
    }
    let no_m = BadnessError::NoMFound { i, m_max: h.m_max, n_max: h.n_max };
    if i > h.m_max || i > h.n_max {
        return Err(no_m);
    }
    let below = b.elements_below(h.n_max)?;
    let m = least_sparse_start(&below, i, h.n_max);
    if m > h.m_max {
        return Err(no_m);
    }
    let d: Vec<u64> = below.iter().copied().filter(|&x| x >= m).collect();

    // For each image value below t_max, the least achievable largest coordinate.
    let mut reach: BTreeMap<u64, u64> = BTreeMap::new();
    for_each_power(&d, f.arity(), |x| {
        let y = f.call(x);
        if y < h.t_max {
            let top = x.iter().copied().max().unwrap_or(0);
            reach.entry(y).and_modify(|v| *v = (*v).min(top)).or_insert(top);
        }
    });
    let image: Vec<u64> = reach.keys().copied().collect();

    let t_lo = i.max(1);
    let dense = |t: u64| eps.at_most_count(image.partition_point(|&y| y < t) as u64, t);
    // The count is flat between image values, so only t_lo and y + 1 can be first.
    let t = std::iter::once(t_lo)
        .chain(image.iter().map(|&y| y + 1).filter(|&c| c > t_lo))
        .take_while(|&c| c <= h.t_max)
        .find(|&c| dense(c))
        .ok_or(BadnessError::NoTFound { i, t_max: h.t_max, n_max: h.n_max, eps: eps.clone() })?;

    let n = reach.range(..t).map(|(_, &top)| top + 1).max().unwrap_or(m).max(i);
    let a: Vec<u64> = d.iter().copied().filter(|&x| x < n).collect();
    let image_count = image.partition_point(|&y| y < t) as u64;
    Ok(BadnessSearch { entry: CertEntry { i, n, t, a }, m, image_count })
}

/// Indices `i_j = 2^j` for `j = 1..=count`. An entry for `i` also covers
/// every smaller index, so these certify all `i ≤ 2^count`.
pub fn doubling_schedule(count: u32) -> Vec<u64> {
    (1..=count).map(|j| 1u64 << j.min(63)).collect()
}

/// Runs [`badness_from_witness`] at each index and collects a certificate.
pub fn certificate_from_schedule(
    f: &FinFun,
    b: &NatSet,
    eps: &Rat,
    schedule: &[u64],
    h: SearchHorizons,
) -> Result<(BadnessCertificate, Vec<BadnessSearch>), AssemblyError> {
    let mut searches = Vec::new();
    for (j, &i) in schedule.iter().enumerate() {
        let s = badness_from_witness(f, b, eps, i, h)
            .map_err(|source| AssemblyError::Stage { stage: j + 1, i, source })?;
        searches.push(s);
    }
    let cert = BadnessCertificate {
        function: f.spec(),
        eps: eps.clone(),
        entries: searches.iter().map(|s| s.entry.clone()).collect(),
    };
    Ok((cert, searches))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("stage {stage} (i = {i}) failed: {source}")]
    Stage {
        stage: usize,
        i: u64,
        #[source]
        source: BadnessError,
    },
    #[error("delta must be positive")]
    NonPositiveDelta,
}

/// The proof's density controls for a target `δ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityChain {
    pub delta: Rat,
    /// Least `v ≥ 1` with `1/2^v < δ/2`.
    pub v: u64,
    /// Index `min(v − 1, J)` of the `n_j` used to pick `s`.
    pub anchor: usize,
    /// Least `s ≥ 1` with `n_anchor / s < δ/2`.
    pub s: u64,
    /// Whether `|A ∩ [0, m)| / m < δ` for every `m ∈ (s, n_J]`.
    pub holds: bool,
    /// First `m` where the bound fails.
    pub witness: Option<u64>,
    /// Whether `anchor = v − 1`, i.e. the assembly was long enough for the argument.
    pub anchor_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessAssembly {
    pub eps: Rat,
    pub stages: Vec<BadnessSearch>,
    /// Elements of `A = ⋃ A_j`.
    pub union: Vec<u64>,
    pub chain: Option<DensityChain>,
}

impl WitnessAssembly {
    pub fn n_seq(&self) -> Vec<u64> {
        self.stages.iter().map(|s| s.entry.n).collect()
    }

    pub fn t_seq(&self) -> Vec<u64> {
        self.stages.iter().map(|s| s.entry.t).collect()
    }

    pub fn certificate(&self, function: Option<String>) -> BadnessCertificate {
        BadnessCertificate {
            function,
            eps: self.eps.clone(),
            entries: self.stages.iter().map(|s| s.entry.clone()).collect(),
        }
    }

    /// Checks the structural invariants: strictly increasing `n_j` and `t_j`,
    /// `A_j ⊆ [n_{j-1}, n_j)`, and sparsity of `A_j` with respect to `n_{j-1}`.
    pub fn invariant_violation(&self) -> Option<String> {
        let (mut prev_n, mut prev_t) = (0u64, 0u64);
        for (j, s) in self.stages.iter().enumerate() {
            let e = &s.entry;
            if e.n <= prev_n || e.t <= prev_t {
                return Some(format!("stage {}: n or t fails to increase", j + 1));
            }
            if e.a.iter().any(|&x| x < prev_n || x >= e.n) {
                return Some(format!("stage {}: A_j leaves [n_(j-1), n_j)", j + 1));
            }
            for (c, &x) in e.a.iter().enumerate() {
                if !sparse_at(c as u64 + 1, x + 1, prev_n) {
                    return Some(format!("stage {}: A_j is not sparse with respect to n_(j-1) at r = {}", j + 1, x + 1));
                }
            }
            prev_n = e.n;
            prev_t = e.t;
        }
        None
    }
}

fn density_chain(union: &[u64], n_seq: &[u64], delta: &Rat) -> DensityChain {
    // 1/2^v < δ/2  ⟺  δ·2^v > 2.
    let mut v = 1u64;
    while v < 63 && delta.at_most_count(2, 1 << v) {
        v += 1;
    }
    let j_count = n_seq.len();
    let want = (v - 1) as usize;
    let anchor = want.min(j_count);
    let two_n = if anchor == 0 { 0 } else { n_seq[anchor - 1].saturating_mul(2) };
    // Least s with 2n < δ·s.
    let s = match delta.ceil_div_of(two_n) {
        Some(q) if !delta.at_most_count(two_n, q) => q.max(1),
        Some(q) => q.saturating_add(1),
        None => u64::MAX,
    };

    let n_j = n_seq.last().copied().unwrap_or(0);
    let mut witness = None;
    if s < n_j {
        // Ratios peak right after an element, so check m = s + 1 and every a + 1 beyond s.
        let start = union.partition_point(|&x| x <= s);
        let candidates = std::iter::once(s + 1).chain(union[start..].iter().map(|&x| x + 1));
        for m in candidates.filter(|&m| m <= n_j) {
            let count = union.partition_point(|&x| x < m) as u64;
            if delta.at_most_count(count, m) {
                witness = Some(m);
                break;
            }
        }
    }
    DensityChain {
        delta: delta.clone(),
        v,
        anchor,
        s,
        holds: witness.is_none(),
        witness,
        anchor_exact: anchor == want,
    }
}

/// Builds `J` stages with `i_j = max(n_{j−1}, t_{j−1}) + 1`, then, for a
/// given `δ`, the proof's `v` and `s` and the bound `|A ∩ [0,m)|/m < δ` on
/// `(s, n_J]`.
pub fn assemble_global_witness(
    f: &FinFun,
    b: &NatSet,
    eps: &Rat,
    stages: usize,
    h: SearchHorizons,
    delta: Option<&Rat>,
) -> Result<WitnessAssembly, AssemblyError> {
    if delta.is_some_and(|d| !d.is_positive()) {
        return Err(AssemblyError::NonPositiveDelta);
    }
    let mut done: Vec<BadnessSearch> = Vec::with_capacity(stages);
    let (mut n_prev, mut t_prev) = (0u64, 0u64);
    for j in 1..=stages {
        let i = n_prev.max(t_prev) + 1;
        let s = badness_from_witness(f, b, eps, i, h).map_err(|source| AssemblyError::Stage { stage: j, i, source })?;
        n_prev = s.entry.n;
        t_prev = s.entry.t;
        done.push(s);
    }
    let mut union: Vec<u64> = done.iter().flat_map(|s| s.entry.a.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    let n_seq: Vec<u64> = done.iter().map(|s| s.entry.n).collect();
    let chain = delta.map(|d| density_chain(&union, &n_seq, d));
    Ok(WitnessAssembly { eps: eps.clone(), stages: done, union, chain })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeConfig {
    /// Horizon `N`: test sets are read below `N`, images counted below `N`.
    pub horizon: u64,
    /// Prefix entries of shadows range over `[0, a_bound)`.
    pub a_bound: u64,
    pub min_blocks: usize,
    pub image_threshold: Rat,
    pub input_threshold: Rat,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            horizon: 1 << 22,
            a_bound: 2,
            min_blocks: 3,
            image_threshold: Rat::new(1, 4),
            input_threshold: Rat::new(1, 32),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub set: usize,
    pub shadow: String,
    pub image_blocks: Vec<Rat>,
    pub input_blocks: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    NonMemberWitnessed { set: usize, shadow: String, blocks: Vec<u32>, row: ProbeRow },
    Inconclusive { rows: Vec<ProbeRow> },
}

/// Upper bound on the number of evaluations [`membership_probe`] will make.
pub fn probe_cost(f: &FinFun, sets: &[NatSet], cfg: &ProbeConfig) -> Result<u128, SetError> {
    let k = f.arity();
    let mut total = 0u128;
    for t in sets {
        let size = t.prefix_count(cfg.horizon)? as usize;
        for spec in enumerate_shadow_specs(k, cfg.a_bound) {
            total = total.saturating_add(image_cost(size, k - spec.prefix().len()));
        }
    }
    Ok(total)
}

fn block_ratios(elems: &[u64], horizon: u64) -> Vec<Rat> {
    let mut out = Vec::new();
    let mut k = 0u32;
    while k <= MAX_BLOCK && (1u64 << (k + 1)) <= horizon {
        let (lo, hi) = (1u64 << k, 1u64 << (k + 1));
        let c = elems.partition_point(|&x| x < hi) - elems.partition_point(|&x| x < lo);
        out.push(Rat::new(c as u64, lo));
        k += 1;
    }
    out
}

/// Looks for a shadow of `f` and a test set `T` such that on at least
/// `min_blocks` consecutive dyadic blocks the image has block density at
/// least `image_threshold` while `T` stays at or below `input_threshold`.
/// Never claims membership.
pub fn membership_probe(f: &FinFun, sets: &[NatSet], cfg: &ProbeConfig) -> Result<ProbeVerdict, SetError> {
    let mut rows = Vec::new();
    for (si, t) in sets.iter().enumerate() {
        let elems = t.elements_below(cfg.horizon)?;
        let input_blocks = block_ratios(&elems, cfg.horizon);
        for spec in enumerate_shadow_specs(f.arity(), cfg.a_bound) {
            let g = shadow(f, &spec).expect("enumerated specs are valid");
            let image = image_below(&g, &elems, cfg.horizon);
            let image_blocks = block_ratios(&image, cfg.horizon);
            let good: Vec<bool> = image_blocks
                .iter()
                .zip(&input_blocks)
                .map(|(im, inp)| *im >= cfg.image_threshold && *inp <= cfg.input_threshold)
                .collect();
            let row = ProbeRow { set: si, shadow: spec.to_string(), image_blocks, input_blocks: input_blocks.clone() };
            let mut run = 0usize;
            for (kk, &ok) in good.iter().enumerate() {
                run = if ok { run + 1 } else { 0 };
                if cfg.min_blocks > 0 && run >= cfg.min_blocks {
                    let first = (kk + 1 - run) as u32;
                    return Ok(ProbeVerdict::NonMemberWitnessed {
                        set: si,
                        shadow: spec.to_string(),
                        blocks: (first..=kk as u32).collect(),
                        row,
                    });
                }
            }
            rows.push(row);
        }
    }
    Ok(ProbeVerdict::Inconclusive { rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftRecord {
    pub lifted: String,
    pub horizon: u64,
    /// Whether `f_{π,ā}[B^{k−ℓ}] ⊆ f[B′^k]` below the horizon.
    pub contained: bool,
    /// Least shadow-image value below the horizon missing from `f[B′^k]`.
    pub witness: Option<u64>,
}

/// `B′ = B ∪ {entries of ā}` together with the containment check
/// `f[B′^k] ⊇ f_{π,ā}[B^{k−ℓ}]` on values below `horizon`.
pub fn shadow_witness_lift(
    f: &FinFun,
    spec: &ShadowSpec,
    b: &NatSet,
    horizon: u64,
) -> Result<(NatSet, LiftRecord), crate::func::FunError> {
    let g = shadow(f, spec)?;
    let lifted = if spec.prefix().is_empty() { b.clone() } else { NatSet::union(b.clone(), NatSet::finite(spec.prefix().iter().copied())) };
    let err = |e: SetError| crate::func::FunError::Invalid(e.to_string());
    let domain = spec.prefix().iter().map(|&a| a + 1).max().unwrap_or(0).max(horizon);
    let small = b.elements_below(horizon).map_err(err)?;
    let big = lifted.elements_below(domain).map_err(err)?;
    let want = image_below(&g, &small, horizon);
    let have = image_below(f, &big, horizon);
    let witness = want.iter().copied().find(|y| have.binary_search(y).is_err());
    let record = LiftRecord { lifted: lifted.spec(), horizon, contained: witness.is_none(), witness };
    Ok((lifted, record))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AkRecord {
    pub i: u64,
    pub horizon: u64,
    /// `f[B] ∖ f[[0,i]] ⊆ f[B ∖ [0,i]]`.
    pub lower_holds: bool,
    /// `f[B ∖ [0,i]] ⊆ f[B]`.
    pub upper_holds: bool,
    /// A value in `f[B ∖ [0,i]] ∩ f[[0,i]]`, where the displayed equality fails.
    pub equality_gap: Option<u64>,
}

/// The containments `f[B]∖f[[0,i]] ⊆ f[B∖[0,i]] ⊆ f[B]` for unary `f`, with
/// `B` read below `horizon`. A strict failure of the equality is flagged,
/// not treated as an error.
pub fn ak_containments(f: &FinFun, b: &NatSet, i: u64, horizon: u64) -> Result<AkRecord, SetError> {
    assert_eq!(f.arity(), 1, "unary functions only");
    let elems = b.elements_below(horizon)?;
    let img = |xs: &mut dyn Iterator<Item = u64>| {
        let mut v: Vec<u64> = xs.map(|x| f.call1(x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let fb = img(&mut elems.iter().copied());
    let f_tail = img(&mut elems.iter().copied().filter(|&x| x > i));
    let f_head = img(&mut (0..=i.min(horizon)));
    let has = |v: &[u64], y: u64| v.binary_search(&y).is_ok();
    let lower_holds = fb.iter().filter(|&&y| !has(&f_head, y)).all(|&y| has(&f_tail, y));
    let upper_holds = f_tail.iter().all(|&y| has(&fb, y));
    let equality_gap = f_tail.iter().copied().find(|&y| has(&f_head, y));
    Ok(AkRecord { i, horizon, lower_holds, upper_holds, equality_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::validate_certificate;

    fn h(m: u64, t: u64, n: u64) -> SearchHorizons {
        SearchHorizons { m_max: m, t_max: t, n_max: n }
    }

    #[test]
    fn sparse_start_matches_brute_force() {
        let b = NatSet::squares();
        for i in 1..6u64 {
            let n_max = 5000;
            let elems = b.elements_below(n_max).unwrap();
            let fast = least_sparse_start(&elems, i, n_max);
            let slow = (i..=n_max + 1)
                .find(|&m| (m..=n_max).all(|j| (b.prefix_count(j).unwrap() << i) <= j))
                .unwrap();
            assert_eq!(fast, slow, "i = {i}");
        }
    }

    #[test]
    fn sqrt_indicator_searches() {
        let f = FinFun::sqrt_indicator();
        let b = NatSet::squares();
        let s = badness_from_witness(&f, &b, &Rat::new(1, 3), 1, h(1 << 20, 1 << 20, 1 << 20)).unwrap();
        assert_eq!((s.m, s.entry.t, s.entry.n), (6, 5, 17));
        assert_eq!(s.entry.a, vec![9, 16]);
        let s = badness_from_witness(&f, &b, &Rat::new(1, 3), 3, h(1 << 20, 1 << 20, 1 << 20)).unwrap();
        assert_eq!((s.m, s.entry.t, s.entry.n), (72, 14, 170));
        assert_eq!(s.entry.a, vec![81, 100, 121, 144, 169]);
        let cert = BadnessCertificate { function: None, eps: Rat::new(1, 3), entries: vec![s.entry] };
        assert!(validate_certificate(&f, &cert).pass);
    }

    #[test]
    fn failures() {
        let b = NatSet::squares();
        let hz = h(1 << 16, 1 << 12, 1 << 16);
        let zero = FinFun::constant(0, 1).unwrap();
        assert!(matches!(badness_from_witness(&zero, &b, &Rat::new(1, 3), 4, hz), Err(BadnessError::NoTFound { .. })));
        let f = FinFun::sqrt_indicator();
        assert!(matches!(badness_from_witness(&f, &b, &Rat::new(2, 1), 1, hz), Err(BadnessError::NoTFound { .. })));
        assert!(matches!(badness_from_witness(&f, &b, &Rat::new(1, 3), 12, hz), Err(BadnessError::NoMFound { .. })));
    }

    #[test]
    fn larger_horizon_keeps_m_and_t() {
        let f = FinFun::sqrt_indicator();
        let b = NatSet::squares();
        let small = badness_from_witness(&f, &b, &Rat::new(1, 3), 4, h(1 << 20, 1 << 20, 1 << 18)).unwrap();
        let large = badness_from_witness(&f, &b, &Rat::new(1, 3), 4, h(1 << 20, 1 << 20, 1 << 26)).unwrap();
        assert_eq!((small.m, small.entry.t), (large.m, large.entry.t));
    }

    #[test]
    fn chain_parameters() {
        let c = density_chain(&[], &[10, 100, 1000, 10_000], &Rat::new(1, 4));
        assert_eq!(c.v, 4);
        assert_eq!(c.anchor, 3);
        assert_eq!(c.s, 8001);
        assert!(c.holds && c.anchor_exact);
        let c = density_chain(&[], &[10], &Rat::new(1, 10));
        assert_eq!((c.v, c.anchor, c.anchor_exact), (5, 1, false));
    }

    #[test]
    fn probe_verdicts() {
        let cfg = ProbeConfig::default();
        let sq = [NatSet::squares()];
        assert!(matches!(membership_probe(&FinFun::identity(), &sq, &cfg).unwrap(), ProbeVerdict::Inconclusive { .. }));
        assert!(matches!(
            membership_probe(&FinFun::sqrt_indicator(), &sq, &cfg).unwrap(),
            ProbeVerdict::NonMemberWitnessed { .. }
        ));
        let small = ProbeConfig { horizon: 1 << 12, ..ProbeConfig::default() };
        let zero = FinFun::constant(0, 2).unwrap();
        assert!(matches!(membership_probe(&zero, &sq, &small).unwrap(), ProbeVerdict::Inconclusive { .. }));
    }

    #[test]
    fn lift_examples() {
        let f = FinFun::parse("x + y").unwrap();
        let (lifted, rec) =
            shadow_witness_lift(&f, &ShadowSpec::new(vec![1, 2], vec![3]).unwrap(), &NatSet::evens(), 50).unwrap();
        assert!(rec.contained);
        assert!(lifted.contains(3).unwrap());
        let sq = NatSet::squares();
        let (lifted, _) =
            shadow_witness_lift(&FinFun::cantor_pair(), &ShadowSpec::new(vec![1, 2], vec![3]).unwrap(), &sq, 10).unwrap();
        assert_eq!(lifted.prefix_count(10).unwrap(), 5);
        let (same, _) = shadow_witness_lift(&f, &ShadowSpec::identity(2), &sq, 10).unwrap();
        assert_eq!(same, sq);
    }

    #[test]
    fn ak_flags_non_injective_gaps() {
        let f = FinFun::parse("x % 5").unwrap();
        let rec = ak_containments(&f, &NatSet::all(), 3, 100).unwrap();
        assert!(rec.lower_holds && rec.upper_holds);
        assert_eq!(rec.equality_gap, Some(0));
        let rec = ak_containments(&FinFun::identity(), &NatSet::squares(), 3, 100).unwrap();
        assert_eq!(rec.equality_gap, None);
    }
}
