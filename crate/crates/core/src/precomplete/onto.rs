//! A binary map from `C × D` onto ℕ, with `C = ⋃ [n_i, 2n_i)` and `D` of
//! upper density zero.
//!
//! With `n_0 = 2` imposed and `n_1 ≥ 2`, for every block `k ≥ 1`:
//!
//! * `i(k)` is the largest `i ≥ 1` with `n_i ≤ 2^k`, or `1` when `n_1 > 2^k`
//!   (so the first coordinate always ranges over a piece of `C`);
//! * `d_k = ⌈2^k / n_{i(k)}⌉` and `D_k = (2^k − d_k, 2^k]`;
//! * `R_k = [n_{i(k)}, 2n_{i(k)}) × D_k`, read row by row (first coordinate
//!   slowest); `S_k` is its first `2^k` pairs and the `j`-th of them maps
//!   to `2^k + j`.
//!
//! Every other pair maps to 0, except one designated pair mapped to 1: the
//! first pair of `R_k ∖ S_k` for the lowest `k` where that is nonempty, or,
//! failing that, the least pair of `C × D_k` outside `S_k` (block, then first
//! coordinate, then second), provided another such pair keeps 0 in the
//! image. Blocks run up to `k_max`; `h` is 0 beyond them.

use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::Serialize;

use super::PrecompleteError;
use crate::func::FinFun;
use crate::natset::NatSet;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OntoBlock {
    pub k: u32,
    /// 1-based index `i(k)`.
    pub i_k: usize,
    /// `n_{i(k)}`.
    pub n: u64,
    pub d: u64,
    /// `D_k = [d_lo, d_hi]`.
    pub d_lo: u64,
    pub d_hi: u64,
    /// `|R_k| = n_{i(k)} · d_k`.
    pub r_size: u64,
}

impl OntoBlock {
    fn new(n_seq: &[u64], k: u32) -> Self {
        let p = 1u64 << k;
        let i_k = n_seq.partition_point(|&n| n <= p).max(1);
        let n = n_seq[i_k - 1];
        let d = p.div_ceil(n);
        OntoBlock { k, i_k, n, d, d_lo: p - d + 1, d_hi: p, r_size: n * d }
    }

    pub fn surplus(&self) -> u64 {
        self.r_size - (1 << self.k)
    }

    /// Index of `(x, y)` in the row-major order of `R_k`, if it lies there.
    fn index_of(&self, x: u64, y: u64) -> Option<u64> {
        if x < self.n || x >= 2 * self.n || y < self.d_lo || y > self.d_hi {
            return None;
        }
        Some((x - self.n) * self.d + (y - self.d_lo))
    }

    fn pair_at(&self, j: u64) -> (u64, u64) {
        (self.n + j / self.d, self.d_lo + j % self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OnePair {
    pub x: u64,
    pub y: u64,
    pub k: u32,
    /// True when taken from `R_k ∖ S_k`, false for the fallback pair.
    pub surplus: bool,
}

#[derive(Debug, Clone)]
pub struct OntoConstruction {
    pub n_seq: Vec<u64>,
    pub k_max: u32,
    pub blocks: Vec<OntoBlock>,
    pub one_pair: Option<OnePair>,
    pub h: FinFun,
    /// Sorted elements of `D = ⋃_{k ≤ k_max} D_k`.
    pub d_elems: Vec<u64>,
}

fn block_of(y: u64) -> Option<u32> {
    if y < 2 {
        return None;
    }
    Some(64 - (y - 1).leading_zeros())
}

/// `h` without the designated pair.
fn base_value(blocks: &[OntoBlock], x: u64, y: u64) -> u64 {
    let Some(k) = block_of(y) else { return 0 };
    let Some(b) = blocks.get(k as usize - 1) else { return 0 };
    match b.index_of(x, y) {
        Some(j) if j < 1 << k => (1 << k) + j,
        _ => 0,
    }
}

fn c_contains(n_seq: &[u64], x: u64) -> bool {
    let i = n_seq.partition_point(|&n| n <= x);
    i > 0 && x < 2 * n_seq[i - 1]
}

fn c_elements_below(n_seq: &[u64], limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut last = 0u64;
    for &n in n_seq {
        let lo = n.max(last);
        let hi = (2 * n).min(limit);
        if lo < hi {
            out.extend(lo..hi);
            last = hi;
        }
    }
    out
}

fn c_domain(n_seq: &[u64], blocks: &[OntoBlock]) -> Vec<u64> {
    let limit = blocks.iter().map(|b| 2 * b.n).max().unwrap_or(0);
    let mut xs = c_elements_below(n_seq, limit);
    let next = if c_contains(n_seq, limit) { Some(limit) } else { n_seq.iter().copied().find(|&n| n > limit) };
    xs.extend(next);
    xs
}

impl OntoConstruction {
    pub fn block(&self, k: u32) -> Option<&OntoBlock> {
        if k == 0 {
            None
        } else {
            self.blocks.get(k as usize - 1)
        }
    }

    pub fn c_contains(&self, x: u64) -> bool {
        c_contains(&self.n_seq, x)
    }

    /// Elements of `C` below `limit`.
    pub fn c_elements_below(&self, limit: u64) -> Vec<u64> {
        c_elements_below(&self.n_seq, limit)
    }

    /// `C` below the first coordinates used by the blocks, plus the next
    /// element of `C` if there is one, so that some first coordinate outside
    /// every block is present.
    pub fn c_domain(&self) -> Vec<u64> {
        c_domain(&self.n_seq, &self.blocks)
    }

    pub fn d_set(&self) -> NatSet {
        NatSet::from_sorted(self.d_elems.clone()).expect("D is sorted")
    }
}

pub fn build_onto_construction(n_seq: &[u64], k_max: u32) -> Result<OntoConstruction, PrecompleteError> {
    if n_seq.is_empty() {
        return Err(PrecompleteError::InvalidSequence("empty sequence".into()));
    }
    if n_seq[0] < 2 {
        return Err(PrecompleteError::InvalidSequence(format!("n_1 = {} must be at least 2", n_seq[0])));
    }
    if n_seq.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PrecompleteError::InvalidSequence("sequence must be strictly increasing".into()));
    }
    if k_max > 40 {
        return Err(PrecompleteError::InvalidSequence(format!("k_max = {k_max} exceeds 40")));
    }
    if n_seq.last().is_some_and(|&n| n > u64::MAX / 4) {
        return Err(PrecompleteError::InvalidSequence("sequence entries too large".into()));
    }
    let blocks: Vec<OntoBlock> = (1..=k_max).map(|k| OntoBlock::new(n_seq, k)).collect();
    let d_elems: Vec<u64> = blocks.iter().flat_map(|b| b.d_lo..=b.d_hi).collect();

    let mut one_pair = blocks.iter().find(|b| b.surplus() > 0).map(|b| {
        let (x, y) = b.pair_at(1 << b.k);
        OnePair { x, y, k: b.k, surplus: true }
    });
    if one_pair.is_none() {
        let xs = c_domain(n_seq, &blocks);
        let mut zeros = blocks
            .iter()
            .flat_map(|b| xs.iter().flat_map(move |&x| (b.d_lo..=b.d_hi).map(move |y| (b.k, x, y))))
            .filter(|&(_, x, y)| base_value(&blocks, x, y) == 0);
        if let (Some((k, x, y)), Some(_)) = (zeros.next(), zeros.next()) {
            one_pair = Some(OnePair { x, y, k, surplus: false });
        }
    }

    let shared = Arc::new(blocks.clone());
    let one = one_pair.map(|p| (p.x, p.y));
    let label = format!("onto[n={:?};k_max={k_max}]", n_seq);
    let h = FinFun::host(2, label, move |args| {
        if Some((args[0], args[1])) == one {
            1
        } else {
            base_value(&shared, args[0], args[1])
        }
    });
    Ok(OntoConstruction { n_seq: n_seq.to_vec(), k_max, blocks, one_pair, h, d_elems })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OntoVerification {
    pub k_max: u32,
    /// Values `{0} ∪ [2, target_end)` are required, and 1 when a pair was designated.
    pub target_end: u64,
    pub first_gap: Option<u64>,
    pub zero_covered: bool,
    pub one_covered: bool,
    pub invariant_violations: Vec<String>,
    pub pass: bool,
}

fn block_invariants(oc: &OntoConstruction, k_max: u32) -> Vec<String> {
    let mut bad = Vec::new();
    let mut prev_i = 0usize;
    for b in oc.blocks.iter().take(k_max as usize) {
        let p = 1u64 << b.k;
        if b.i_k < prev_i {
            bad.push(format!("k = {}: i(k) decreases", b.k));
        }
        prev_i = b.i_k;
        if b.d < 1 || b.d > p / 2 {
            bad.push(format!("k = {}: d_k = {} outside [1, 2^(k-1)]", b.k, b.d));
        }
        if b.d != p.div_ceil(b.n) || b.d_hi - b.d_lo + 1 != b.d {
            bad.push(format!("k = {}: D_k has the wrong size", b.k));
        }
        if b.r_size < p || b.r_size > p + b.n {
            bad.push(format!("k = {}: |R_k| = {} outside [2^k, 2^k + n]", b.k, b.r_size));
        }
        if b.k > 1 && b.d_lo <= p / 2 {
            bad.push(format!("k = {}: D_k overlaps D_(k-1)", b.k));
        }
        // g_k: the selected pairs hit [2^k, 2^{k+1}) exactly once each.
        let mut seen = vec![false; p as usize];
        for j in 0..p {
            let (x, y) = b.pair_at(j);
            let v = base_value(&oc.blocks, x, y);
            if v < p || v >= 2 * p || std::mem::replace(&mut seen[(v - p) as usize], true) {
                bad.push(format!("k = {}: g_k is not a bijection at ({x}, {y})", b.k));
                break;
            }
        }
    }
    bad
}

/// Evaluates `h` on `c_domain() × (D_1 ∪ ⋯ ∪ D_k_max)` and checks
/// that the image contains `{0} ∪ [2, 2^{k_max+1})`, and 1 when designated.
pub fn verify_onto(oc: &OntoConstruction, k_max: u32) -> OntoVerification {
    let k_max = k_max.min(oc.k_max);
    let target_end = if k_max == 0 { 0 } else { 1u64 << (k_max + 1) };
    let mut covered = vec![false; target_end as usize];
    let xs = oc.c_domain();
    let ys: Vec<u64> = oc.blocks.iter().take(k_max as usize).flat_map(|b| b.d_lo..=b.d_hi).collect();
    for &x in &xs {
        for &y in &ys {
            let v = oc.h.call(&[x, y]);
            if v < target_end {
                covered[v as usize] = true;
            }
        }
    }
    let zero_covered = k_max == 0 || covered[0];
    let one_covered = k_max >= 1 && covered[1];
    let first_gap = if k_max == 0 {
        None
    } else if !covered[0] {
        Some(0)
    } else if oc.one_pair.is_some() && !covered[1] {
        Some(1)
    } else {
        (2..target_end).find(|&v| !covered[v as usize])
    };
    let invariant_violations = block_invariants(oc, k_max);
    let pass = first_gap.is_none() && invariant_violations.is_empty();
    OntoVerification { k_max, target_end, first_gap, zero_covered, one_covered, invariant_violations, pass }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DBlockRow {
    pub k: u32,
    /// `|D ∩ [2^k, 2^{k+1})|`.
    pub count: u64,
    /// `d_{k+1} = ⌈2^{k+1} / n_{i(k+1)}⌉`.
    pub expected: u64,
    pub ratio: Rat,
    /// `2 / n_{i(k+1)} + 2^{-k}`.
    pub bound: Rat,
    pub exact: bool,
    pub within: bool,
}

/// Dyadic densities of `D` for `k = 1..k_max` (block `k + 1` must exist).
pub fn d_block_rows(oc: &OntoConstruction) -> Vec<DBlockRow> {
    (1..oc.k_max)
        .map(|k| {
            let (lo, hi) = (1u64 << k, 1u64 << (k + 1));
            let count = (oc.d_elems.partition_point(|&y| y < hi) - oc.d_elems.partition_point(|&y| y < lo)) as u64;
            let next = &oc.blocks[k as usize];
            let expected = hi.div_ceil(next.n);
            let ratio = Rat::new(count, lo);
            // 2/n + 1/2^k = (2^{k+1} + n) / (n 2^k)
            let bound = Rat::new(hi + next.n, next.n * lo);
            DBlockRow { k, count, expected, within: ratio <= bound, exact: count == expected, ratio, bound }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealRow {
    pub k: u32,
    /// `|T ∩ [n_{i(k)}, 2n_{i(k)})| ≤ n_{i(k)}·ε`.
    pub premise_first: bool,
    /// `|T ∩ D_k| ≤ d_k`.
    pub premise_second: bool,
    /// `|h[(T × T) ∩ R_k]|`, computed when both premises hold.
    pub image_count: Option<u64>,
    /// `2ε·2^k`.
    pub bound: Rat,
    pub holds: Option<bool>,
}

pub fn verify_onto_preserves_ideal(
    oc: &OntoConstruction,
    t: &NatSet,
    eps: &Rat,
    ks: RangeInclusive<u32>,
) -> Result<Vec<IdealRow>, PrecompleteError> {
    let mut rows = Vec::new();
    for k in ks {
        let Some(b) = oc.block(k) else { continue };
        let p = 1u64 << k;
        let bound = Rat::from_big(eps.inner() * num_rational::BigRational::from_integer((2 * p).into()));
        let xs = t.elements_in(b.n, 2 * b.n)?;
        let ys = t.elements_in(b.d_lo, b.d_hi + 1)?;
        let premise_first = eps.bounds_count(xs.len() as u64, b.n);
        let premise_second = ys.len() as u64 <= b.d;
        let (image_count, holds) = if premise_first && premise_second {
            let mut vals: Vec<u64> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| oc.h.call(&[x, y])).collect();
            vals.sort_unstable();
            vals.dedup();
            let c = vals.len() as u64;
            (Some(c), Some(Rat::from_integer(c) <= bound))
        } else {
            (None, None)
        };
        rows.push(IdealRow { k, premise_first, premise_second, image_count, bound, holds });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow2(len: u32) -> Vec<u64> {
        (1..=len).map(|i| 1u64 << i).collect()
    }

    fn linear3(len: u64) -> Vec<u64> {
        (1..=len).map(|i| 3 * i).collect()
    }

    #[test]
    fn powers_of_two_blocks() {
        let oc = build_onto_construction(&pow2(20), 10).unwrap();
        for b in &oc.blocks {
            assert_eq!((b.i_k as u32, b.d, b.d_lo, b.surplus()), (b.k, 1, 1 << b.k, 0));
        }
        for x in 1024..2048 {
            assert_eq!(oc.h.call(&[x, 1024]), x);
        }
        let p = oc.one_pair.unwrap();
        assert!(!p.surplus);
        assert_eq!((p.x, p.y), (4, 2));
        let v = verify_onto(&oc, 10);
        assert!(v.pass && v.one_covered, "{v:?}");
    }

    #[test]
    fn linear_blocks() {
        let oc = build_onto_construction(&linear3(400), 8).unwrap();
        let b2 = oc.block(2).unwrap();
        assert_eq!((b2.i_k, b2.d, b2.d_lo, b2.d_hi), (1, 2, 3, 4));
        let s2: Vec<u64> = [(3, 3), (3, 4), (4, 3), (4, 4)].iter().map(|&(x, y)| oc.h.call(&[x, y])).collect();
        assert_eq!(s2, vec![4, 5, 6, 7]);
        let b1 = oc.block(1).unwrap();
        assert_eq!((b1.i_k, b1.d, b1.d_lo), (1, 1, 2));
        let p = oc.one_pair.unwrap();
        assert_eq!((p.x, p.y, p.k, p.surplus), (5, 2, 1, true));
        assert!(verify_onto(&oc, 8).pass);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(build_onto_construction(&[], 3).is_err());
        assert!(build_onto_construction(&[1, 5], 3).is_err());
        assert!(build_onto_construction(&[4, 4], 3).is_err());
        let oc = build_onto_construction(&[2, 4], 0).unwrap();
        let v = verify_onto(&oc, 0);
        assert!(v.pass);
        let oc = build_onto_construction(&[2, 4], 1).unwrap();
        assert!(oc.one_pair.is_none());
        let v = verify_onto(&oc, 1);
        assert!(v.pass && !v.one_covered);
    }

    #[test]
    fn d_rows_match_next_block() {
        for seq in [pow2(20), linear3(20_000)] {
            let oc = build_onto_construction(&seq, 15).unwrap();
            let rows = d_block_rows(&oc);
            assert_eq!(rows.len(), 14);
            assert!(rows.iter().all(|r| r.exact && r.within), "{rows:?}");
        }
    }

    #[test]
    fn ideal_rows() {
        let oc = build_onto_construction(&pow2(20), 14).unwrap();
        let empty = verify_onto_preserves_ideal(&oc, &NatSet::empty(), &Rat::new(1, 8), 10..=14).unwrap();
        assert!(empty.iter().all(|r| r.holds == Some(true)));
        let all = verify_onto_preserves_ideal(&oc, &NatSet::all(), &Rat::new(1, 8), 10..=14).unwrap();
        assert!(all.iter().all(|r| !r.premise_first && r.holds.is_none()));
    }
}
