//! A map that inflates a set of positive density.
//!
//! Given `e ≥ 2` with `d̄(B) > 3/e`, there are infinitely many `n` with
//! `|B ∩ [n, en)| ≥ n`. Choosing such `n_1 < n_2 < ⋯` with pairwise disjoint
//! closed intervals `I_i = [n_i, e·n_i]` (so `n_{i+1} > e·n_i`), the map `f`
//! sends the first `n_i` elements of `B ∩ [n_i, e·n_i)` in increasing order
//! onto `n_i, …, 2n_i − 1` and fixes every other point. Counting uses the
//! half-open `[n_i, e·n_i)`; closedness only enters the disjointness rule.
//! The scan starts at `n = 2`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::PrecompleteError;
use crate::func::FinFun;
use crate::natset::NatSet;
use crate::rational::Rat;

/// Largest prefix ratio of `B` over the horizons `N, N/2, N/4, N/8` (those ≥ 1).
pub fn tail_density_estimate(b: &NatSet, horizon: u64) -> Result<Rat, PrecompleteError> {
    let mut best = Rat::zero();
    for shift in 0..4 {
        let n = horizon >> shift;
        if n == 0 {
            break;
        }
        let r = Rat::new(b.prefix_count(n)?, n);
        if r > best {
            best = r;
        }
    }
    Ok(best)
}

/// `|B ∩ [n, en)| ≥ |B ∩ [0, m)| − n − (m − en)` for `m ≥ en`.
pub fn counting_identity_holds(b: &NatSet, e: u64, n: u64, m: u64) -> Result<bool, PrecompleteError> {
    let en = e.checked_mul(n).ok_or_else(|| PrecompleteError::InvalidSequence("e*n overflows".into()))?;
    assert!(m >= en, "requires m >= e*n");
    let lhs = b.count_in(n, en)? as i128;
    let rhs = b.prefix_count(m)? as i128 - n as i128 - (m - en) as i128;
    Ok(lhs >= rhs)
}

/// Up to `count` admissible `n` with `e·n ≤ horizon`, least first.
pub fn select_intervals(b: &NatSet, e: u64, count: usize, horizon: u64) -> Result<Vec<u64>, PrecompleteError> {
    if e < 2 {
        return Err(PrecompleteError::InvalidSequence(format!("e = {e} must be at least 2")));
    }
    let mut out: Vec<u64> = Vec::new();
    let mut n = 2u64;
    while out.len() < count {
        let Some(en) = e.checked_mul(n).filter(|&en| en <= horizon) else { break };
        if b.count_in(n, en)? >= n {
            out.push(n);
            n = en + 1;
        } else {
            n += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LargeSetChecks {
    pub horizon: u64,
    /// First `x < horizon` with `e·f(x) < x`.
    pub scale_witness: Option<u64>,
    /// First interval index (0-based) whose `[n_i, 2n_i)` is not inside `f[B ∩ I_i]`.
    pub coverage_gap: Option<usize>,
    pub disjoint: bool,
    pub counts_ok: bool,
}

impl LargeSetChecks {
    pub fn pass(&self) -> bool {
        self.scale_witness.is_none() && self.coverage_gap.is_none() && self.disjoint && self.counts_ok
    }
}

#[derive(Debug, Clone)]
pub struct LargeSetMap {
    pub e: u64,
    pub n_seq: Vec<u64>,
    pub estimate: Rat,
    pub f: FinFun,
    /// Points moved by `f`, with their images.
    pub moved: Arc<BTreeMap<u64, u64>>,
    pub checks: LargeSetChecks,
}

impl LargeSetMap {
    pub fn is_identity(&self) -> bool {
        self.moved.iter().all(|(x, y)| x == y)
    }
}

/// Builds the map from the given intervals and verifies it below `horizon`.
pub fn map_from_intervals(b: &NatSet, e: u64, n_seq: Vec<u64>, estimate: Rat, horizon: u64) -> Result<LargeSetMap, PrecompleteError> {
    let mut moved = BTreeMap::new();
    let mut counts_ok = true;
    for &n in &n_seq {
        let elems = b.elements_in(n, e * n)?;
        if (elems.len() as u64) < n {
            counts_ok = false;
        }
        for (j, &x) in elems.iter().take(n as usize).enumerate() {
            moved.insert(x, n + j as u64);
        }
    }
    let moved = Arc::new(moved);
    let table = moved.clone();
    let label = format!("inflate[e={e};n={:?}]", n_seq);
    let f = FinFun::host(1, label, move |x| table.get(&x[0]).copied().unwrap_or(x[0]));

    let scale_witness = (0..horizon).find(|&x| (f.call1(x) as u128) * (e as u128) < x as u128);
    let mut coverage_gap = None;
    for (idx, &n) in n_seq.iter().enumerate() {
        let mut hit: Vec<u64> = b.elements_in(n, e * n + 1)?.into_iter().map(|x| f.call1(x)).collect();
        hit.sort_unstable();
        if (n..2 * n).any(|v| hit.binary_search(&v).is_err()) {
            coverage_gap = Some(idx);
            break;
        }
    }
    let disjoint = n_seq.windows(2).all(|w| w[1] > e * w[0]);
    let checks = LargeSetChecks { horizon, scale_witness, coverage_gap, disjoint, counts_ok };
    Ok(LargeSetMap { e, n_seq, estimate, f, moved, checks })
}

/// Selects exactly `count` intervals below `horizon` and builds the map.
pub fn build_large_set_map(b: &NatSet, e: u64, count: usize, horizon: u64) -> Result<LargeSetMap, PrecompleteError> {
    let estimate = tail_density_estimate(b, horizon)?;
    if !(estimate > Rat::new(3, e.max(1))) {
        return Err(PrecompleteError::PremiseUnmet { estimate, e });
    }
    let n_seq = select_intervals(b, e, count, horizon)?;
    if n_seq.len() < count {
        return Err(PrecompleteError::NotEnoughIntervals { found: n_seq.len(), wanted: count, horizon });
    }
    map_from_intervals(b, e, n_seq, estimate, horizon)
}
