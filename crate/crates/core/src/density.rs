//! Finite-horizon density statistics.
//!
//! Upper density is a limsup and is never computed here. An estimate is the
//! largest prefix ratio `|A ∩ [0, n)| / n` over an explicit list of horizons,
//! which is a witness value at those horizons and nothing more. Dyadic block
//! `k` is `[2^k, 2^{k+1})`.

use serde::Serialize;
use thiserror::Error;

use crate::func::FinFun;
use crate::natset::{NatSet, SetError};
use crate::rational::Rat;

/// Largest dyadic block index whose upper end still fits in `u64`.
pub const MAX_BLOCK: u32 = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("no horizons given")]
    EmptyHorizons,
    #[error("horizons must be positive and strictly increasing (got {0:?})")]
    BadHorizons(Vec<u64>),
    #[error("block index {0} exceeds {MAX_BLOCK}")]
    BlockTooLarge(u32),
    #[error("epsilon must be positive (got {0})")]
    NonPositiveEpsilon(Rat),
    #[error("scale horizon n/epsilon does not fit in 64 bits")]
    ScaleOverflow,
    #[error("function must be unary (arity {0})")]
    NotUnary(usize),
    #[error("precondition violated: f({x}) = {fx} is below {x} * {eps}")]
    PreconditionViolated { x: u64, fx: u64, eps: Rat },
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HorizonRow {
    pub n: u64,
    pub count: u64,
    pub ratio: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockRow {
    pub k: u32,
    pub count: u64,
    pub ratio: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub rows: Vec<HorizonRow>,
    /// Largest ratio among `rows`; a lower-bound witness, not the upper density.
    pub max_ratio: Rat,
    /// Smallest horizon attaining `max_ratio`.
    pub max_at: u64,
    /// Dyadic blocks lying entirely below the largest horizon.
    pub blocks: Vec<BlockRow>,
}

/// `|A ∩ [0, n)|`.
pub fn prefix_count(a: &NatSet, n: u64) -> Result<u64, SetError> {
    a.prefix_count(n)
}

/// `|A ∩ [2^k, 2^{k+1})|`.
pub fn block_count(a: &NatSet, k: u32) -> Result<u64, DensityError> {
    if k > MAX_BLOCK {
        return Err(DensityError::BlockTooLarge(k));
    }
    Ok(a.count_in(1 << k, 1 << (k + 1))?)
}

pub fn upper_density_estimate(a: &NatSet, horizons: &[u64]) -> Result<DensityReport, DensityError> {
    if horizons.is_empty() {
        return Err(DensityError::EmptyHorizons);
    }
    if horizons[0] == 0 || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DensityError::BadHorizons(horizons.to_vec()));
    }
    let mut rows = Vec::with_capacity(horizons.len());
    for &n in horizons {
        let count = a.prefix_count(n)?;
        rows.push(HorizonRow { n, count, ratio: Rat::new(count, n) });
    }
    let best = rows.iter().fold(&rows[0], |best, r| if r.ratio > best.ratio { r } else { best });
    let (max_ratio, max_at) = (best.ratio.clone(), best.n);

    let top = *horizons.last().unwrap();
    let mut blocks = Vec::new();
    let mut k = 0u32;
    while k <= MAX_BLOCK && (1u64 << (k + 1)) <= top {
        let count = block_count(a, k)?;
        blocks.push(BlockRow { k, count, ratio: Rat::new(count, 1 << k) });
        k += 1;
    }
    Ok(DensityReport { rows, max_ratio, max_at, blocks })
}

/// `|A ∩ [2^k, 2^{k+1})| / 2^k` for `k = 0..=k_max`.
pub fn dyadic_block_densities(a: &NatSet, k_max: u32) -> Result<Vec<Rat>, DensityError> {
    (0..=k_max).map(|k| Ok(Rat::new(block_count(a, k)?, 1 << k))).collect()
}

/// Outcome of [`scale_bound_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaleBoundRecord {
    pub n: u64,
    pub eps: Rat,
    /// `⌈n / ε⌉`, the prefix of the domain that can reach `[0, n)`.
    pub scaled: u64,
    /// `|f[A] ∩ [0, n)| / n`.
    pub lhs: Rat,
    /// `|A ∩ [0, ⌈n/ε⌉)| / n`.
    pub rhs: Rat,
    pub pass: bool,
}

/// Checks `|f[A] ∩ [0,n)| ≤ |A ∩ [0, n/ε)|` for a unary `f` with
/// `f(x) ≥ ε·x` on `[0, ⌈n/ε⌉)`; the lower bound itself is verified first.
pub fn scale_bound_check(f: &FinFun, a: &NatSet, eps: &Rat, n: u64) -> Result<ScaleBoundRecord, DensityError> {
    if f.arity() != 1 {
        return Err(DensityError::NotUnary(f.arity()));
    }
    if !eps.is_positive() {
        return Err(DensityError::NonPositiveEpsilon(eps.clone()));
    }
    let scaled = eps.ceil_div_of(n).ok_or(DensityError::ScaleOverflow)?;
    for x in 0..scaled {
        let fx = f.call1(x);
        if !eps.scaled_at_most(x, fx) {
            return Err(DensityError::PreconditionViolated { x, fx, eps: eps.clone() });
        }
    }
    let mut image: Vec<u64> = a.elements_below(scaled)?.into_iter().map(|x| f.call1(x)).filter(|&y| y < n).collect();
    image.sort_unstable();
    image.dedup();
    let below = a.prefix_count(scaled)?;
    let denom = n.max(1);
    let lhs = Rat::new(image.len() as u64, denom);
    let rhs = Rat::new(below, denom);
    let pass = lhs <= rhs;
    Ok(ScaleBoundRecord { n, eps: eps.clone(), scaled, lhs, rhs, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: u64, q: u64) -> Rat {
        Rat::new(p, q)
    }

    #[test]
    fn estimate_examples() {
        let e = upper_density_estimate(&NatSet::evens(), &[10, 100]).unwrap();
        assert_eq!(e.max_ratio, r(1, 2));
        let s = upper_density_estimate(&NatSet::squares(), &[100, 10000]).unwrap();
        assert_eq!(s.max_ratio, r(1, 10));
        assert_eq!(s.max_at, 100);
        let iv = NatSet::intervals(vec![(0, 8), (64, 128)]).unwrap();
        let t = upper_density_estimate(&iv, &[8, 128]).unwrap();
        assert_eq!((t.max_ratio.clone(), t.max_at), (r(1, 1), 8));
        assert_eq!(t.blocks.len(), 7);
        assert!(upper_density_estimate(&iv, &[]).is_err());
        assert!(upper_density_estimate(&iv, &[8, 8]).is_err());
        assert!(upper_density_estimate(&iv, &[0, 8]).is_err());
    }

    #[test]
    fn block_examples() {
        // [1, 2) holds no even number; every later block is exactly half full.
        assert_eq!(dyadic_block_densities(&NatSet::evens(), 3).unwrap(), vec![Rat::zero(), r(1, 2), r(1, 2), r(1, 2)]);
        let p = NatSet::powers(2).unwrap();
        assert_eq!(dyadic_block_densities(&p, 3).unwrap(), vec![r(1, 1), r(1, 2), r(1, 4), r(1, 8)]);
        assert!(dyadic_block_densities(&NatSet::empty(), 5).unwrap().iter().all(|x| *x == Rat::zero()));
        assert!(block_count(&NatSet::all(), 63).is_err());
    }

    #[test]
    fn scale_bound_examples() {
        let id = FinFun::identity();
        let rec = scale_bound_check(&id, &NatSet::evens(), &r(1, 1), 100).unwrap();
        assert_eq!((rec.lhs.clone(), rec.rhs.clone(), rec.pass), (r(1, 2), r(1, 2), true));

        let half = FinFun::parse("x / 2").unwrap();
        match scale_bound_check(&half, &NatSet::evens(), &r(1, 1), 100) {
            Err(DensityError::PreconditionViolated { x, fx, .. }) => assert_eq!((x, fx), (1, 0)),
            other => panic!("{other:?}"),
        }

        let double = FinFun::parse("2 * x").unwrap();
        let rec = scale_bound_check(&double, &NatSet::squares(), &r(2, 1), 200).unwrap();
        assert_eq!(rec.scaled, 100);
        assert!(rec.pass && rec.lhs <= rec.rhs);
    }

    #[test]
    fn blocks_sum_to_prefix_counts() {
        let sets = [NatSet::squares(), NatSet::evens(), NatSet::parse("union(powers:3, multiples:7)").unwrap()];
        for a in &sets {
            let mut acc = a.prefix_count(1).unwrap();
            for k in 0..16 {
                acc += block_count(a, k).unwrap();
                assert_eq!(acc, a.prefix_count(1 << (k + 1)).unwrap());
            }
        }
    }
}
