//! Shadow specifications `(π, ā)`.
//!
//! For a `k`-ary `f`, the shadow `f_{π,ā}` has arity `k − ℓ` with `ℓ = |ā| < k`
//! and is `y ↦ f(x_{π(1)}, …, x_{π(k)})` where `x = ā ++ y`. Permutations are
//! stored 0-based; the text form is 1-based, e.g. `[2,1|5]` for `π = (2 1)`
//! with first variable fixed to 5.

use std::fmt;

use crate::func::FunError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShadowSpec {
    perm: Vec<usize>,
    prefix: Vec<u64>,
}

impl ShadowSpec {
    /// `perm` in 1-based one-line notation.
    pub fn new(perm: Vec<usize>, prefix: Vec<u64>) -> Result<Self, FunError> {
        let k = perm.len();
        let mut seen = vec![false; k];
        for &p in &perm {
            if p == 0 || p > k || seen[p - 1] {
                return Err(FunError::InvalidPermutation(perm));
            }
            seen[p - 1] = true;
        }
        if !prefix.is_empty() && prefix.len() >= k {
            return Err(FunError::PrefixTooLong { fixed: prefix.len(), arity: k });
        }
        Ok(ShadowSpec { perm: perm.into_iter().map(|p| p - 1).collect(), prefix })
    }

    pub fn identity(k: usize) -> Self {
        ShadowSpec { perm: (0..k).collect(), prefix: Vec::new() }
    }

    /// 0-based images: argument `i` of the base function is `x[perm[i]]`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn arity(&self) -> usize {
        self.perm.len()
    }

    pub(crate) fn is_identity_improper(&self) -> bool {
        self.prefix.is_empty() && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub(crate) fn validate(&self, arity: usize) -> Result<(), FunError> {
        if self.perm.len() != arity {
            return Err(FunError::ArityMismatch { expected: arity, got: self.perm.len() });
        }
        if self.prefix.len() >= arity {
            return Err(FunError::PrefixTooLong { fixed: self.prefix.len(), arity });
        }
        Ok(())
    }

    /// The single spec equivalent to applying `self` and then `next` to the
    /// resulting shadow: `σ = τ∘π` with `τ` fixing the first `ℓ` places and
    /// acting as `ℓ + π′(· − ℓ)` on the rest, and `c̄ = ā ++ ā′`.
    pub fn then(&self, next: &ShadowSpec) -> Result<ShadowSpec, FunError> {
        let l = self.prefix.len();
        next.validate(self.arity() - l)?;
        let tau = |p: usize| if p < l { p } else { l + next.perm[p - l] };
        let perm = self.perm.iter().map(|&p| tau(p)).collect();
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&next.prefix);
        Ok(ShadowSpec { perm, prefix })
    }
}

impl fmt::Display for ShadowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let perm: Vec<String> = self.perm.iter().map(|p| (p + 1).to_string()).collect();
        let prefix: Vec<String> = self.prefix.iter().map(u64::to_string).collect();
        write!(f, "[{}|{}]", perm.join(","), prefix.join(","))
    }
}

/// Rearranges `v` into the next permutation in lexicographic order.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Every spec for arity `k` with prefix values below `bound`.
///
/// Order: permutations lexicographically (one-line notation), then prefix
/// length ascending, then prefixes lexicographically. There are
/// `k! · Σ_{ℓ<k} bound^ℓ` of them.
pub fn enumerate_shadow_specs(k: usize, bound: u64) -> Vec<ShadowSpec> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        for l in 0..k {
            crate::func::for_each_tuple(l, bound.max(if l == 0 { 1 } else { 0 }), |a| {
                out.push(ShadowSpec { perm: perm.clone(), prefix: a.to_vec() });
                true
            });
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{shadow, FinFun};

    #[test]
    fn cantor_shadow_example() {
        let pi = FinFun::cantor_pair();
        let s = ShadowSpec::new(vec![2, 1], vec![3]).unwrap();
        let sh = shadow(&pi, &s).unwrap();
        assert_eq!(sh.arity(), 1);
        for y in 0..20 {
            assert_eq!(sh.call1(y), pi.call(&[y, 3]));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ShadowSpec::new(vec![1, 1], vec![]).is_err());
        assert!(ShadowSpec::new(vec![1, 3], vec![]).is_err());
        assert!(ShadowSpec::new(vec![1, 2], vec![0, 0]).is_err());
        let s = ShadowSpec::new(vec![1, 2, 3], vec![]).unwrap();
        assert!(shadow(&FinFun::cantor_pair(), &s).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let specs = enumerate_shadow_specs(2, 3);
        assert_eq!(specs.len(), 2 * (1 + 3));
        assert_eq!(specs[0].to_string(), "[1,2|]");
        assert_eq!(specs[1].to_string(), "[1,2|0]");
        assert_eq!(specs[4].to_string(), "[2,1|]");
        assert_eq!(enumerate_shadow_specs(3, 2).len(), 6 * (1 + 2 + 4));
        assert_eq!(enumerate_shadow_specs(1, 5).len(), 1);
    }

    #[test]
    fn composition_of_shadows() {
        let f = FinFun::parse("x1 + 10*x2 + 100*x3").unwrap();
        let a = ShadowSpec::new(vec![3, 1, 2], vec![4]).unwrap();
        let b = ShadowSpec::new(vec![2, 1], vec![7]).unwrap();
        let two_step = shadow(&shadow(&f, &a).unwrap(), &b).unwrap();
        let combined = shadow(&f, &a.then(&b).unwrap()).unwrap();
        for y in 0..10 {
            assert_eq!(two_step.call1(y), combined.call1(y));
        }
    }
}
