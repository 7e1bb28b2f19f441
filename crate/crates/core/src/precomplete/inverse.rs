//! Right inverses of a binary function and the functions they generate.
//!
//! If `t(r_1(n), r_2(n)) = n` then any `u` equals `t(r_1∘u, r_2∘u)`.

use std::sync::Arc;

use serde::Serialize;

use super::PrecompleteError;
use crate::func::{compose, for_each_tuple, prefix_equal, FinFun, PrefixEquality};
use crate::natset::NatSet;
use crate::term::Term;

#[derive(Debug, Clone)]
pub struct RightInverse {
    /// Table lookups on `[0, n_out)`, 0 beyond.
    pub r1: FinFun,
    pub r2: FinFun,
    /// `pairs[n] = (r_1(n), r_2(n))`.
    pub pairs: Vec<(u64, u64)>,
    pub search_horizon: u64,
}

impl RightInverse {
    pub fn n_out(&self) -> u64 {
        self.pairs.len() as u64
    }

    /// Whether `t(r_1(n), r_2(n)) = n` for every tabulated `n`.
    pub fn law_holds(&self, t: &FinFun) -> bool {
        self.pairs.iter().enumerate().all(|(n, &(a, b))| t.call(&[a, b]) == n as u64)
    }
}

/// For each `n < n_out`, the lexicographically least `(z_1, z_2)` in
/// `(Z ∩ [0, search_horizon))²` with `t(z_1, z_2) = n`.
pub fn right_inverse(t: &FinFun, z: &NatSet, n_out: u64, search_horizon: u64) -> Result<RightInverse, PrecompleteError> {
    if t.arity() != 2 {
        return Err(PrecompleteError::Arity { expected: 2, got: t.arity() });
    }
    let zs = z.elements_below(search_horizon)?;
    let mut found: Vec<Option<(u64, u64)>> = vec![None; n_out as usize];
    let mut missing = n_out;
    'outer: for &a in &zs {
        for &b in &zs {
            let v = t.call(&[a, b]);
            if v < n_out && found[v as usize].is_none() {
                found[v as usize] = Some((a, b));
                missing -= 1;
                if missing == 0 {
                    break 'outer;
                }
            }
        }
    }
    if let Some(n) = found.iter().position(Option::is_none) {
        return Err(PrecompleteError::NoPreimage { n: n as u64, horizon: search_horizon });
    }
    let pairs: Vec<(u64, u64)> = found.into_iter().flatten().collect();
    let shared = Arc::new(pairs.clone());
    let lookup = |label: &str, second: bool| {
        let table = shared.clone();
        FinFun::host(1, label, move |x| {
            let p = usize::try_from(x[0]).ok().and_then(|i| table.get(i)).copied().unwrap_or((0, 0));
            if second { p.1 } else { p.0 }
        })
    };
    let (r1, r2) = (lookup("r1", false), lookup("r2", true));
    Ok(RightInverse { r1, r2, pairs, search_horizon })
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub fun: FinFun,
    pub term: Term,
    pub check: PrefixEquality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratedSummary {
    pub term: String,
    pub arity: usize,
    pub horizon: u64,
    pub equal: bool,
    pub witness: Option<Vec<u64>>,
}

impl Generated {
    pub fn summary(&self) -> GeneratedSummary {
        GeneratedSummary {
            term: self.term.to_string(),
            arity: self.fun.arity(),
            horizon: self.check.horizon,
            equal: self.check.equal,
            witness: self.check.witness.clone(),
        }
    }
}

/// Writes `u` as the term `t(r_1∘u, r_2∘u)` and compares it with `u` on `[0, n)^m`.
pub fn generate_function(t: &FinFun, r: &RightInverse, u: &FinFun, n: u64) -> Result<Generated, PrecompleteError> {
    if t.arity() != 2 {
        return Err(PrecompleteError::Arity { expected: 2, got: t.arity() });
    }
    let size = r.n_out();
    let mut gap = None;
    for_each_tuple(u.arity(), n, |x| {
        let v = u.call(x);
        if v >= size {
            gap = Some(PrecompleteError::RTableGap { value: v, at: x.to_vec(), size });
            false
        } else {
            true
        }
    });
    if let Some(e) = gap {
        return Err(e);
    }
    let m = u.arity();
    let vars = (1..=m).map(|j| Term::var(m, j)).collect::<Result<Vec<_>, _>>()?;
    let left = Term::app(&compose(&r.r1, std::slice::from_ref(u))?, vars.clone())?;
    let right = Term::app(&compose(&r.r2, std::slice::from_ref(u))?, vars)?;
    let term = Term::app(t, vec![left, right])?;
    let fun = term.to_fun();
    let check = prefix_equal(&fun, u, n)?;
    Ok(Generated { fun, term, check })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::cantor_unpair;

    #[test]
    fn cantor_inverse() {
        let r = right_inverse(&FinFun::cantor_pair(), &NatSet::all(), 100, 20).unwrap();
        for n in 0..100u64 {
            assert_eq!(r.pairs[n as usize], cantor_unpair(n));
        }
        assert!(r.law_holds(&FinFun::cantor_pair()));
    }

    #[test]
    fn constant_has_no_preimage_of_one() {
        let t = FinFun::constant(0, 2).unwrap();
        assert_eq!(
            right_inverse(&t, &NatSet::all(), 2, 50).unwrap_err(),
            PrecompleteError::NoPreimage { n: 1, horizon: 50 }
        );
    }

    #[test]
    fn generates_targets() {
        let t = FinFun::cantor_pair();
        let r = right_inverse(&t, &NatSet::all(), 2500, 80).unwrap();
        for (src, n) in [("identity", 50), ("x*x+1", 49), ("x+y", 30)] {
            let u = FinFun::parse(src).unwrap();
            let g = generate_function(&t, &r, &u, n).unwrap();
            assert!(g.check.equal, "{src}");
            assert_eq!(g.fun.arity(), u.arity());
        }
        let u = FinFun::parse("x*x+1").unwrap();
        assert!(matches!(generate_function(&t, &r, &u, 60), Err(PrecompleteError::RTableGap { value: 2501, .. })));
    }
}
