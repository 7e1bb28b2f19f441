//! Reduction of a `k`-ary function to a unary one.
//!
//! With `a_0 < a_1 < ⋯` the enumeration of `A` and `untuple` the iterated
//! Szudzik decoding, `f_i(a_m) = a_{untuple(m, k)_i}` and `f_i(x) = 0` off
//! `A`. Then `n ↦ (f_1(n), …, f_k(n))` is a bijection from `A` onto `A^k`
//! and `h = g(f_1, …, f_k)` satisfies `h[A] = g[A^k]`.
//!
//! Index tables for `k = 2` (index `m` ↦ tuple of enumeration positions):
//!
//! ```text
//! m      0     1     2     3     4     5     6     7     8
//! tuple  (0,0) (0,1) (1,0) (1,1) (0,2) (1,2) (2,0) (2,1) (2,2)
//! ```
//!
//! Indices below `s²` fill the box `[0, s)²` exactly; for `k` components
//! the box `[0, s)^k` is filled by indices below `s^{2^{k-1}}`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::PrecompleteError;
use crate::func::{compose, FinFun};
use crate::ideal::image_below;
use crate::natset::NatSet;
use crate::pairing::{tuple_box_bound, untuple};

#[derive(Debug, Clone)]
pub struct Unarization {
    pub k: usize,
    pub components: Vec<FinFun>,
    pub h: FinFun,
    pub report: UnarizationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnarizationReport {
    pub k: usize,
    pub horizon: u64,
    /// `|A ∩ [0, horizon)|`.
    pub enumerated: u64,
    /// Largest `s` whose tuple box `[0, s)^k` is indexed below `enumerated`.
    pub box_side: u64,
    pub index_bound: u64,
    /// `h[A ∩ [0, horizon)] ⊆ g[(A ∩ [0, horizon))^k]`.
    pub image_contained: bool,
    /// Every `g`-value of a box tuple is attained by `h` on the enumerated part.
    pub box_covered: bool,
}

/// Positions `(m, untuple(m, k))` for `m < count`.
pub fn index_map(count: u64, k: usize) -> impl Iterator<Item = (u64, Vec<u64>)> {
    (0..count).map(move |m| (m, untuple(m, k)))
}

pub fn unarize(g: &FinFun, a: &NatSet, horizon: u64) -> Result<Unarization, PrecompleteError> {
    let k = g.arity();
    let elems = a.elements_below(horizon)?;
    let count = elems.len() as u64;
    if count == 0 {
        return Err(PrecompleteError::SetTooSmall { found: 0, horizon });
    }
    // Szudzik components never exceed the index, so every position is enumerated.
    let elems = Arc::new(elems);
    let position: Arc<HashMap<u64, u64>> = Arc::new(elems.iter().enumerate().map(|(m, &x)| (x, m as u64)).collect());
    let set = a.clone();
    let components: Vec<FinFun> = (0..k)
        .map(|i| {
            let (elems, position, set) = (elems.clone(), position.clone(), set.clone());
            FinFun::host(1, format!("unarize-component[{}/{k}]", i + 1), move |x| {
                let m = match position.get(&x[0]) {
                    Some(&m) => m,
                    None if set.contains(x[0]).unwrap_or(false) => match set.prefix_count(x[0]) {
                        Ok(m) => m,
                        Err(_) => return 0,
                    },
                    None => return 0,
                };
                let j = untuple(m, k)[i];
                match elems.get(j as usize) {
                    Some(&v) => v,
                    None => set.nth(j).ok().flatten().unwrap_or(0),
                }
            })
        })
        .collect();
    let h = compose(g, &components)?;

    let mut side = 0u64;
    while tuple_box_bound(side + 1, k) <= count {
        side += 1;
    }
    let index_bound = tuple_box_bound(side, k);

    // Each h(a_m) must be g at a tuple of enumerated elements.
    let image_contained = elems.iter().all(|&x| {
        let args: Vec<u64> = components.iter().map(|c| c.call1(x)).collect();
        args.iter().all(|v| position.contains_key(v)) && g.call(&args) == h.call1(x)
    });
    let h_image = image_below(&h, &elems, u64::MAX);
    let box_elems = &elems[..side as usize];
    let box_image = image_below(g, box_elems, u64::MAX);
    let box_covered = box_image.iter().all(|y| h_image.binary_search(y).is_ok());

    let report = UnarizationReport { k, horizon, enumerated: count, box_side: side, index_bound, image_contained, box_covered };
    Ok(Unarization { k, components, h, report })
}
