//! Pairing functions ℕ² → ℕ and their inverses, plus iterated tupling.
//!
//! The Szudzik ("elegant") pairing maps `[0, w²)` exactly onto the box
//! `[0, w)²`, which is what the tupling helpers rely on. Values saturate at
//! `u64::MAX` when the pair is too large to encode.

pub fn cantor_pair(x: u64, y: u64) -> u64 {
    let s = x as u128 + y as u128;
    let tri = if s % 2 == 0 { (s / 2).saturating_mul(s + 1) } else { s.saturating_mul(s.div_ceil(2)) };
    let v = tri.saturating_add(y as u128);
    v.min(u64::MAX as u128) as u64
}

pub fn cantor_unpair(z: u64) -> (u64, u64) {
    // Largest w with w(w+1)/2 ≤ z.
    let z128 = z as u128;
    let mut w = ((8 * z128 + 1).isqrt() - 1) / 2;
    while w * (w + 1) / 2 > z128 {
        w -= 1;
    }
    let y = z128 - w * (w + 1) / 2;
    ((w - y) as u64, y as u64)
}

pub fn szudzik_pair(x: u64, y: u64) -> u64 {
    let (x, y) = (x as u128, y as u128);
    let v = if x < y { y * y + x } else { (x * x).saturating_add(x).saturating_add(y) };
    v.min(u64::MAX as u128) as u64
}

pub fn szudzik_unpair(z: u64) -> (u64, u64) {
    let s = z.isqrt();
    let r = z - s * s;
    if r < s {
        (r, s)
    } else {
        (s, r - s)
    }
}

/// Decodes `z` into a `k`-tuple by iterating the Szudzik inverse on the
/// last component.
pub fn untuple(z: u64, k: usize) -> Vec<u64> {
    assert!(k >= 1);
    let mut out = Vec::with_capacity(k);
    let mut rest = z;
    for _ in 1..k {
        let (a, b) = szudzik_unpair(rest);
        out.push(a);
        rest = b;
    }
    out.push(rest);
    out
}

/// Inverse of [`untuple`].
pub fn tuple(xs: &[u64]) -> u64 {
    assert!(!xs.is_empty());
    let mut acc = *xs.last().unwrap();
    for &x in xs[..xs.len() - 1].iter().rev() {
        acc = szudzik_pair(x, acc);
    }
    acc
}

/// A bound `M` such that every tuple in `[0, s)^k` is `untuple(z, k)` for
/// some `z < M`. Saturates at `u64::MAX`.
pub fn tuple_box_bound(s: u64, k: usize) -> u64 {
    let mut m = s as u128;
    for _ in 1..k {
        m = m.saturating_mul(m);
        if m > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    m as u64
}
