//! Finitary functions on ℕ.
//!
//! A [`FinFun`] is an immutable, cheaply clonable handle around an evaluator
//! of fixed arity `k ≥ 1`. Evaluators are expressions, finite tables with a
//! default value, a few named functions, compositions, shadows, or closures
//! supplied by the constructions elsewhere in the crate. All of them are
//! total and deterministic.
//!
//! Function specifications:
//!
//! ```text
//! fun := "identity" | "sqrt-indicator" | "cantor-pair" | "szudzik-pair"
//!      | "const:" nat [ "/" nat ]          value, arity (default 1)
//!      | "proj:" nat "," nat               arity n, index j (1 ≤ j ≤ n)
//!      | "table[" nat "]:" nat { ";" row }  arity, default value
//!      | "expr[" nat "]:" expr             expression with explicit arity
//!      | "expr:" expr                      arity = highest variable (at least 1)
//!      | expr                              same as "expr:"
//! row := "(" nat { "," nat } ")" "->" nat
//! ```
//!
//! `sqrt-indicator` maps a perfect square `s²` to `s` and everything else to 0.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{parse_expr, Expr};
use crate::pairing;
use crate::parse::{Cursor, ParseError};
use crate::shadow::ShadowSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("shadow fixes {fixed} variables of a {arity}-ary function")]
    PrefixTooLong { fixed: usize, arity: usize },
    #[error("invalid function: {0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Named {
    Identity,
    SqrtIndicator,
    Const(u64),
    /// 1-based projection index.
    Projection(usize),
    CantorPair,
    SzudzikPair,
}

type HostFn = dyn Fn(&[u64]) -> u64 + Send + Sync;

#[derive(Clone)]
pub enum Body {
    Expr(Expr),
    Table { entries: BTreeMap<Vec<u64>, u64>, default: u64 },
    Named(Named),
    Compose { outer: FinFun, inners: Vec<FinFun> },
    Shadow { base: FinFun, spec: ShadowSpec },
    Host(Arc<HostFn>),
}

struct Inner {
    arity: usize,
    label: String,
    body: Body,
}

#[derive(Clone)]
pub struct FinFun(Arc<Inner>);

impl fmt::Debug for FinFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinFun[{}]({})", self.0.arity, self.0.label)
    }
}

impl fmt::Display for FinFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.label)
    }
}

pub fn sqrt_indicator(x: u64) -> u64 {
    let r = x.isqrt();
    if r * r == x {
        r
    } else {
        0
    }
}

impl FinFun {
    fn build(arity: usize, label: String, body: Body) -> Self {
        FinFun(Arc::new(Inner { arity, label, body }))
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn body(&self) -> &Body {
        &self.0.body
    }

    pub fn identity() -> Self {
        Self::build(1, "identity".into(), Body::Named(Named::Identity))
    }

    pub fn sqrt_indicator() -> Self {
        Self::build(1, "sqrt-indicator".into(), Body::Named(Named::SqrtIndicator))
    }

    pub fn constant(value: u64, arity: usize) -> Result<Self, FunError> {
        if arity == 0 {
            return Err(FunError::Invalid("arity must be at least 1".into()));
        }
        let label = if arity == 1 { format!("const:{value}") } else { format!("const:{value}/{arity}") };
        Ok(Self::build(arity, label, Body::Named(Named::Const(value))))
    }

    /// The projection `(x_1, …, x_n) ↦ x_j`.
    pub fn projection(n: usize, j: usize) -> Result<Self, FunError> {
        if j == 0 || j > n {
            return Err(FunError::Invalid(format!("projection index {j} outside 1..={n}")));
        }
        Ok(Self::build(n, format!("proj:{n},{j}"), Body::Named(Named::Projection(j))))
    }

    pub fn cantor_pair() -> Self {
        Self::build(2, "cantor-pair".into(), Body::Named(Named::CantorPair))
    }

    pub fn szudzik_pair() -> Self {
        Self::build(2, "szudzik-pair".into(), Body::Named(Named::SzudzikPair))
    }

    /// An expression function; `arity` must cover every variable it uses.
    pub fn from_expr(expr: Expr, arity: usize) -> Result<Self, FunError> {
        if arity == 0 || expr.max_var() > arity {
            return Err(FunError::Invalid(format!(
                "expression uses x{} but arity is {arity}",
                expr.max_var().max(1)
            )));
        }
        let label = if arity == expr.max_var().max(1) { format!("expr:{expr}") } else { format!("expr[{arity}]:{expr}") };
        Ok(Self::build(arity, label, Body::Expr(expr)))
    }

    pub fn table(arity: usize, entries: BTreeMap<Vec<u64>, u64>, default: u64) -> Result<Self, FunError> {
        if arity == 0 {
            return Err(FunError::Invalid("arity must be at least 1".into()));
        }
        if let Some(bad) = entries.keys().find(|k| k.len() != arity) {
            return Err(FunError::ArityMismatch { expected: arity, got: bad.len() });
        }
        let mut label = format!("table[{arity}]:{default}");
        for (k, v) in &entries {
            let args: Vec<String> = k.iter().map(u64::to_string).collect();
            label.push_str(&format!(";({})->{v}", args.join(",")));
        }
        Ok(Self::build(arity, label, Body::Table { entries, default }))
    }

    /// A unary table, convenient for tabulated maps.
    pub fn unary_table(entries: impl IntoIterator<Item = (u64, u64)>, default: u64) -> Self {
        let map = entries.into_iter().map(|(k, v)| (vec![k], v)).collect();
        Self::table(1, map, default).expect("unary table")
    }

    /// A closure-backed function. The closure must be pure and total.
    pub fn host(arity: usize, label: impl Into<String>, f: impl Fn(&[u64]) -> u64 + Send + Sync + 'static) -> Self {
        assert!(arity >= 1, "arity must be at least 1");
        Self::build(arity, label.into(), Body::Host(Arc::new(f)))
    }

    pub fn parse(src: &str) -> Result<Self, FunError> {
        parse_fun(src)
    }

    /// Parseable specification, when the function has one.
    pub fn spec(&self) -> Option<String> {
        match &self.0.body {
            Body::Expr(_) | Body::Table { .. } | Body::Named(_) => Some(self.0.label.clone()),
            _ => None,
        }
    }

    /// Evaluates after checking the argument count.
    pub fn eval(&self, x: &[u64]) -> Result<u64, FunError> {
        if x.len() != self.0.arity {
            return Err(FunError::ArityMismatch { expected: self.0.arity, got: x.len() });
        }
        Ok(self.call(x))
    }

    /// Evaluates without the arity check. Callers guarantee `x.len() == arity`.
    pub fn call(&self, x: &[u64]) -> u64 {
        debug_assert_eq!(x.len(), self.0.arity, "{}", self.0.label);
        match &self.0.body {
            Body::Expr(e) => e.eval(x),
            Body::Table { entries, default } => entries.get(x).copied().unwrap_or(*default),
            Body::Named(n) => match n {
                Named::Identity => x[0],
                Named::SqrtIndicator => sqrt_indicator(x[0]),
                Named::Const(c) => *c,
                Named::Projection(j) => x[j - 1],
                Named::CantorPair => pairing::cantor_pair(x[0], x[1]),
                Named::SzudzikPair => pairing::szudzik_pair(x[0], x[1]),
            },
            Body::Compose { outer, inners } => {
                let args: Vec<u64> = inners.iter().map(|g| g.call(x)).collect();
                outer.call(&args)
            }
            Body::Shadow { base, spec } => {
                let mut full = Vec::with_capacity(base.arity());
                full.extend_from_slice(spec.prefix());
                full.extend_from_slice(x);
                let args: Vec<u64> = spec.perm().iter().map(|&p| full[p]).collect();
                base.call(&args)
            }
            Body::Host(f) => f(x),
        }
    }

    /// Unary convenience.
    pub fn call1(&self, x: u64) -> u64 {
        self.call(&[x])
    }
}

/// `outer(inner_1(x̄), …, inner_n(x̄))`.
pub fn compose(outer: &FinFun, inners: &[FinFun]) -> Result<FinFun, FunError> {
    if inners.len() != outer.arity() {
        return Err(FunError::ArityMismatch { expected: outer.arity(), got: inners.len() });
    }
    let m = inners[0].arity();
    if let Some(bad) = inners.iter().find(|g| g.arity() != m) {
        return Err(FunError::ArityMismatch { expected: m, got: bad.arity() });
    }
    let args: Vec<&str> = inners.iter().map(FinFun::label).collect();
    let label = format!("{}({})", outer.label(), args.join(", "));
    Ok(FinFun::build(m, label, Body::Compose { outer: outer.clone(), inners: inners.to_vec() }))
}

/// The shadow `f_{π,ā}`: permute variables by `π`, then fix the first `ℓ`
/// of them to `ā`.
pub fn shadow(f: &FinFun, spec: &ShadowSpec) -> Result<FinFun, FunError> {
    spec.validate(f.arity())?;
    if spec.is_identity_improper() {
        return Ok(f.clone());
    }
    let label = format!("{}|{}", f.label(), spec);
    Ok(FinFun::build(f.arity() - spec.prefix().len(), label, Body::Shadow { base: f.clone(), spec: spec.clone() }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixEquality {
    pub horizon: u64,
    pub equal: bool,
    /// Lexicographically least tuple in `[0, horizon)^k` where the functions differ.
    pub witness: Option<Vec<u64>>,
}

/// Odometer over `[0, n)^k` in lexicographic order.
pub fn for_each_tuple(k: usize, n: u64, mut visit: impl FnMut(&[u64]) -> bool) {
    if n == 0 {
        return;
    }
    let mut t = vec![0u64; k];
    loop {
        if !visit(&t) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Whether `f` and `g` agree on `[0, n)^k`.
pub fn prefix_equal(f: &FinFun, g: &FinFun, n: u64) -> Result<PrefixEquality, FunError> {
    if f.arity() != g.arity() {
        return Err(FunError::ArityMismatch { expected: f.arity(), got: g.arity() });
    }
    let mut witness = None;
    for_each_tuple(f.arity(), n, |x| {
        if f.call(x) != g.call(x) {
            witness = Some(x.to_vec());
            false
        } else {
            true
        }
    });
    Ok(PrefixEquality { horizon: n, equal: witness.is_none(), witness })
}

fn parse_fun(src: &str) -> Result<FinFun, FunError> {
    let mut cur = Cursor::new(src);
    cur.skip_ws();
    let start = cur.pos();
    let f = match cur.ident() {
        Some("identity") if cur.at_end() => FinFun::identity(),
        Some("sqrt-indicator") if cur.at_end() => FinFun::sqrt_indicator(),
        Some("cantor-pair") if cur.at_end() => FinFun::cantor_pair(),
        Some("szudzik-pair") if cur.at_end() => FinFun::szudzik_pair(),
        Some("const") if cur.eat(":") => {
            let v = cur.nat()?;
            let k = if cur.eat("/") { cur.nat()? as usize } else { 1 };
            FinFun::constant(v, k).map_err(|e| relocate(e, start))?
        }
        Some("proj") if cur.eat(":") => {
            let n = cur.nat()? as usize;
            cur.expect(",")?;
            let j = cur.nat()? as usize;
            FinFun::projection(n, j).map_err(|e| relocate(e, start))?
        }
        Some("table") if cur.eat("[") => {
            let k = cur.nat()? as usize;
            cur.expect("]")?;
            cur.expect(":")?;
            let default = cur.nat()?;
            let mut entries = BTreeMap::new();
            while cur.eat(";") {
                cur.expect("(")?;
                let mut key = vec![cur.nat()?];
                while cur.eat(",") {
                    key.push(cur.nat()?);
                }
                cur.expect(")")?;
                cur.expect("->")?;
                entries.insert(key, cur.nat()?);
            }
            FinFun::table(k, entries, default).map_err(|e| relocate(e, start))?
        }
        Some("expr") if cur.eat("[") => {
            let k = cur.nat()? as usize;
            cur.expect("]")?;
            cur.expect(":")?;
            let e = parse_expr(&mut cur, 0)?;
            FinFun::from_expr(e, k).map_err(|e| relocate(e, start))?
        }
        Some("expr") if cur.eat(":") => {
            let e = parse_expr(&mut cur, 0)?;
            let k = e.max_var().max(1);
            FinFun::from_expr(e, k)?
        }
        _ => {
            cur.reset(start);
            let e = parse_expr(&mut cur, 0)?;
            let k = e.max_var().max(1);
            FinFun::from_expr(e, k)?
        }
    };
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input").into());
    }
    Ok(f)
}

fn relocate(e: FunError, pos: usize) -> FunError {
    match e {
        FunError::Invalid(m) => FunError::Parse(ParseError::new(pos, m)),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let p = FinFun::projection(3, 2).unwrap();
        assert_eq!(p.eval(&[5, 7, 9]).unwrap(), 7);
        let f = FinFun::parse("x1 + 2*x2").unwrap();
        assert_eq!(f.arity(), 2);
        assert_eq!(f.eval(&[3, 4]).unwrap(), 11);
        let t = FinFun::parse("table[1]:1;(0)->5").unwrap();
        assert_eq!(t.eval(&[8]).unwrap(), 1);
        assert_eq!(t.eval(&[0]).unwrap(), 5);
        assert_eq!(f.eval(&[1]), Err(FunError::ArityMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn sqrt_indicator_values() {
        let f = FinFun::sqrt_indicator();
        let got: Vec<u64> = (0..17).map(|x| f.call1(x)).collect();
        assert_eq!(got, vec![0, 1, 0, 0, 2, 0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 4]);
    }

    #[test]
    fn compose_examples() {
        let g = FinFun::parse("x1 * 10").unwrap();
        let h = FinFun::parse("x1 + 3").unwrap();
        let c = compose(&FinFun::projection(2, 1).unwrap(), &[g.clone(), h]).unwrap();
        for x in 0..20 {
            assert_eq!(c.call1(x), g.call1(x));
        }
        let succ = FinFun::parse("x1 + 1").unwrap();
        let twice = compose(&succ, &[succ.clone()]).unwrap();
        for x in 0..=10 {
            assert_eq!(twice.call1(x), x + 2);
        }
        assert!(compose(&succ, &[succ.clone(), succ.clone()]).is_err());
        let bin = FinFun::parse("x1 + x2").unwrap();
        assert!(compose(&bin, &[succ.clone(), bin.clone()]).is_err());
    }

    #[test]
    fn prefix_equal_examples() {
        let id = FinFun::identity();
        let plus0 = FinFun::parse("x1 + 0").unwrap();
        let capped = FinFun::parse("min(x1, 5)").unwrap();
        assert!(prefix_equal(&id, &id, 100).unwrap().equal);
        assert!(prefix_equal(&id, &plus0, 1000).unwrap().equal);
        let r = prefix_equal(&id, &capped, 10).unwrap();
        assert!(!r.equal);
        assert_eq!(r.witness, Some(vec![6]));
        assert!(prefix_equal(&id, &FinFun::cantor_pair(), 3).is_err());
    }

    #[test]
    fn spec_round_trips() {
        for src in [
            "identity",
            "sqrt-indicator",
            "cantor-pair",
            "szudzik-pair",
            "const:4",
            "const:4/3",
            "proj:3,2",
            "table[2]:7;(0,1)->3;(2,2)->9",
            "expr:x1 * x1 + 1",
            "expr[3]:x1 + x2",
        ] {
            let f = FinFun::parse(src).unwrap();
            let spec = f.spec().unwrap();
            assert_eq!(spec, src);
            let g = FinFun::parse(&spec).unwrap();
            assert_eq!(g.arity(), f.arity());
        }
        assert_eq!(FinFun::parse("x + 2*y").unwrap().spec().unwrap(), "expr:x1 + 2 * x2");
    }

    #[test]
    fn parse_errors() {
        assert!(FinFun::parse("proj:2,3").is_err());
        assert!(FinFun::parse("expr[1]:x2").is_err());
        assert!(FinFun::parse("table[2]:0;(1)->2").is_err());
        assert!(FinFun::parse("const:1/0").is_err());
        assert!(FinFun::parse("identity 3").is_err());
    }
}
