//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::cell::Cell;
use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use densclone::ideal::{assemble_global_witness, shadow_witness_lift, SearchHorizons};
use densclone::monoid::{make_partition, standard_elements, verify_monoid_laws, ClosedPairSet, Law, FULL_BINARY_D6, SINGLE_BRANCH_D6};
use densclone::precomplete::{
    build_large_set_map, build_onto_construction, d_block_rows, index_map, run_precompleteness_pipeline, unarize, verify_onto,
    verify_onto_preserves_ideal, OntoConstruction, PipelineConfig,
};
use densclone::{shadow, Expr, FinFun, NatSet, Rat, ShadowSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::Value;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("onto coverage", onto_coverage),
        ("D sparsity", d_sparsity),
        ("ideal preservation bound", ideal_bound),
        ("large-set map", large_set_map),
        ("end-to-end pipeline", pipeline),
        ("badness certificate", badness_certificate),
        ("witness assembly density chain", assembly_chain),
        ("unarization index map", unarization_oracle),
        ("monoid laws", monoid_laws),
        ("shadow algebra", shadow_algebra),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.2}s): {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s): {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn pow2(count: u32) -> Vec<u64> {
    (1..=count).map(|i| 1u64 << i).collect()
}

fn linear(c: u64, limit: u64) -> Vec<u64> {
    (1..).map(|i| c * i).take_while(|&v| v <= 2 * limit).collect()
}

/// `i(k)`: the largest 1-based `i` with `n_i ≤ 2^k`, at least 1.
fn i_of(n_seq: &[u64], k: u32) -> usize {
    n_seq.iter().take_while(|&&n| n <= 1 << k).count().max(1)
}

fn in_c(n_seq: &[u64], x: u64) -> bool {
    n_seq.iter().any(|&n| n <= x && x < 2 * n)
}

/// `D_k = (2^k − d_k, 2^k]` with `d_k = ⌈2^k / n_{i(k)}⌉`, recomputed from scratch.
fn d_set(n_seq: &[u64], k_max: u32) -> Vec<u64> {
    let mut d = Vec::new();
    for k in 1..=k_max {
        let p = 1u64 << k;
        let dk = p.div_ceil(n_seq[i_of(n_seq, k) - 1]);
        d.extend(p - dk + 1..=p);
    }
    d
}

fn onto_coverage() -> Outcome {
    let k_max = 14;
    let target = 1u64 << (k_max + 1);
    let mut notes = Vec::new();
    for (name, n_seq) in [("2^i", pow2(18)), ("3i", linear(3, 1 << 17))] {
        let start = Instant::now();
        let oc = build_onto_construction(&n_seq, k_max).map_err(|e| format!("{name}: {e}"))?;
        let v = verify_onto(&oc, k_max);
        let elapsed = start.elapsed();
        ensure!(v.pass, "{name}: verify_onto reports gap {:?}, violations {:?}", v.first_gap, v.invariant_violations);
        ensure!(v.one_covered && oc.one_pair.is_some(), "{name}: value 1 not covered by a designated pair");
        ensure!(elapsed < Duration::from_secs(10), "{name}: took {elapsed:?}");

        // Independent sweep over C × D.
        let d = d_set(&n_seq, k_max);
        ensure!(d == oc.d_elems, "{name}: D differs from the recomputed blocks");
        let mut covered = vec![false; target as usize];
        for x in (0..target).filter(|&x| in_c(&n_seq, x)) {
            for &y in &d {
                let v = oc.h.call(&[x, y]);
                if v < target {
                    covered[v as usize] = true;
                }
            }
        }
        let gap = covered.iter().position(|c| !c);
        ensure!(gap.is_none(), "{name}: value {} not hit by h on C × D", gap.unwrap());
        let p = oc.one_pair.unwrap();
        notes.push(format!("{name}: [0, {target}) covered, 1 = h({}, {}), {:.2}s", p.x, p.y, elapsed.as_secs_f64()));
    }
    Ok(notes.join("; "))
}

fn d_sparsity() -> Outcome {
    // Row k needs block k + 1, so the construction runs to 15.
    let k_max = 15;
    let mut rows_checked = 0;
    for (name, n_seq) in [("2^i", pow2(19)), ("3i", linear(3, 1 << 18))] {
        let oc = build_onto_construction(&n_seq, k_max).map_err(|e| format!("{name}: {e}"))?;
        let rows = d_block_rows(&oc);
        for k in 1..=14u32 {
            let (lo, hi) = (1u64 << k, 1u64 << (k + 1));
            let count = oc.d_elems.iter().filter(|&&y| lo <= y && y < hi).count() as u64;
            let n = n_seq[i_of(&n_seq, k + 1) - 1];
            let expected = hi.div_ceil(n);
            ensure!(count == expected, "{name}, k = {k}: |D ∩ block| = {count}, expected {expected}");
            // count / 2^k ≤ 2/n + 2^-k  ⟺  count·n ≤ 2^(k+1) + n
            ensure!(count * n <= hi + n, "{name}, k = {k}: ratio {count}/{lo} above 2/{n} + 2^-{k}");
            let row = rows.iter().find(|r| r.k == k).ok_or(format!("{name}: no row for k = {k}"))?;
            ensure!(row.count == count && row.exact && row.within, "{name}, k = {k}: reported row disagrees: {row:?}");
            ensure!(row.ratio == Rat::new(count, lo), "{name}, k = {k}: reported ratio {}", row.ratio);
            rows_checked += 1;
        }
    }
    Ok(format!("{rows_checked} rows exact for k = 1..14"))
}

fn ideal_bound() -> Outcome {
    let n_seq = pow2(18);
    let oc: OntoConstruction = build_onto_construction(&n_seq, 14).map_err(|e| e.to_string())?;
    let t = NatSet::squares();
    let eps = Rat::new(1, 8);
    let rows = verify_onto_preserves_ideal(&oc, &t, &eps, 10..=14).map_err(|e| e.to_string())?;
    let is_square = |x: u64| (0..=x).take_while(|r| r * r <= x).any(|r| r * r == x);
    let mut applicable = Vec::new();
    for k in 10..=14u32 {
        let p = 1u64 << k;
        let n = n_seq[i_of(&n_seq, k) - 1];
        let dk = p.div_ceil(n);
        let xs: Vec<u64> = (n..2 * n).filter(|&x| is_square(x)).collect();
        let ys: Vec<u64> = (p - dk + 1..=p).filter(|&y| is_square(y)).collect();
        // |T ∩ [n, 2n)| ≤ εn and |T ∩ D_k| ≤ d_k
        let premises = 8 * xs.len() as u64 <= n && ys.len() as u64 <= dk;
        let row = rows.iter().find(|r| r.k == k).ok_or(format!("no row for k = {k}"))?;
        ensure!((row.premise_first && row.premise_second) == premises, "k = {k}: premises reported {row:?}, recomputed {premises}");
        if !premises {
            ensure!(row.holds.is_none(), "k = {k}: bound evaluated without its premises");
            continue;
        }
        let image: BTreeSet<u64> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| oc.h.call(&[x, y])).collect();
        let count = image.len() as u64;
        // |h[(T×T) ∩ R_k]| ≤ 2ε·2^k = 2^k / 4
        ensure!(4 * count <= p, "k = {k}: image has {count} values, bound {}", p / 4);
        ensure!(row.image_count == Some(count) && row.holds == Some(true), "k = {k}: reported {row:?}, recomputed {count}");
        applicable.push(format!("k={k}: {count} ≤ {}", p / 4));
    }
    ensure!(!applicable.is_empty(), "no k in 10..14 satisfies both premises");
    Ok(applicable.join(", "))
}

fn large_set_map() -> Outcome {
    let b = NatSet::evens();
    let horizon = 100_000;
    let map = build_large_set_map(&b, 7, 5, horizon).map_err(|e| e.to_string())?;
    ensure!(map.n_seq.len() == 5, "got {} intervals", map.n_seq.len());
    for x in 0..horizon {
        let fx = map.f.call1(x);
        ensure!(fx * 7 >= x, "f({x}) = {fx} and 7·f(x) < x");
    }
    for (idx, &n) in map.n_seq.iter().enumerate() {
        let hit: HashSet<u64> = (n..=7 * n).filter(|x| x % 2 == 0).map(|x| map.f.call1(x)).collect();
        let missing = (n..2 * n).find(|v| !hit.contains(v));
        ensure!(missing.is_none(), "interval {} (n = {n}): {} not in f[B ∩ I]", idx + 1, missing.unwrap());
    }
    ensure!(map.checks.pass(), "library checks disagree: {:?}", map.checks);
    Ok(format!("n = {:?}", map.n_seq))
}

fn pipeline() -> Outcome {
    let start = Instant::now();
    let cfg = PipelineConfig::default();
    let res = run_precompleteness_pipeline(&FinFun::sqrt_indicator(), &NatSet::squares(), &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(res.inverse.n_out() == 1 << 12, "right inverse tabulated on {} values", res.inverse.n_out());
    for n in 0..1u64 << 12 {
        let (a, b) = (res.inverse.r1.call1(n), res.inverse.r2.call1(n));
        ensure!(res.t.call(&[a, b]) == n, "t(r(n)) ≠ n at n = {n}");
    }
    let term = &res.generated.term;
    for x in 0..50u64 {
        let v = term.eval(&[x]).map_err(|e| e.to_string())?;
        ensure!(v == x * x + 1, "term gives {v} at x = {x}");
    }
    ensure!(res.pass(), "pipeline verification failed: {:?}", res.report().pass);
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("e = {}, n = {:?}, {:.2}s", res.large.e, res.large.n_seq, elapsed.as_secs_f64()))
}

fn cli(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_densclone")).args(args).output().expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), json, String::from_utf8_lossy(&out.stderr).into_owned())
}

struct CertText {
    eps: (u64, u64),
    entries: Vec<(u64, u64, u64, Vec<u64>)>,
}

fn read_certificate(text: &str) -> Result<CertText, String> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    ensure!(lines.next() == Some("badness-certificate 1"), "missing header");
    let mut eps = None;
    let mut entries = Vec::new();
    for line in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        let nums = || words[1..].iter().map(|w| w.parse::<u64>().map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>();
        match words[0] {
            "function" => {}
            "epsilon" => {
                let (p, q) = words[1].split_once('/').ok_or("epsilon is not p/q")?;
                eps = Some((p.parse().map_err(|_| "bad p")?, q.parse().map_err(|_| "bad q")?));
            }
            "entry" => {
                let v = nums()?;
                entries.push((v[0], v[1], v[2], Vec::new()));
            }
            "A" => entries.last_mut().ok_or("A outside an entry")?.3.extend(nums()?),
            "end" => {}
            w => return Err(format!("unexpected line `{w}`")),
        }
    }
    Ok(CertText { eps: eps.ok_or("no epsilon")?, entries })
}

/// Checks one entry against the definition by direct scanning.
fn brute_force_entry(f: impl Fn(u64) -> u64, (p, q): (u64, u64), i: u64, n: u64, t: u64, a: &[u64]) -> Result<(), String> {
    ensure!(n >= i && t >= i, "n or t below i");
    ensure!(a.iter().all(|&x| i <= x && x < n), "A leaves [i, n)");
    let members: HashSet<u64> = a.iter().copied().collect();
    ensure!(members.len() == a.len(), "A has repeated elements");
    // Beyond r = n the count is constant while r / 2^i grows.
    let mut count = 0u128;
    for r in 0..=n {
        ensure!(count << i <= r as u128, "sparsity fails at r = {r}");
        if members.contains(&r) {
            count += 1;
        }
    }
    let image: HashSet<u64> = a.iter().map(|&x| f(x)).filter(|&y| y < t).collect();
    ensure!(image.len() as u128 * q as u128 >= p as u128 * t as u128, "image has {} values below {t}", image.len());
    Ok(())
}

fn badness_certificate() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("sqrt.cert");
    let path_s = path.to_str().unwrap();
    let (code, report, stderr) =
        cli(&["badness", "sqrt-indicator", "squares", "--epsilon", "1/3", "--stages", "3", "--certificate-out", path_s]);
    ensure!(code == 0, "exit code {code}: {stderr}");
    ensure!(report["result"]["status"] == "valid", "report status {}", report["result"]["status"]);
    let cert = read_certificate(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)?;
    ensure!(cert.eps == (1, 3), "epsilon {:?}", cert.eps);
    ensure!(cert.entries.len() == 3, "{} entries", cert.entries.len());
    let sqrt_ind = |x: u64| (0..=x).take_while(|r| r * r <= x).find(|r| r * r == x).unwrap_or(0);
    for (i, n, t, a) in &cert.entries {
        brute_force_entry(sqrt_ind, cert.eps, *i, *n, *t, a).map_err(|e| format!("entry i = {i}: {e}"))?;
    }
    let shape: Vec<String> = cert.entries.iter().map(|(i, n, t, a)| format!("({i},{n},{t},|A|={})", a.len())).collect();

    let (code, report, stderr) = cli(&["badness", "const:0/1", "squares"]);
    ensure!(code == 2, "constant 0: exit code {code}");
    let err = report["result"]["error"].as_str().unwrap_or_default();
    ensure!(err.contains("no t in") && stderr.contains("no t in"), "constant 0: error `{err}`");

    let (code, report, _) = cli(&["badness", "sqrt-indicator", "squares", "--epsilon", "2"]);
    ensure!(code == 2, "epsilon 2: exit code {code}");
    let err = report["result"]["error"].as_str().unwrap_or_default();
    ensure!(err.contains("no t in"), "epsilon 2: error `{err}`");
    Ok(format!("{} accepted by brute force; const:0 and ε = 2 fail with no-t-found", shape.join(" ")))
}

fn assembly_chain() -> Outcome {
    let delta = Rat::new(1, 10);
    let asm = assemble_global_witness(
        &FinFun::sqrt_indicator(),
        &NatSet::squares(),
        &Rat::new(1, 3),
        3,
        SearchHorizons::default(),
        Some(&delta),
    )
    .map_err(|e| format!("assembly did not complete: {e}"))?;
    let chain = asm.chain.as_ref().ok_or("no density chain")?;
    let n_j = *asm.n_seq().last().unwrap();
    // |A ∩ [0, m)| / m < 1/10 for all m in (s, n_J]
    let members: HashSet<u64> = asm.union.iter().copied().collect();
    let mut count = asm.union.iter().filter(|&&x| x <= chain.s).count() as u64;
    for m in chain.s + 1..=n_j {
        ensure!(10 * count < m, "density bound fails at m = {m}");
        if members.contains(&m) {
            count += 1;
        }
    }
    ensure!(chain.holds && chain.anchor_exact, "library chain: {chain:?}");
    Ok(format!("v = {}, s = {}, n_J = {n_j}", chain.v, chain.s))
}

fn unarization_oracle() -> Outcome {
    let horizon = 10_000;
    let evens: Vec<u64> = (0..horizon).filter(|x| x % 2 == 0).collect();
    let count = evens.len() as u64;
    let side = (0..).take_while(|s: &u64| s * s <= count).last().unwrap();
    let box_size = side * side;

    let from_index: HashSet<(u64, u64)> = index_map(box_size, 2)
        .map(|(_, v)| (v[0], v[1]))
        .collect();
    let full_box: HashSet<(u64, u64)> = (0..side).flat_map(|a| (0..side).map(move |b| (a, b))).collect();
    ensure!(from_index.len() as u64 == box_size, "index map is not injective on [0, {box_size})");
    ensure!(from_index == full_box, "index map image differs from [0, {side})^2");
    let elems: HashSet<(u64, u64)> = from_index.iter().map(|&(a, b)| (evens[a as usize], evens[b as usize])).collect();
    let elem_box: HashSet<(u64, u64)> =
        evens[..side as usize].iter().flat_map(|&a| evens[..side as usize].iter().map(move |&b| (a, b))).collect();
    ensure!(elems == elem_box, "element tuples differ from (A ∩ [0, {}))^2", evens[side as usize]);

    let g = FinFun::parse("x + 3*y").map_err(|e| e.to_string())?;
    let u = unarize(&g, &NatSet::evens(), horizon).map_err(|e| e.to_string())?;
    ensure!(u.report.box_side == side && u.report.index_bound == box_size, "library box {:?}", u.report);
    ensure!(u.report.image_contained && u.report.box_covered, "library checks {:?}", u.report);
    Ok(format!("{box_size} indices ↔ [0, {side})^2"))
}

fn monoid_laws() -> Outcome {
    let horizon = 2000;
    let p = make_partition(horizon).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (name, src) in [("single-branch", SINGLE_BRANCH_D6), ("full-binary", FULL_BINARY_D6)] {
        let tree = ClosedPairSet::parse(src).map_err(|e| e.to_string())?;
        ensure!(tree.depth() == 6, "{name}: depth {}", tree.depth());
        let (elems, truncated) = standard_elements(&p, &tree, 256).map_err(|e| e.to_string())?;
        ensure!(!truncated, "{name}: branch cap reached");
        let v = verify_monoid_laws(&p, &tree, &elems, horizon).map_err(|e| e.to_string())?;
        for law in Law::ALL {
            let s = v.laws.iter().find(|s| s.law == law).ok_or(format!("{name}: {law:?} not checked"))?;
            ensure!(s.pairs_checked > 0 && s.violations == 0, "{name}: {law:?} {s:?}, first {:?}", v.first_violation(law));
        }
        ensure!(v.pass && v.disjoint, "{name}: verification did not pass");
        notes.push(format!("{name}: {} elements", elems.len()));
    }

    // Send the first point of A_y somewhere in A_x.
    let tree = ClosedPairSet::parse(FULL_BINARY_D6).map_err(|e| e.to_string())?;
    let (mut elems, _) = standard_elements(&p, &tree, 256).map_err(|e| e.to_string())?;
    elems[2] = elems[2].with_override(4, 3);
    let v = verify_monoid_laws(&p, &tree, &elems, horizon).map_err(|e| e.to_string())?;
    ensure!(!v.pass, "mutated element went unnoticed");
    let w = v.violations.first().ok_or("no violation recorded")?;
    let find = |label: &str| elems.iter().find(|e| e.label == label).ok_or(format!("unknown element {label}"));
    let (outer, inner) = (find(&w.outer)?, find(&w.inner)?);
    let got = outer.fun.call1(inner.fun.call1(w.point));
    ensure!(got == w.got, "witness claims {} at {}, composite gives {got}", w.got, w.point);
    if let Some(expected) = w.expected {
        ensure!(expected != got, "witness point {} does not violate anything", w.point);
    }
    if w.law == Law::FamilyAbsorbs {
        ensure!(got != inner.fun.call1(w.point), "f ∘ f′ agrees with f′ at {}", w.point);
    }
    notes.push(format!("mutation caught by {:?} at x = {}", w.law, w.point));
    Ok(notes.join("; "))
}

fn expr_strategy(arity: usize) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![(0u64..6).prop_map(|c| c.to_string()), (1..=arity).prop_map(|j| format!("x{j}"))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "%"]), inner.clone())
                .prop_map(|(a, op, b)| format!("({a} {op} {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("min({a}, {b})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("max({a}, {b})")),
        ]
    })
}

fn case_strategy() -> impl Strategy<Value = (usize, String, Vec<usize>, Vec<u64>, Vec<u64>)> {
    (1usize..=3).prop_flat_map(|k| {
        (
            Just(k),
            expr_strategy(k),
            Just((1..=k).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(0u64..60, 0..k),
            prop::collection::vec(0u64..50, 1..12),
        )
    })
}

fn shadow_algebra() -> Outcome {
    let horizon = 50;
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    let proper = Cell::new(0u32);
    let result = runner.run(&case_strategy(), |(k, src, perm, prefix, b)| {
        let expr = Expr::parse(&src).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let f = FinFun::from_expr(expr, k).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let spec = ShadowSpec::new(perm.clone(), prefix.clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let g = shadow(&f, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(g.arity(), k - prefix.len());
        if !prefix.is_empty() {
            proper.set(proper.get() + 1);
        }

        // f_{π,ā}(y) = f(x_{π(1)}, …, x_{π(k)}) with x = ā ++ y, on a few points.
        let m = g.arity();
        for seed in 0..8u64 {
            let y: Vec<u64> = (0..m as u64).map(|j| (seed * 7 + j * 13) % horizon).collect();
            let x: Vec<u64> = prefix.iter().copied().chain(y.iter().copied()).collect();
            let permuted: Vec<u64> = perm.iter().map(|&p| x[p - 1]).collect();
            prop_assert_eq!(g.call(&y), f.call(&permuted));
        }

        let set = NatSet::finite(b.iter().copied());
        let (lifted, record) = shadow_witness_lift(&f, &spec, &set, horizon).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(record.contained, "lift fails for {} with {:?}: witness {:?}", src, spec, record.witness);
        for &a in &prefix {
            prop_assert!(lifted.contains(a).unwrap());
        }
        Ok(())
    });
    match result {
        Ok(()) => Ok(format!("100 cases, {} proper shadows", proper.get())),
        Err(e) => Err(e.to_string()),
    }
}
