//! One function per subcommand. Each resolves its inputs against the
//! configuration, runs the library, and packages the outcome.

use std::path::Path;

use densclone::certificate::{validate_certificate, BadnessCertificate};
use densclone::density::{dyadic_block_densities, upper_density_estimate};
use densclone::ideal::{
    assemble_global_witness, certificate_from_schedule, doubling_schedule, membership_probe, probe_cost, AssemblyError,
    ProbeVerdict,
};
use densclone::monoid::{make_partition, standard_elements, verify_monoid_laws, ClosedPairSet, FULL_BINARY_D6, SINGLE_BRANCH_D6};
use densclone::precomplete::{
    build_onto_construction, d_block_rows, generate_function, right_inverse, run_precompleteness_pipeline,
    verify_onto, verify_onto_preserves_ideal,
};
use densclone::{FinFun, NatSet, Rat};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{table, Output};
use crate::{BadnessArgs, CliError, DensityArgs, GenerateArgs, MonoidArgs, OntoArgs, PipelineArgs, ProbeArgs};

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn parse_set(spec: &str) -> Result<NatSet, CliError> {
    NatSet::parse(spec).map_err(|e| usage(format!("set `{spec}`: {e}")))
}

fn parse_fun(spec: &str) -> Result<FinFun, CliError> {
    FinFun::parse(spec).map_err(|e| usage(format!("function `{spec}`: {e}")))
}

fn parse_rat(name: &str, text: &str) -> Result<Rat, CliError> {
    let r: Rat = text.parse().map_err(|e| usage(format!("{name} `{text}`: {e}")))?;
    if !r.is_positive() {
        return Err(usage(format!("{name} must be positive")));
    }
    Ok(r)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn check_mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn density(a: &DensityArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if let Some(h) = &a.horizons {
        config.density.horizons = h.clone();
    }
    if let Some(k) = a.k_max {
        config.density.k_max = k;
    }
    let set = parse_set(&a.set)?;
    let report = upper_density_estimate(&set, &config.density.horizons).map_err(usage)?;
    let blocks = dyadic_block_densities(&set, config.density.k_max).map_err(usage)?;

    let mut summary = format!("set {}\n\n", set.spec());
    let rows: Vec<Vec<String>> =
        report.rows.iter().map(|r| vec![r.n.to_string(), r.count.to_string(), r.ratio.to_string()]).collect();
    summary += &table(&["n", "count", "ratio"], &rows);
    summary += &format!("max ratio {} at n = {}\n\n", report.max_ratio, report.max_at);
    let brows: Vec<Vec<String>> = blocks.iter().enumerate().map(|(k, r)| vec![k.to_string(), r.to_string()]).collect();
    summary += &table(&["k", "block ratio"], &brows);

    Ok(Output {
        command: "density",
        arguments: json!({ "set": set.spec(), "horizons": config.density.horizons, "k_max": config.density.k_max }),
        result: json!({ "estimate": to_value(&report), "dyadic_blocks": to_value(&blocks) }),
        config,
        summary,
        code: 0,
        message: None,
    })
}

pub fn badness(a: &BadnessArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if let Some(e) = &a.epsilon {
        config.badness.epsilon = parse_rat("epsilon", e)?;
    }
    if let Some(d) = &a.delta {
        config.badness.delta = parse_rat("delta", d)?;
    }
    if let Some(j) = a.stages {
        config.badness.stages = j;
    }
    let f = parse_fun(&a.function)?;

    if let Some(path) = &a.check_certificate {
        return check_certificate(&f, path, config);
    }
    let set_spec = a.set.as_deref().ok_or_else(|| usage("a witness set is required unless --check-certificate is given"))?;
    let b = parse_set(set_spec)?;
    let eps = config.badness.epsilon.clone();
    let horizons = config.badness.horizons();
    let arguments = json!({
        "function": a.function,
        "set": b.spec(),
        "epsilon": eps,
        "stages": config.badness.stages,
        "assemble": a.assemble,
        "delta": if a.assemble { Some(&config.badness.delta) } else { None },
    });

    let failure = |err: AssemblyError, config: RunConfig, arguments: Value| {
        let msg = format!("error: {err}");
        Output {
            command: "badness",
            arguments,
            config,
            result: json!({ "status": "search-failure", "error": err.to_string(), "stage": stage_of(&err) }),
            summary: String::new(),
            code: 2,
            message: Some(msg),
        }
    };

    if a.assemble {
        let delta = config.badness.delta.clone();
        let asm = match assemble_global_witness(&f, &b, &eps, config.badness.stages as usize, horizons, Some(&delta)) {
            Ok(asm) => asm,
            Err(e) => return Ok(failure(e, config, arguments)),
        };
        let cert = asm.certificate(f.spec());
        let validation = validate_certificate(&f, &cert);
        let violation = asm.invariant_violation();
        let chain_ok = asm.chain.as_ref().is_none_or(|c| c.holds);
        let ok = violation.is_none() && chain_ok && validation.pass;
        let mut summary = table(
            &["stage", "i", "m", "n", "t", "|A_j|"],
            &asm.stages
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    vec![
                        (j + 1).to_string(),
                        s.entry.i.to_string(),
                        s.m.to_string(),
                        s.entry.n.to_string(),
                        s.entry.t.to_string(),
                        s.entry.a.len().to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        );
        if let Some(c) = &asm.chain {
            summary += &format!("delta {}  v {}  anchor {}  s {}  bound {}\n", c.delta, c.v, c.anchor, c.s, check_mark(c.holds));
        }
        summary += &format!("invariants {}\n", check_mark(violation.is_none()));
        return Ok(Output {
            command: "badness",
            arguments,
            config,
            result: json!({
                "status": if ok { "valid" } else { "invalid" },
                "n_seq": asm.n_seq(),
                "t_seq": asm.t_seq(),
                "stages": to_value(&asm.stages),
                "union_size": asm.union.len(),
                "chain": to_value(&asm.chain),
                "invariant_violation": violation,
                "validation": to_value(&validation),
                "certificate": cert.to_string(),
            }),
            summary,
            code: if ok { 0 } else { 3 },
            message: None,
        });
    }

    let schedule = doubling_schedule(config.badness.stages);
    let (cert, searches) = match certificate_from_schedule(&f, &b, &eps, &schedule, horizons) {
        Ok(x) => x,
        Err(e) => return Ok(failure(e, config, arguments)),
    };
    let validation = validate_certificate(&f, &cert);
    if let Some(path) = &a.certificate_out {
        std::fs::write(path, cert.to_string()).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let rows: Vec<Vec<String>> = searches
        .iter()
        .zip(&validation.entries)
        .map(|(s, c)| {
            vec![
                s.entry.i.to_string(),
                s.m.to_string(),
                s.entry.n.to_string(),
                s.entry.t.to_string(),
                s.entry.a.len().to_string(),
                s.image_count.to_string(),
                check_mark(c.pass).into(),
            ]
        })
        .collect();
    let mut summary = format!("epsilon {}  scope: {}\n\n", eps, validation.scope_text());
    summary += &table(&["i", "m", "n", "t", "|A|", "image", "check"], &rows);
    Ok(Output {
        command: "badness",
        arguments,
        config,
        result: json!({
            "status": if validation.pass { "valid" } else { "invalid" },
            "schedule": schedule,
            "searches": to_value(&searches),
            "validation": to_value(&validation),
            "certificate": cert.to_string(),
        }),
        summary,
        code: if validation.pass { 0 } else { 3 },
        message: None,
    })
}

fn stage_of(err: &AssemblyError) -> Option<usize> {
    match err {
        AssemblyError::Stage { stage, .. } => Some(*stage),
        _ => None,
    }
}

fn check_certificate(f: &FinFun, path: &Path, config: RunConfig) -> Result<Output, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let cert = BadnessCertificate::parse(&text)
        .map_err(|e| usage(format!("certificate {} at byte {}: {}", path.display(), e.pos, e.message)))?;
    let record = validate_certificate(f, &cert);
    let mut summary = format!("certificate {}: {}\nscope: {}\n", path.display(), check_mark(record.pass), record.scope_text());
    if let Some((idx, failure)) = record.first_failure() {
        summary += &format!("entry {} fails: {failure}\n", idx + 1);
    }
    Ok(Output {
        command: "badness",
        arguments: json!({ "function": f.to_string(), "check_certificate": path.display().to_string() }),
        config,
        result: json!({ "status": if record.pass { "valid" } else { "invalid" }, "validation": to_value(&record) }),
        summary,
        code: if record.pass { 0 } else { 3 },
        message: None,
    })
}

pub fn probe(a: &ProbeArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if let Some(h) = a.horizon {
        config.probe.horizon = h;
    }
    if let Some(b) = a.a_bound {
        config.probe.a_bound = b;
    }
    config.probe.confirm_cost |= a.confirm_cost;
    let f = parse_fun(&a.function)?;
    let sets = a.sets.iter().map(|s| parse_set(s)).collect::<Result<Vec<_>, _>>()?;
    let cfg = config.probe.probe_config();
    let cost = probe_cost(&f, &sets, &cfg).map_err(usage)?;
    if f.arity() >= 3 && !config.probe.confirm_cost {
        return Err(usage(format!(
            "probing a {}-ary function needs up to {cost} evaluations; rerun with --confirm-cost",
            f.arity()
        )));
    }
    let verdict = membership_probe(&f, &sets, &cfg).map_err(usage)?;
    let summary = match &verdict {
        ProbeVerdict::NonMemberWitnessed { set, shadow, blocks, .. } => format!(
            "non-member witnessed: shadow {shadow} on set {} is dense on blocks {:?}\n",
            sets[*set].spec(),
            blocks
        ),
        ProbeVerdict::Inconclusive { rows } => format!("inconclusive after {} shadow/set pairs\n", rows.len()),
    };
    Ok(Output {
        command: "probe",
        arguments: json!({ "function": a.function, "sets": sets.iter().map(NatSet::spec).collect::<Vec<_>>(), "cost": cost.to_string() }),
        config,
        result: to_value(&verdict),
        summary,
        code: 0,
        message: None,
    })
}

/// Terms of the named sequence, enough to pass `2^(k_max+1)`.
pub fn sequence_terms(spec: &str, k_max: u32) -> Result<Vec<u64>, CliError> {
    let limit = 1u64 << (k_max + 1).min(62);
    if spec == "pow2" {
        return Ok((1..=(k_max + 2).min(62)).map(|i| 1u64 << i).collect());
    }
    if let Some(c) = spec.strip_prefix("linear:") {
        let c: u64 = c.trim().parse().map_err(|_| usage(format!("sequence `{spec}`: bad coefficient")))?;
        if c == 0 {
            return Err(usage("linear coefficient must be positive"));
        }
        let mut out = Vec::new();
        let mut i = 1u64;
        loop {
            let v = c.checked_mul(i).ok_or_else(|| usage("sequence overflows"))?;
            out.push(v);
            if v > limit {
                return Ok(out);
            }
            i += 1;
        }
    }
    if let Some(list) = spec.strip_prefix("list:") {
        return list
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("sequence `{spec}`: `{s}` is not a natural"))))
            .collect();
    }
    Err(usage(format!("unknown sequence `{spec}`; expected pow2, linear:c or list:...")))
}

pub fn onto(a: &OntoArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if let Some(k) = a.k_max {
        config.onto.k_max = k;
    }
    let k_max = config.onto.k_max;
    let n_seq = sequence_terms(&a.sequence, k_max)?;
    let oc = match build_onto_construction(&n_seq, k_max) {
        Ok(oc) => oc,
        Err(e) => {
            let msg = format!("error: onto construction failed: {e}");
            return Ok(Output {
                command: "onto",
                arguments: json!({ "sequence": a.sequence, "k_max": k_max }),
                config,
                result: json!({ "status": "construction-failure", "error": e.to_string() }),
                summary: String::new(),
                code: 2,
                message: Some(msg),
            });
        }
    };
    let check = verify_onto(&oc, k_max);
    let d_rows = d_block_rows(&oc);
    let d_ok = d_rows.iter().all(|r| r.exact && r.within);
    let ideal = match &a.ideal_set {
        Some(spec) => {
            let t = parse_set(spec)?;
            let eps = parse_rat("epsilon", &a.epsilon)?;
            let (lo, hi) = a
                .k_range
                .split_once("..")
                .and_then(|(l, h)| Some((l.trim().parse::<u32>().ok()?, h.trim().parse::<u32>().ok()?)))
                .ok_or_else(|| usage(format!("k range `{}` is not of the form a..b", a.k_range)))?;
            let rows = verify_onto_preserves_ideal(&oc, &t, &eps, lo..=hi).map_err(usage)?;
            Some((t.spec(), eps, rows))
        }
        None => None,
    };
    let ideal_ok = ideal.as_ref().is_none_or(|(_, _, rows)| rows.iter().all(|r| r.holds != Some(false)));
    let pass = check.pass && d_ok && ideal_ok;

    let block_rows: Vec<Vec<String>> = oc
        .blocks
        .iter()
        .map(|b| {
            vec![
                b.k.to_string(),
                b.i_k.to_string(),
                b.n.to_string(),
                b.d.to_string(),
                format!("[{}, {}]", b.d_lo, b.d_hi),
                b.r_size.to_string(),
            ]
        })
        .collect();
    let mut summary = format!("sequence {} (first terms {:?})\n\n", a.sequence, &n_seq[..n_seq.len().min(6)]);
    summary += &table(&["k", "i(k)", "n_i(k)", "d_k", "D_k", "|R_k|"], &block_rows);
    summary += &format!(
        "\ncoverage of {{0}} ∪ [2, {}): {}{}\none pair: {}\n",
        check.target_end,
        check_mark(check.pass),
        check.first_gap.map(|g| format!(" (first gap {g})")).unwrap_or_default(),
        oc.one_pair.map(|p| format!("({}, {}) at k = {}", p.x, p.y, p.k)).unwrap_or_else(|| "none".into()),
    );
    summary += &format!("D block counts exact and bounded: {}\n", check_mark(d_ok));
    if let Some((_, _, rows)) = &ideal {
        let r: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.premise_first.to_string(),
                    r.premise_second.to_string(),
                    r.image_count.map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
                    r.bound.to_string(),
                    r.holds.map(|h| check_mark(h).to_string()).unwrap_or_else(|| "no claim".into()),
                ]
            })
            .collect();
        summary += "\n";
        summary += &table(&["k", "premise 1", "premise 2", "image", "bound", "result"], &r);
    }

    Ok(Output {
        command: "onto",
        arguments: json!({ "sequence": a.sequence, "n_seq": n_seq, "k_max": k_max }),
        config,
        result: json!({
            "status": if pass { "pass" } else { "fail" },
            "blocks": to_value(&oc.blocks),
            "one_pair": to_value(&oc.one_pair),
            "verification": to_value(&check),
            "d_rows": to_value(&d_rows),
            "ideal": ideal.as_ref().map(|(set, eps, rows)| json!({ "set": set, "epsilon": eps, "rows": to_value(rows) })),
        }),
        summary,
        code: if pass { 0 } else { 3 },
        message: None,
    })
}

pub fn pipeline(a: &PipelineArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if let Some(t) = &a.target {
        config.pipeline.target = t.clone();
    }
    let g = parse_fun(&a.function)?;
    let set = parse_set(&a.set)?;
    parse_fun(&config.pipeline.target)?;
    let arguments = json!({ "function": a.function, "set": set.spec(), "target": config.pipeline.target });
    match run_precompleteness_pipeline(&g, &set, &config.pipeline) {
        Ok(r) => {
            let rep = r.report();
            let mut summary = format!(
                "A-estimate {}  |B| {}  B-estimate {}  e {}\nintervals {:?}  f identity: {}\n",
                rep.a_estimate, rep.b_size, rep.b_estimate, rep.e, rep.n_seq, rep.f_is_identity
            );
            summary += &format!("large-set checks: {}\n", check_mark(rep.large_set.pass()));
            summary += &format!("onto coverage: {}\n", check_mark(rep.onto.pass));
            summary += &format!("right inverse on [0, {}): {}\n", rep.right_inverse_size, check_mark(rep.right_inverse_law));
            summary += &format!("t[A x D] covers [0, {}): {}\n", rep.right_inverse_size, check_mark(rep.ad_first_gap.is_none()));
            summary += &format!(
                "generated {} on [0, {}): {}\n",
                config.pipeline.target,
                rep.generated.horizon,
                check_mark(rep.generated.equal)
            );
            let code = if rep.pass { 0 } else { 3 };
            Ok(Output { command: "pipeline", arguments, config, result: to_value(&rep), summary, code, message: None })
        }
        Err(e) => {
            let msg = format!("error: {e}");
            Ok(Output {
                command: "pipeline",
                arguments,
                config,
                result: json!({ "status": "stage-failure", "stage": e.stage, "error": e.source.to_string() }),
                summary: String::new(),
                code: 2,
                message: Some(msg),
            })
        }
    }
}

fn load_tree(spec: &str) -> Result<(String, ClosedPairSet), CliError> {
    let text = match spec {
        "builtin:single-branch" => SINGLE_BRANCH_D6.to_string(),
        "builtin:full-binary" => FULL_BINARY_D6.to_string(),
        path => std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read tree {path}: {e}")))?,
    };
    let tree = ClosedPairSet::parse(&text).map_err(|e| usage(format!("tree {spec}: {e}")))?;
    Ok((spec.to_string(), tree))
}

pub fn monoid(a: &MonoidArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if let Some(h) = a.horizon {
        config.monoid.horizon = h;
    }
    if let Some(c) = a.branch_cap {
        config.monoid.branch_cap = c;
    }
    let (name, tree) = load_tree(&a.tree)?;
    let n = config.monoid.horizon;
    let p = make_partition(n).map_err(usage)?;
    let (elements, truncated) = standard_elements(&p, &tree, config.monoid.branch_cap).map_err(usage)?;
    let v = verify_monoid_laws(&p, &tree, &elements, n).map_err(usage)?;

    let rows: Vec<Vec<String>> = v
        .laws
        .iter()
        .map(|s| vec![format!("{:?}", s.law), s.pairs_checked.to_string(), s.violations.to_string()])
        .collect();
    let mut summary = format!(
        "tree {name} (depth {}), {} elements{}, horizon {n}\n\n",
        v.depth,
        v.elements,
        if truncated { format!(", branches capped at {}", config.monoid.branch_cap) } else { String::new() }
    );
    summary += &table(&["law", "pairs", "violations"], &rows);
    for w in &v.violations {
        summary += &format!(
            "violation {:?}: {} o {} at {}: got {}{}\n",
            w.law,
            w.outer,
            w.inner,
            w.point,
            w.got,
            w.expected.map(|e| format!(", expected {e}")).unwrap_or_default()
        );
    }
    summary += &format!(
        "composites: id {}, h {}, F {}, G' {}\nG' disjoint from F: {}\npoints using the default extension: {}\n",
        v.classes.identity, v.classes.collapse, v.classes.family, v.classes.projected, v.disjoint, v.default_points
    );
    let code = if v.pass { 0 } else { 3 };
    Ok(Output {
        command: "monoid",
        arguments: json!({ "tree": name, "depth": tree.depth(), "horizon": n, "branch_cap": config.monoid.branch_cap, "truncated": truncated }),
        config,
        result: to_value(&v),
        summary,
        code,
        message: if v.pass { None } else { Some("error: monoid law violated".into()) },
    })
}

pub fn generate(a: &GenerateArgs, mut config: RunConfig) -> Result<Output, CliError> {
    if let Some(v) = a.n_out {
        config.generate.n_out = v;
    }
    if let Some(v) = a.search_horizon {
        config.generate.search_horizon = v;
    }
    if let Some(v) = a.horizon {
        config.generate.horizon = v;
    }
    let t = parse_fun(&a.t)?;
    if t.arity() != 2 {
        return Err(usage(format!("`{}` has arity {}, expected 2", a.t, t.arity())));
    }
    let z = parse_set(&a.z)?;
    let u = parse_fun(&a.target)?;
    let arguments = json!({ "t": a.t, "z": z.spec(), "target": a.target });
    let g = right_inverse(&t, &z, config.generate.n_out, config.generate.search_horizon)
        .and_then(|r| generate_function(&t, &r, &u, config.generate.horizon).map(|g| (r, g)));
    match g {
        Ok((r, g)) => {
            let s = g.summary();
            let summary = format!(
                "right inverse on [0, {}) law {}\nterm {}\nequal to target on [0, {})^{}: {}\n",
                r.n_out(),
                check_mark(r.law_holds(&t)),
                s.term,
                s.horizon,
                s.arity,
                check_mark(s.equal)
            );
            let code = if s.equal { 0 } else { 3 };
            Ok(Output {
                command: "generate",
                arguments,
                config,
                result: json!({ "right_inverse_law": r.law_holds(&t), "generated": to_value(&s) }),
                summary,
                code,
                message: None,
            })
        }
        Err(e) => {
            let msg = format!("error: {e}");
            Ok(Output {
                command: "generate",
                arguments,
                config,
                result: json!({ "status": "construction-failure", "error": e.to_string() }),
                summary: String::new(),
                code: 2,
                message: Some(msg),
            })
        }
    }
}
