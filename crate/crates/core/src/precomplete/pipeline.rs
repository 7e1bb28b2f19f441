//! The full chain `A →g B →f C`, `t(x, y) = h(f(g(x)), y)`, a right inverse
//! of `t` on `A ∪ D`, and a generated target function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::inverse::{generate_function, right_inverse, Generated, GeneratedSummary, RightInverse};
use super::largeset::{map_from_intervals, select_intervals, tail_density_estimate, LargeSetChecks, LargeSetMap};
use super::onto::{build_onto_construction, d_block_rows, verify_onto, DBlockRow, OntoConstruction, OntoVerification, OnePair};
use super::unarize::{unarize, UnarizationReport};
use super::PrecompleteError;
use crate::func::FinFun;
use crate::ideal::image_below;
use crate::natset::NatSet;
use crate::rational::Rat;

/// Horizons and choices for one pipeline run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// `A` is enumerated below this bound.
    pub set_horizon: u64,
    /// Density of `B` is estimated, and intervals selected, below this bound.
    pub image_horizon: u64,
    /// The right inverse is tabulated on `[0, n_out)`.
    pub n_out: u64,
    pub k_max: u32,
    /// Largest `e` tried for the premise `d̄(B) > 3/e`.
    pub e_max: u64,
    pub max_intervals: usize,
    /// Preimages are searched in `(Z ∩ [0, search_horizon))²`.
    pub search_horizon: u64,
    pub target: String,
    pub target_horizon: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            set_horizon: 1 << 20,
            image_horizon: 1 << 10,
            n_out: 1 << 12,
            k_max: 14,
            e_max: 16,
            max_intervals: 8,
            search_horizon: 1 << 17,
            target: "x*x+1".into(),
            target_horizon: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pipeline stage `{stage}` failed: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: PrecompleteError,
}

fn at<T>(stage: &'static str, r: Result<T, impl Into<PrecompleteError>>) -> Result<T, PipelineError> {
    r.map_err(|e| PipelineError { stage, source: e.into() })
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub config: PipelineConfig,
    pub g: FinFun,
    pub a: NatSet,
    pub unarization: Option<UnarizationReport>,
    /// `g` itself, or its unarization when `g` is not unary.
    pub g1: FinFun,
    pub b: NatSet,
    pub a_estimate: Rat,
    pub b_estimate: Rat,
    pub large: LargeSetMap,
    pub onto: OntoConstruction,
    pub onto_check: OntoVerification,
    pub d_rows: Vec<DBlockRow>,
    pub t: FinFun,
    pub z: NatSet,
    pub inverse: RightInverse,
    /// First `n < n_out` missing from `t[(A × D) ∩ [0, search_horizon)²]`.
    pub ad_first_gap: Option<u64>,
    pub generated: Generated,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub g: String,
    pub a: String,
    pub unarization: Option<UnarizationReport>,
    pub a_estimate: Rat,
    pub b_size: u64,
    pub b_estimate: Rat,
    pub e: u64,
    pub n_seq: Vec<u64>,
    pub large_set: LargeSetChecks,
    pub f_is_identity: bool,
    pub onto: OntoVerification,
    pub one_pair: Option<OnePair>,
    pub d_rows: Vec<DBlockRow>,
    pub right_inverse_size: u64,
    pub right_inverse_law: bool,
    pub ad_first_gap: Option<u64>,
    pub generated: GeneratedSummary,
    pub pass: bool,
}

impl PipelineResult {
    pub fn pass(&self) -> bool {
        self.unarization.as_ref().is_none_or(|u| u.image_contained && u.box_covered)
            && self.large.checks.pass()
            && self.onto_check.pass
            && self.d_rows.iter().all(|r| r.exact && r.within)
            && self.inverse.law_holds(&self.t)
            && self.ad_first_gap.is_none()
            && self.generated.check.equal
    }

    pub fn report(&self) -> PipelineReport {
        PipelineReport {
            config: self.config.clone(),
            g: self.g.to_string(),
            a: self.a.spec(),
            unarization: self.unarization.clone(),
            a_estimate: self.a_estimate.clone(),
            b_size: self.b.prefix_count(u64::MAX).unwrap_or(0),
            b_estimate: self.b_estimate.clone(),
            e: self.large.e,
            n_seq: self.large.n_seq.clone(),
            large_set: self.large.checks.clone(),
            f_is_identity: self.large.is_identity(),
            onto: self.onto_check.clone(),
            one_pair: self.onto.one_pair,
            d_rows: self.d_rows.clone(),
            right_inverse_size: self.inverse.n_out(),
            right_inverse_law: self.inverse.law_holds(&self.t),
            ad_first_gap: self.ad_first_gap,
            generated: self.generated.summary(),
            pass: self.pass(),
        }
    }
}

/// Runs every stage in order, stopping at the first construction failure.
/// Verification outcomes are recorded rather than raised; see
/// [`PipelineResult::pass`].
pub fn run_precompleteness_pipeline(g: &FinFun, a: &NatSet, config: &PipelineConfig) -> Result<PipelineResult, PipelineError> {
    let target = at("target", FinFun::parse(&config.target))?;

    let (g1, unarization) = if g.arity() == 1 {
        (g.clone(), None)
    } else {
        let u = at("unarize", unarize(g, a, config.set_horizon))?;
        (u.h, Some(u.report))
    };

    let a_elems = at("image", a.elements_below(config.set_horizon))?;
    let a_estimate = at("image", tail_density_estimate(a, config.set_horizon))?;
    let b = NatSet::finite(image_below(&g1, &a_elems, u64::MAX));
    let b_estimate = at("image", tail_density_estimate(&b, config.image_horizon))?;

    let e = (2..=config.e_max.max(2)).find(|&e| b_estimate > Rat::new(3, e)).ok_or(PipelineError {
        stage: "large-set",
        source: PrecompleteError::PremiseUnmet { estimate: b_estimate.clone(), e: config.e_max },
    })?;
    let n_seq = at("large-set", select_intervals(&b, e, config.max_intervals, config.image_horizon))?;
    if n_seq.is_empty() {
        return Err(PipelineError {
            stage: "large-set",
            source: PrecompleteError::NotEnoughIntervals { found: 0, wanted: 1, horizon: config.image_horizon },
        });
    }
    let large = at("large-set", map_from_intervals(&b, e, n_seq, b_estimate.clone(), config.image_horizon))?;

    let onto = at("onto", build_onto_construction(&large.n_seq, config.k_max))?;
    let onto_check = verify_onto(&onto, config.k_max);
    let d_rows = d_block_rows(&onto);

    let (f, h, g_t) = (large.f.clone(), onto.h.clone(), g1.clone());
    let t = FinFun::host(2, format!("h(f({}(x)),y)", g1.label()), move |x| h.call(&[f.call1(g_t.call1(x[0])), x[1]]));

    let d = onto.d_set();
    let z = NatSet::union(a.clone(), d.clone());
    let inverse = at("right-inverse", right_inverse(&t, &z, config.n_out, config.search_horizon))?;

    let ad_first_gap = {
        let aa = at("right-inverse", a.elements_below(config.search_horizon))?;
        let dd = at("right-inverse", d.elements_below(config.search_horizon))?;
        let mut hit = vec![false; config.n_out as usize];
        for &x in &aa {
            for &y in &dd {
                let v = t.call(&[x, y]);
                if v < config.n_out {
                    hit[v as usize] = true;
                }
            }
        }
        hit.iter().position(|&b| !b).map(|n| n as u64)
    };

    let generated = at("generate", generate_function(&t, &inverse, &target, config.target_horizon))?;

    Ok(PipelineResult {
        config: config.clone(),
        g: g.clone(),
        a: a.clone(),
        unarization,
        g1,
        b,
        a_estimate,
        b_estimate,
        large,
        onto,
        onto_check,
        d_rows,
        t,
        z,
        inverse,
        ad_first_gap,
        generated,
    })
}
