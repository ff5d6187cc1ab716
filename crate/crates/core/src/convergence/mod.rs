//! Exceedance sets and the convergence/Cauchy classifiers.
//!
//! Every classifier works the same way: build the set of indices where the
//! sequence strays from its target, sample that set's density profile, and
//! read a verdict off the tail. A sequence "converges" at a scale `(ε, t)`
//! when its exceedance set gets density verdict Zero, and overall only when it
//! does so at every tested scale.

mod estimate;
mod harness;
mod lemma;
mod subsequence;

pub use estimate::{estimate_statistical_limit, trimmed_tail_median};
pub use harness::{
    theorem_harness, EquivalentConditions, ExtractionEvidence, HarnessConfig, HarnessReport,
    MemberEvidence, TheoremTally, UniquenessEvidence, TALLY_NAMES,
};
pub use lemma::{lemma_equivalence_check, LemmaPoint, LemmaReport, LemmaVerdicts};
pub use subsequence::{extract_density_one_subsequence, ExtractionSchedule, SubsequenceWitness};

use serde::Serialize;

use crate::density::{density_profile, geometric_grid, DensityConfig, DensityProfile, DensityVerdict, IndexSet};
use crate::error::{domain, Result};
use crate::ifns::{IntuitionisticFuzzyNorm, Norm, NormedSpace};
use crate::sequence::{RealSequence, Subject};

/// One `(ε, t)` pair. `t` is ignored by the real-valued tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scale {
    pub epsilon: f64,
    pub t: f64,
}

impl Scale {
    pub fn new(epsilon: f64, t: f64) -> Self {
        Self { epsilon, t }
    }

    fn validate_ifn(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(domain(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(domain(format!("t must be positive, got {}", self.t)));
        }
        Ok(())
    }

    fn validate_real(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(domain(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Parameters shared by the classifiers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestParams {
    pub scales: Vec<Scale>,
    /// Candidate limit. `None` means "estimate it from the tail".
    pub limit: Option<Vec<f64>>,
    /// Sample grid; `None` means the geometric default up to the prefix length.
    pub grid: Option<Vec<usize>>,
    pub density: DensityConfig,
    /// Test `F̂x` (the default) rather than `x`.
    pub apply_fhat: bool,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            scales: vec![Scale::new(0.5, 1.0)],
            limit: None,
            grid: None,
            density: DensityConfig::default(),
            apply_fhat: true,
        }
    }
}

impl TestParams {
    pub fn single(epsilon: f64, t: f64) -> Self {
        Self {
            scales: vec![Scale::new(epsilon, t)],
            ..Self::default()
        }
    }

    pub fn with_limit(mut self, limit: Vec<f64>) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn with_fhat(mut self, apply: bool) -> Self {
        self.apply_fhat = apply;
        self
    }

    pub fn grid_for(&self, len: usize) -> Result<Vec<usize>> {
        match &self.grid {
            None => Ok(geometric_grid(len)),
            Some(g) => {
                if g.last().is_some_and(|&m| m > len) {
                    return Err(domain(format!(
                        "grid reaches {} but the sequence has {len} terms",
                        g.last().unwrap()
                    )));
                }
                Ok(g.clone())
            }
        }
    }

    fn validate(&self, dim: usize, ifn_scales: bool) -> Result<()> {
        if self.scales.is_empty() {
            return Err(domain("at least one (epsilon, t) scale is required"));
        }
        for s in &self.scales {
            if ifn_scales {
                s.validate_ifn()?;
            } else {
                s.validate_real()?;
            }
        }
        if let Some(l) = &self.limit {
            check_limit(l, dim)?;
        }
        self.density.validate()
    }
}

fn check_limit(limit: &[f64], dim: usize) -> Result<()> {
    if limit.len() != dim {
        return Err(domain(format!(
            "limit has dimension {}, sequence has {dim}",
            limit.len()
        )));
    }
    if limit.iter().any(|v| !v.is_finite()) {
        return Err(domain("limit must be finite"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    OrdinaryIfn,
    StatisticalReal,
    FscIfn,
    FscaIfn,
    StatisticalCauchyReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Converges { limit: Vec<f64> },
    Cauchy,
    Diverges,
    Undetermined,
}

impl Verdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Converges { .. } | Verdict::Cauchy)
    }
}

/// Evidence for one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleResult {
    pub scale: Scale,
    /// Anchor index `N` for the Cauchy modes.
    pub anchor: Option<usize>,
    pub exceedance_profile: DensityProfile,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub mode: Mode,
    pub apply_fhat: bool,
    pub length: usize,
    /// Limit tested against (convergence modes only).
    pub limit: Option<Vec<f64>>,
    pub limit_estimated: bool,
    pub scales: Vec<ScaleResult>,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_positive()
    }
}

/// `{k : ‖y_k − L‖ ≥ ε}`.
pub fn exceedance_set_real(y: &RealSequence, limit: &[f64], epsilon: f64, norm: Norm) -> Result<IndexSet> {
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    check_limit(limit, y.dim())?;
    Ok(collect(y.len(), y.terms().map(|v| norm.distance(v, limit) >= epsilon)))
}

/// `{k : T(y_k − L, t) ≤ 1 − ε  or  U(y_k − L, t) ≥ ε}`.
pub fn exceedance_set_ifn(
    y: &RealSequence,
    ifn: &IntuitionisticFuzzyNorm,
    limit: &[f64],
    epsilon: f64,
    t: f64,
) -> Result<IndexSet> {
    let (a, b) = exceedance_sets_split(y, ifn, limit, epsilon, t)?;
    a.union(&b)
}

/// The membership-condition set and the nonmembership-condition set separately.
pub fn exceedance_sets_split(
    y: &RealSequence,
    ifn: &IntuitionisticFuzzyNorm,
    limit: &[f64],
    epsilon: f64,
    t: f64,
) -> Result<(IndexSet, IndexSet)> {
    Scale::new(epsilon, t).validate_ifn()?;
    check_limit(limit, y.dim())?;
    ifn.space.check_dim(limit)?;
    let mut mem = Vec::new();
    let mut non = Vec::new();
    for (i, v) in y.terms().enumerate() {
        let (m, u) = ifn.eval_difference(v, limit, t);
        if m <= 1.0 - epsilon {
            mem.push(i + 1);
        }
        if u >= epsilon {
            non.push(i + 1);
        }
    }
    Ok((IndexSet::new(mem, y.len())?, IndexSet::new(non, y.len())?))
}

fn collect(len: usize, flags: impl Iterator<Item = bool>) -> IndexSet {
    let indices = flags
        .enumerate()
        .filter_map(|(i, hit)| hit.then_some(i + 1))
        .collect();
    IndexSet::new(indices, len).expect("indices are increasing and within the horizon")
}

fn verdict_from_density(
    profile: &DensityProfile,
    config: &DensityConfig,
    on_zero: Verdict,
) -> Verdict {
    match profile.verdict {
        DensityVerdict::Zero => on_zero,
        DensityVerdict::One => Verdict::Diverges,
        DensityVerdict::Value(v) if v >= config.zero_threshold => Verdict::Diverges,
        _ => Verdict::Undetermined,
    }
}

fn aggregate(results: &[ScaleResult], on_pass: Verdict) -> Verdict {
    if results.iter().all(|r| r.verdict.is_positive()) {
        on_pass
    } else if results.iter().any(|r| r.verdict == Verdict::Diverges) {
        Verdict::Diverges
    } else {
        Verdict::Undetermined
    }
}

fn resolve_limit(y: &RealSequence, params: &TestParams) -> Result<(Vec<f64>, bool)> {
    match &params.limit {
        Some(l) => Ok((l.clone(), false)),
        None => Ok((trimmed_tail_median(y, params.density.tail_window)?, true)),
    }
}

/// Fibonacci statistical convergence with respect to an IFN.
///
/// With `apply_fhat = false` the same machinery tests plain statistical
/// convergence of `x` in the IFN.
pub fn fsc_ifn_test(
    subject: &Subject,
    ifn: &IntuitionisticFuzzyNorm,
    params: &TestParams,
) -> Result<ConvergenceReport> {
    params.validate(subject.dim(), true)?;
    ifn.space.check_dim(&vec![0.0; subject.dim()])?;
    let y = subject.under_test(params.apply_fhat)?;
    let grid = params.grid_for(y.len())?;
    let (limit, estimated) = resolve_limit(&y, params)?;
    let mut scales = Vec::with_capacity(params.scales.len());
    for &scale in &params.scales {
        let set = exceedance_set_ifn(&y, ifn, &limit, scale.epsilon, scale.t)?;
        let profile = density_profile(&set, &grid, &params.density)?;
        let verdict = verdict_from_density(
            &profile,
            &params.density,
            Verdict::Converges {
                limit: limit.clone(),
            },
        );
        scales.push(ScaleResult {
            scale,
            anchor: None,
            exceedance_profile: profile,
            verdict,
        });
    }
    let verdict = aggregate(
        &scales,
        Verdict::Converges {
            limit: limit.clone(),
        },
    );
    Ok(ConvergenceReport {
        mode: Mode::FscIfn,
        apply_fhat: params.apply_fhat,
        length: y.len(),
        limit: Some(limit),
        limit_estimated: estimated,
        scales,
        verdict,
    })
}

/// Real-valued statistical convergence: `{k : ‖y_k − L‖ ≥ ε}` has density zero.
pub fn statistical_real_test(
    subject: &Subject,
    space: &NormedSpace,
    params: &TestParams,
) -> Result<ConvergenceReport> {
    params.validate(subject.dim(), false)?;
    space.check_dim(&vec![0.0; subject.dim()])?;
    let y = subject.under_test(params.apply_fhat)?;
    let grid = params.grid_for(y.len())?;
    let (limit, estimated) = resolve_limit(&y, params)?;
    let mut scales = Vec::with_capacity(params.scales.len());
    for &scale in &params.scales {
        let set = exceedance_set_real(&y, &limit, scale.epsilon, space.norm)?;
        let profile = density_profile(&set, &grid, &params.density)?;
        let verdict = verdict_from_density(
            &profile,
            &params.density,
            Verdict::Converges {
                limit: limit.clone(),
            },
        );
        scales.push(ScaleResult {
            scale,
            anchor: None,
            exceedance_profile: profile,
            verdict,
        });
    }
    let verdict = aggregate(
        &scales,
        Verdict::Converges {
            limit: limit.clone(),
        },
    );
    Ok(ConvergenceReport {
        mode: Mode::StatisticalReal,
        apply_fhat: params.apply_fhat,
        length: y.len(),
        limit: Some(limit),
        limit_estimated: estimated,
        scales,
        verdict,
    })
}

/// How the Cauchy tests pick the anchor index `N(ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnchorStrategy {
    /// First index in the tail window that is not an exceedance around the
    /// estimated limit.
    #[default]
    FirstTailInlier,
    /// Up to `max_candidates` evenly spaced tail indices; keeps the one with
    /// the fewest exceedances at the end of the prefix.
    ExhaustiveScan { max_candidates: usize },
}

fn tail_start(len: usize, tail_window: f64) -> usize {
    let tail = ((tail_window * len as f64).ceil() as usize).clamp(1, len);
    len - tail + 1
}

fn anchored_set(
    y: &RealSequence,
    anchor: usize,
    is_exceedance: &dyn Fn(&[f64], &[f64]) -> bool,
) -> IndexSet {
    let base = y.term(anchor);
    collect(y.len(), y.terms().map(|v| is_exceedance(v, base)))
}

fn choose_anchor(
    y: &RealSequence,
    params: &TestParams,
    strategy: AnchorStrategy,
    is_exceedance: &dyn Fn(&[f64], &[f64]) -> bool,
) -> Result<usize> {
    let start = tail_start(y.len(), params.density.tail_window);
    match strategy {
        AnchorStrategy::FirstTailInlier => {
            let center = trimmed_tail_median(y, params.density.tail_window)?;
            Ok((start..=y.len())
                .find(|&k| !is_exceedance(y.term(k), &center))
                .unwrap_or(start))
        }
        AnchorStrategy::ExhaustiveScan { max_candidates } => {
            let span = y.len() - start + 1;
            let count = max_candidates.clamp(1, span);
            let mut best = (usize::MAX, start);
            for i in 0..count {
                let k = start + i * span / count;
                let hits = anchored_set(y, k, is_exceedance).len();
                if hits < best.0 {
                    best = (hits, k);
                }
            }
            Ok(best.1)
        }
    }
}

/// Builds the pair predicate "terms i and j are far apart" for one scale.
type PairTest<'a> = dyn Fn(Scale) -> Box<dyn Fn(&[f64], &[f64]) -> bool + 'a> + 'a;

fn cauchy_report<'a>(
    mode: Mode,
    y: &RealSequence,
    params: &TestParams,
    strategy: AnchorStrategy,
    exceedance_at: &PairTest<'a>,
) -> Result<ConvergenceReport> {
    let grid = params.grid_for(y.len())?;
    let mut scales = Vec::with_capacity(params.scales.len());
    for &scale in &params.scales {
        let test = exceedance_at(scale);
        let anchor = choose_anchor(y, params, strategy, test.as_ref())?;
        let set = anchored_set(y, anchor, test.as_ref());
        let profile = density_profile(&set, &grid, &params.density)?;
        let verdict = verdict_from_density(&profile, &params.density, Verdict::Cauchy);
        scales.push(ScaleResult {
            scale,
            anchor: Some(anchor),
            exceedance_profile: profile,
            verdict,
        });
    }
    let verdict = aggregate(&scales, Verdict::Cauchy);
    Ok(ConvergenceReport {
        mode,
        apply_fhat: params.apply_fhat,
        length: y.len(),
        limit: None,
        limit_estimated: false,
        scales,
        verdict,
    })
}

/// Fibonacci statistical Cauchy test with respect to an IFN.
pub fn fsca_ifn_test(
    subject: &Subject,
    ifn: &IntuitionisticFuzzyNorm,
    params: &TestParams,
    strategy: AnchorStrategy,
) -> Result<ConvergenceReport> {
    params.validate(subject.dim(), true)?;
    ifn.space.check_dim(&vec![0.0; subject.dim()])?;
    let y = subject.under_test(params.apply_fhat)?;
    cauchy_report(Mode::FscaIfn, &y, params, strategy, &|scale| {
        Box::new(move |v, base| {
            let (m, u) = ifn.eval_difference(v, base, scale.t);
            m <= 1.0 - scale.epsilon || u >= scale.epsilon
        })
    })
}

/// Real-valued statistical Cauchy test: `{k : ‖y_k − y_N‖ ≥ ε}` has density zero.
pub fn statistical_cauchy_real_test(
    subject: &Subject,
    space: &NormedSpace,
    params: &TestParams,
    strategy: AnchorStrategy,
) -> Result<ConvergenceReport> {
    params.validate(subject.dim(), false)?;
    space.check_dim(&vec![0.0; subject.dim()])?;
    let y = subject.under_test(params.apply_fhat)?;
    let norm = space.norm;
    cauchy_report(Mode::StatisticalCauchyReal, &y, params, strategy, &|scale| {
        Box::new(move |v, base| norm.distance(v, base) >= scale.epsilon)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrdinaryReport {
    pub scale: Scale,
    pub limit: Vec<f64>,
    pub length: usize,
    /// Smallest `N` with every `k ∈ [N, len]` inside the `(ε, t)` neighbourhood.
    pub threshold_index: Option<usize>,
    pub verdict: Verdict,
}

/// Ordinary `(T, U)`-convergence on a finite prefix.
///
/// Finds the smallest `N` such that `T(y_k − L, t) > 1 − ε` and
/// `U(y_k − L, t) < ε` for all `k ∈ [N, len]`. Converges when such an `N`
/// sits in the first half of the prefix, otherwise Undetermined.
pub fn ordinary_ifn_convergence_test(
    y: &RealSequence,
    ifn: &IntuitionisticFuzzyNorm,
    limit: &[f64],
    epsilon: f64,
    t: f64,
) -> Result<OrdinaryReport> {
    let scale = Scale::new(epsilon, t);
    scale.validate_ifn()?;
    check_limit(limit, y.dim())?;
    ifn.space.check_dim(limit)?;
    let last_bad = (1..=y.len()).rev().find(|&k| {
        let (m, u) = ifn.eval_difference(y.term(k), limit, t);
        !(m > 1.0 - epsilon && u < epsilon)
    });
    let threshold_index = match last_bad {
        None => Some(1),
        Some(k) if k < y.len() => Some(k + 1),
        Some(_) => None,
    };
    let verdict = match threshold_index {
        Some(n) if n <= y.len() / 2 || n == 1 => Verdict::Converges {
            limit: limit.to_vec(),
        },
        _ => Verdict::Undetermined,
    };
    Ok(OrdinaryReport {
        scale,
        limit: limit.to_vec(),
        length: y.len(),
        threshold_index,
        verdict,
    })
}

/// [`ordinary_ifn_convergence_test`] across every scale in `params`, on the
/// sequence selected by `params.apply_fhat`.
pub fn ordinary_ifn_test(
    subject: &Subject,
    ifn: &IntuitionisticFuzzyNorm,
    params: &TestParams,
) -> Result<(Vec<OrdinaryReport>, Verdict)> {
    params.validate(subject.dim(), true)?;
    let y = subject.under_test(params.apply_fhat)?;
    let (limit, _) = resolve_limit(&y, params)?;
    let reports = params
        .scales
        .iter()
        .map(|s| ordinary_ifn_convergence_test(&y, ifn, &limit, s.epsilon, s.t))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if reports.iter().all(|r| r.verdict.is_positive()) {
        Verdict::Converges { limit }
    } else {
        Verdict::Undetermined
    };
    Ok((reports, verdict))
}
