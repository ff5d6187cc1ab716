use serde::Serialize;

use crate::density::{density_profile, DensityProfile, DensityVerdict, IndexSet};
use crate::error::{domain, Result};
use crate::ifns::IntuitionisticFuzzyNorm;
use crate::sequence::Subject;

use super::{check_limit, Scale, TestParams};

/// Nonincreasing tolerances `ε_1 ≥ ε_2 ≥ …` for the nested sets
/// `M(u) = {k : T(F̂x_k − L, t) > 1 − ε_u and U(F̂x_k − L, t) < ε_u}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionSchedule {
    pub levels: Vec<f64>,
}

impl ExtractionSchedule {
    /// `ε_u = 1/u` for `u = 1..=levels`.
    pub fn harmonic(levels: usize) -> Self {
        Self {
            levels: (1..=levels).map(|u| 1.0 / u as f64).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.levels.len() < 2 {
            return Err(domain("extraction schedule needs at least two levels"));
        }
        if self.levels.windows(2).any(|w| w[1] > w[0]) || self.levels.iter().any(|&e| !(e > 0.0)) {
            return Err(domain("extraction schedule must be positive and nonincreasing"));
        }
        Ok(())
    }
}

impl Default for ExtractionSchedule {
    fn default() -> Self {
        Self::harmonic(256)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsequenceWitness {
    pub scale: Scale,
    pub limit: Vec<f64>,
    /// `n_1 < n_2 < …`; the interval `(n_u, n_{u+1}]` draws from `M(u+1)`.
    pub cutoffs: Vec<usize>,
    #[serde(skip)]
    pub indices: IndexSet,
    pub size: usize,
    pub profile: DensityProfile,
    /// `sup max(1 − T, U)` over the later half of the extracted subsequence.
    pub tail_deviation: f64,
    pub valid: bool,
    #[serde(skip)]
    pub values: Vec<f64>,
}

/// Builds an increasing index set `J` of (estimated) density one along which
/// the sequence under test converges to `limit` in the IFN.
///
/// Cutoffs are greedy: `n_u` is the smallest `n > n_{u−1}` at which
/// `|M(u+1) ∩ [1, n]| / n > 1 − 2ε_u`. Indices in `(n_u, n_{u+1}]` are taken
/// from `M(u+1)`; the last interval runs to the end of the prefix and the
/// initial block `[1, n_1]` shares the set of the block after it.
///
/// The witness is valid when `J` gets density verdict One and the deviation
/// over the later half of `J` is below `scale.epsilon`.
pub fn extract_density_one_subsequence(
    subject: &Subject,
    ifn: &IntuitionisticFuzzyNorm,
    limit: &[f64],
    scale: Scale,
    schedule: &ExtractionSchedule,
    params: &TestParams,
) -> Result<SubsequenceWitness> {
    scale.validate_ifn()?;
    schedule.validate()?;
    check_limit(limit, subject.dim())?;
    let y = subject.under_test(params.apply_fhat)?;
    let len = y.len();
    let grid = params.grid_for(len)?;

    let pairs: Vec<(f64, f64)> = y
        .terms()
        .map(|v| ifn.eval_difference(v, limit, scale.t))
        .collect();
    let in_level = |k: usize, eps: f64| {
        let (m, u) = pairs[k - 1];
        m > 1.0 - eps && u < eps
    };
    let levels = &schedule.levels;

    // cutoffs[i] is n_{i+1}; the interval after it draws from M(i + 2),
    // i.e. levels[i + 1].
    let mut cutoffs: Vec<usize> = Vec::new();
    for u in 0..levels.len() - 1 {
        let next_eps = levels[u + 1];
        let target = 1.0 - 2.0 * levels[u];
        let start = cutoffs.last().copied().unwrap_or(0);
        let mut count = (1..=start).filter(|&k| in_level(k, next_eps)).count();
        let mut found = None;
        for n in start + 1..=len {
            if in_level(n, next_eps) {
                count += 1;
            }
            if count as f64 / n as f64 > target {
                found = Some(n);
                break;
            }
        }
        match found {
            Some(n) => cutoffs.push(n),
            None => break,
        }
    }

    // The initial block [1, n_1] draws from the same set as (n_1, n_2].
    let mut indices: Vec<usize> = match cutoffs.first() {
        Some(&n1) => (1..=n1).filter(|&k| in_level(k, levels[1])).collect(),
        None => Vec::new(),
    };
    for (i, &lo) in cutoffs.iter().enumerate() {
        let hi = cutoffs.get(i + 1).copied().unwrap_or(len);
        let eps = levels[i + 1];
        indices.extend((lo + 1..=hi).filter(|&k| in_level(k, eps)));
    }
    let indices = IndexSet::new(indices, len)?;
    let profile = density_profile(&indices, &grid, &params.density)?;

    let picked = indices.indices();
    let tail_deviation = picked[picked.len() / 2..]
        .iter()
        .map(|&k| {
            let (m, u) = pairs[k - 1];
            (1.0 - m).max(u)
        })
        .fold(0.0, f64::max);
    let valid = !cutoffs.is_empty()
        && !picked.is_empty()
        && profile.verdict == DensityVerdict::One
        && tail_deviation < scale.epsilon;
    let values = picked.iter().flat_map(|&k| y.term(k).to_vec()).collect();

    Ok(SubsequenceWitness {
        scale,
        limit: limit.to_vec(),
        cutoffs,
        size: indices.len(),
        indices,
        profile,
        tail_deviation,
        valid,
        values,
    })
}
