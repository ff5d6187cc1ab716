use serde::Serialize;

use crate::density::{density_profile, DensityVerdict, IndexSet};
use crate::error::Result;
use crate::ifns::{IntuitionisticFuzzyNorm, Norm};
use crate::sequence::{RealSequence, Subject};

use super::{check_limit, exceedance_set_real, exceedance_sets_split, Scale, TestParams};

/// Counts at one grid point. `A` is the membership-condition set
/// `{T ≤ 1 − ε}`, `B` the nonmembership-condition set `{U ≥ ε}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaPoint {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub union: usize,
    pub a_complement: usize,
    pub b_complement: usize,
    /// `|Aᶜ ∩ Bᶜ|`, the indices inside the neighbourhood.
    pub inside: usize,
}

/// The five equivalent statements as finite-n verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaVerdicts {
    /// `A ∪ B` has density zero.
    pub union_zero: bool,
    /// `A` and `B` each have density zero.
    pub both_zero: bool,
    /// `Aᶜ` and `Bᶜ` each have density one.
    pub complements_one: bool,
    /// `Aᶜ ∩ Bᶜ` has density one.
    pub inside_one: bool,
    /// `T_k → 1` and `U_k → 0` statistically, as real sequences.
    pub statistical_limits: bool,
}

impl LemmaVerdicts {
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.union_zero,
            self.both_zero,
            self.complements_one,
            self.inside_one,
            self.statistical_limits,
        ]
    }

    pub fn agree(&self) -> bool {
        let v = self.as_array();
        v.iter().all(|&b| b == v[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub scale: Scale,
    pub limit: Vec<f64>,
    pub points: Vec<LemmaPoint>,
    /// `max(|A|, |B|) ≤ |A ∪ B| ≤ |A| + |B|` and the complement counts add up,
    /// at every grid point.
    pub counting_identities_hold: bool,
    pub verdicts: LemmaVerdicts,
    pub verdicts_agree: bool,
}

/// Checks the counting identities and verdict agreement behind the five
/// equivalent forms of FSC-IFN convergence at one scale.
pub fn lemma_equivalence_check(
    subject: &Subject,
    ifn: &IntuitionisticFuzzyNorm,
    limit: &[f64],
    scale: Scale,
    params: &TestParams,
) -> Result<LemmaReport> {
    check_limit(limit, subject.dim())?;
    let y = subject.under_test(params.apply_fhat)?;
    let grid = params.grid_for(y.len())?;
    let cfg = &params.density;

    let (a, b) = exceedance_sets_split(&y, ifn, limit, scale.epsilon, scale.t)?;
    let union = a.union(&b)?;
    let (ac, bc) = (a.complement(), b.complement());
    let inside = ac.intersection(&bc)?;

    let mut points = Vec::with_capacity(grid.len());
    let mut ok = true;
    for &n in &grid {
        let p = LemmaPoint {
            n,
            a: a.count_upto(n)?,
            b: b.count_upto(n)?,
            union: union.count_upto(n)?,
            a_complement: ac.count_upto(n)?,
            b_complement: bc.count_upto(n)?,
            inside: inside.count_upto(n)?,
        };
        ok &= p.a.max(p.b) <= p.union && p.union <= p.a + p.b;
        ok &= p.a + p.a_complement == n && p.b + p.b_complement == n;
        ok &= p.inside + p.union == n;
        points.push(p);
    }

    let is = |set: &IndexSet, want: DensityVerdict| -> Result<bool> {
        Ok(density_profile(set, &grid, cfg)?.verdict == want)
    };

    // Statement (v) goes through the real-valued test on the scalar
    // sequences of memberships and nonmemberships.
    let (mem, non): (Vec<f64>, Vec<f64>) = y
        .terms()
        .map(|v| ifn.eval_difference(v, limit, scale.t))
        .unzip();
    let mem = RealSequence::scalar(mem, "membership")?;
    let non = RealSequence::scalar(non, "nonmembership")?;
    let t_off = exceedance_set_real(&mem, &[1.0], scale.epsilon, Norm::Abs)?;
    let u_off = exceedance_set_real(&non, &[0.0], scale.epsilon, Norm::Abs)?;

    let verdicts = LemmaVerdicts {
        union_zero: is(&union, DensityVerdict::Zero)?,
        both_zero: is(&a, DensityVerdict::Zero)? && is(&b, DensityVerdict::Zero)?,
        complements_one: is(&ac, DensityVerdict::One)? && is(&bc, DensityVerdict::One)?,
        inside_one: is(&inside, DensityVerdict::One)?,
        statistical_limits: is(&t_off, DensityVerdict::Zero)? && is(&u_off, DensityVerdict::Zero)?,
    };
    Ok(LemmaReport {
        scale,
        limit: limit.to_vec(),
        points,
        counting_identities_hold: ok,
        verdicts_agree: verdicts.agree(),
        verdicts,
    })
}
