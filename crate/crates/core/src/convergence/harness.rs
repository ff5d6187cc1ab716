//! Runs every classifier on a generated family and checks that their verdicts
//! are related the way the theory says they must be.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::DensityConfig;
use crate::error::Result;
use crate::generator::GeneratorSpec;
use crate::ifns::IntuitionisticFuzzyNorm;

use super::{
    estimate_statistical_limit, extract_density_one_subsequence, fsc_ifn_test, fsca_ifn_test,
    lemma_equivalence_check, ordinary_ifn_test, AnchorStrategy, ExtractionSchedule, Scale,
    TestParams, Verdict,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessConfig {
    pub scales: Vec<Scale>,
    pub density: DensityConfig,
    pub anchor: AnchorStrategy,
    pub schedule: ExtractionSchedule,
    /// Candidate limits are `L̂ + o·r_min` along the first coordinate, where
    /// `r_min` is the smallest threshold radius over the scales.
    pub candidate_offsets: Vec<f64>,
    pub apply_fhat: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            scales: vec![Scale::new(0.5, 1.0), Scale::new(0.1, 1.0), Scale::new(0.2, 0.5)],
            density: DensityConfig::default(),
            anchor: AnchorStrategy::default(),
            schedule: ExtractionSchedule::default(),
            candidate_offsets: vec![-4.0, -2.5, -1.5, -0.5, 0.0, 0.5, 1.5, 2.5, 4.0],
            apply_fhat: true,
        }
    }
}

impl HarnessConfig {
    fn params(&self, limit: Option<Vec<f64>>) -> TestParams {
        TestParams {
            scales: self.scales.clone(),
            limit,
            grid: None,
            density: self.density,
            apply_fhat: self.apply_fhat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessEvidence {
    pub radius: f64,
    pub passing_offsets: Vec<f64>,
    /// Largest distance between two passing candidates.
    pub max_separation: f64,
    /// Two limits with density-zero exceedance sets share an inlier, so they
    /// sit closer than twice the radius.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionEvidence {
    pub scale: Scale,
    pub valid: bool,
    pub tail_liminf: f64,
    pub tail_deviation: f64,
}

/// The four equivalent conditions, evaluated on one member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquivalentConditions {
    /// Some candidate limit passes the FSC-IFN test.
    pub convergent: bool,
    pub cauchy: bool,
    /// The FSC-IFN test passes at the estimated limit.
    pub completes: bool,
    /// A density-one subsequence witness exists at every scale.
    pub subsequence: bool,
}

impl EquivalentConditions {
    pub fn agree(&self) -> bool {
        let v = [self.convergent, self.cauchy, self.completes, self.subsequence];
        v.iter().all(|&b| b == v[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberEvidence {
    pub spec: String,
    pub length: usize,
    pub dim: usize,
    pub estimated_limit: Vec<f64>,
    pub ordinary: Verdict,
    pub fsc: Verdict,
    pub fsca: Verdict,
    pub fsca_anchors: Vec<Option<usize>>,
    pub uniqueness: Option<UniquenessEvidence>,
    pub lemma_identities_hold: bool,
    pub lemma_verdicts_agree: bool,
    pub extraction: Vec<ExtractionEvidence>,
    pub conditions: EquivalentConditions,
}

impl MemberEvidence {
    pub fn ordinary_implies_statistical(&self) -> bool {
        !self.ordinary.is_positive() || self.fsc.is_positive()
    }

    /// The member separates the two notions: statistically convergent but
    /// not ordinarily convergent.
    pub fn converse_fails(&self) -> bool {
        self.fsc.is_positive() && !self.ordinary.is_positive()
    }

    pub fn statistical_implies_cauchy(&self) -> bool {
        !self.fsc.is_positive() || self.fsca.is_positive()
    }

    pub fn cauchy_implies_statistical(&self) -> bool {
        !self.fsca.is_positive() || self.fsc.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremTally {
    pub name: &'static str,
    pub checked: usize,
    pub held: usize,
    pub counterexamples: Vec<String>,
}

impl TheoremTally {
    pub fn holds(&self) -> bool {
        self.held == self.checked
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessReport {
    pub ifn: String,
    pub config: HarnessConfig,
    pub members: Vec<MemberEvidence>,
    pub tallies: Vec<TheoremTally>,
    /// Members that are statistically but not ordinarily convergent.
    pub converse_counterexamples: Vec<String>,
    pub all_hold: bool,
}

impl HarnessReport {
    pub fn tally(&self, name: &str) -> Option<&TheoremTally> {
        self.tallies.iter().find(|t| t.name == name)
    }
}

pub const TALLY_NAMES: [&str; 7] = [
    "uniqueness",
    "ordinary_implies_statistical",
    "statistical_implies_cauchy",
    "cauchy_implies_statistical",
    "lemma_equivalence",
    "subsequence_extraction",
    "conditions_equivalent",
];

/// Evaluates the family. `make_ifn` builds the IFN for a member's
/// dimension. Members run in parallel; the report keeps family order.
pub fn theorem_harness(
    family: &[GeneratorSpec],
    make_ifn: &(dyn Fn(usize) -> Result<IntuitionisticFuzzyNorm> + Sync),
    config: &HarnessConfig,
) -> Result<HarnessReport> {
    let members = family
        .par_iter()
        .map(|spec| evaluate_member(spec, make_ifn, config))
        .collect::<Result<Vec<_>>>()?;
    let ifn = make_ifn(1).map(|i| i.name().to_string()).unwrap_or_default();

    let mut tallies: Vec<TheoremTally> = TALLY_NAMES
        .iter()
        .map(|&name| TheoremTally {
            name,
            checked: 0,
            held: 0,
            counterexamples: Vec::new(),
        })
        .collect();
    for m in &members {
        let results = [
            m.uniqueness.as_ref().map(|u| u.holds),
            Some(m.ordinary_implies_statistical()),
            Some(m.statistical_implies_cauchy()),
            Some(m.cauchy_implies_statistical()),
            Some(m.lemma_identities_hold && m.lemma_verdicts_agree),
            // Extraction must succeed whenever the member converges.
            Some(!m.fsc.is_positive() || m.conditions.subsequence),
            Some(m.conditions.agree()),
        ];
        for (tally, result) in tallies.iter_mut().zip(results) {
            if let Some(ok) = result {
                tally.checked += 1;
                if ok {
                    tally.held += 1;
                } else {
                    tally.counterexamples.push(m.spec.clone());
                }
            }
        }
    }
    let converse_counterexamples = members
        .iter()
        .filter(|m| m.converse_fails())
        .map(|m| m.spec.clone())
        .collect();
    let all_hold = tallies.iter().all(TheoremTally::holds);
    Ok(HarnessReport {
        ifn,
        config: config.clone(),
        members,
        tallies,
        converse_counterexamples,
        all_hold,
    })
}

fn evaluate_member(
    spec: &GeneratorSpec,
    make_ifn: &(dyn Fn(usize) -> Result<IntuitionisticFuzzyNorm> + Sync),
    config: &HarnessConfig,
) -> Result<MemberEvidence> {
    let subject = spec.generate()?;
    let ifn = make_ifn(subject.dim())?;
    let base = config.params(None);
    let limit = estimate_statistical_limit(&subject, &base)?;
    let at_limit = config.params(Some(limit.clone()));

    let (_, ordinary) = ordinary_ifn_test(&subject, &ifn, &at_limit)?;
    let fsc = fsc_ifn_test(&subject, &ifn, &at_limit)?;
    let fsca = fsca_ifn_test(&subject, &ifn, &base, config.anchor)?;

    let radius = config
        .scales
        .iter()
        .map(|s| ifn.threshold_radius(s.epsilon, s.t))
        .collect::<Option<Vec<f64>>>()
        .map(|r| r.into_iter().fold(f64::INFINITY, f64::min));

    let mut passing = Vec::new();
    let mut any_candidate = false;
    for &offset in &config.candidate_offsets {
        let step = radius.unwrap_or(1.0);
        let mut candidate = limit.clone();
        candidate[0] += offset * step;
        let report = fsc_ifn_test(&subject, &ifn, &config.params(Some(candidate)))?;
        if report.passed() {
            any_candidate = true;
            passing.push(offset);
        }
    }
    let uniqueness = radius.map(|r| {
        let spread = match (passing.first(), passing.last()) {
            (Some(lo), Some(hi)) => (hi - lo) * r,
            _ => 0.0,
        };
        UniquenessEvidence {
            radius: r,
            passing_offsets: passing.clone(),
            max_separation: spread,
            bound: 2.0 * r,
            holds: spread < 2.0 * r,
        }
    });

    let mut identities = true;
    let mut agree = true;
    let mut extraction = Vec::with_capacity(config.scales.len());
    for &scale in &config.scales {
        let lemma = lemma_equivalence_check(&subject, &ifn, &limit, scale, &at_limit)?;
        identities &= lemma.counting_identities_hold;
        agree &= lemma.verdicts_agree;
        let w = extract_density_one_subsequence(
            &subject,
            &ifn,
            &limit,
            scale,
            &config.schedule,
            &at_limit,
        )?;
        extraction.push(ExtractionEvidence {
            scale,
            valid: w.valid,
            tail_liminf: w.profile.tail_liminf,
            tail_deviation: w.tail_deviation,
        });
    }

    let conditions = EquivalentConditions {
        convergent: any_candidate,
        cauchy: fsca.passed(),
        completes: fsc.passed(),
        subsequence: extraction.iter().all(|e| e.valid),
    };
    Ok(MemberEvidence {
        spec: spec.to_string(),
        length: subject.len(),
        dim: subject.dim(),
        estimated_limit: limit,
        ordinary,
        fsc: fsc.verdict,
        fsca_anchors: fsca.scales.iter().map(|s| s.anchor).collect(),
        fsca: fsca.verdict,
        uniqueness,
        lemma_identities_hold: identities,
        lemma_verdicts_agree: agree,
        extraction,
        conditions,
    })
}
