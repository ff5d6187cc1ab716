//! Intuitionistic fuzzy norms `(T, U)` on `ℝ^d`.
//!
//! The standard construction induced by a norm is
//!
//! ```text
//! T(x, t) = t / (t + ‖x‖)        U(x, t) = ‖x‖ / (t + ‖x‖)
//! ```
//!
//! paired with the product t-norm and the Łukasiewicz t-conorm. For it,
//! `T(x, t) <= 1 - ε  ⇔  ‖x‖ >= εt / (1 - ε)  ⇔  U(x, t) >= ε`, which the
//! convergence tests use as an independent oracle.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::fuzzy_algebra::{Connective, TriangularConorm, TriangularNorm, AXIOM_TOLERANCE};

pub const DEFAULT_AXIOM_SEED: u64 = 0xF1B0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// `|x|`, only for `d = 1`.
    Abs,
    Euclidean,
    Max,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::Abs => "abs",
            Norm::Euclidean => "l2",
            Norm::Max => "max",
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Norm::Abs => x.iter().map(|v| v.abs()).fold(0.0, f64::max),
            Norm::Max => x.iter().map(|v| v.abs()).fold(0.0, f64::max),
            Norm::Euclidean => {
                // scaled to stay finite for huge entries
                let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
                if scale == 0.0 || !scale.is_finite() {
                    return scale;
                }
                scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
            }
        }
    }

    /// `‖x - y‖` without allocating.
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        if x.len() == 1 {
            return (x[0] - y[0]).abs();
        }
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.eval(&diff)
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs" => Ok(Norm::Abs),
            "l2" | "euclidean" => Ok(Norm::Euclidean),
            "max" => Ok(Norm::Max),
            other => Err(domain(format!("unknown norm `{other}` (abs|l2|max)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormedSpace {
    pub dim: usize,
    pub norm: Norm,
}

impl NormedSpace {
    pub fn new(dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(domain("space dimension must be >= 1"));
        }
        if norm == Norm::Abs && dim != 1 {
            return Err(domain("the absolute-value norm needs dimension 1"));
        }
        Ok(Self { dim, norm })
    }

    /// `ℝ` with `|·|`.
    pub fn real_line() -> Self {
        Self {
            dim: 1,
            norm: Norm::Abs,
        }
    }

    pub fn norm_of(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.norm.eval(x))
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(domain(format!(
                "vector has dimension {}, space has {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

type Membership = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum IfnKind {
    Standard,
    Custom {
        name: String,
        membership: Membership,
        nonmembership: Membership,
    },
}

impl fmt::Debug for IfnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IfnKind::Standard => f.write_str("Standard"),
            IfnKind::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

/// A membership/nonmembership pair over a normed space, with its t-norm and
/// t-conorm.
#[derive(Debug, Clone)]
pub struct IntuitionisticFuzzyNorm {
    pub space: NormedSpace,
    pub tnorm: TriangularNorm,
    pub tconorm: TriangularConorm,
    pub kind: IfnKind,
}

/// The norm-induced IFN with product t-norm and Łukasiewicz t-conorm.
pub fn standard_ifn(space: NormedSpace) -> IntuitionisticFuzzyNorm {
    IntuitionisticFuzzyNorm {
        space,
        tnorm: TriangularNorm::Product,
        tconorm: TriangularConorm::Lukasiewicz,
        kind: IfnKind::Standard,
    }
}

impl IntuitionisticFuzzyNorm {
    pub fn custom(
        space: NormedSpace,
        name: impl Into<String>,
        membership: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        nonmembership: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            space,
            tnorm: TriangularNorm::Product,
            tconorm: TriangularConorm::Lukasiewicz,
            kind: IfnKind::Custom {
                name: name.into(),
                membership: Arc::new(membership),
                nonmembership: Arc::new(nonmembership),
            },
        }
    }

    pub fn with_connectives(mut self, tnorm: TriangularNorm, tconorm: TriangularConorm) -> Self {
        self.tnorm = tnorm;
        self.tconorm = tconorm;
        self
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            IfnKind::Standard => "standard",
            IfnKind::Custom { name, .. } => name,
        }
    }

    pub fn is_standard(&self) -> bool {
        matches!(self.kind, IfnKind::Standard)
    }

    /// `εt / (1 - ε)`: the norm radius at which the standard IFN's conditions
    /// switch. `None` for custom IFNs.
    pub fn threshold_radius(&self, epsilon: f64, t: f64) -> Option<f64> {
        self.is_standard().then(|| epsilon * t / (1.0 - epsilon))
    }

    /// `(T(x, t), U(x, t))` with argument validation.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return Err(domain(format!("t must be positive, got {t}")));
        }
        self.space.check_dim(x)?;
        Ok(self.eval_unchecked(x, t))
    }

    pub fn eval_unchecked(&self, x: &[f64], t: f64) -> (f64, f64) {
        match &self.kind {
            IfnKind::Standard => standard_pair(self.space.norm.eval(x), t),
            IfnKind::Custom {
                membership,
                nonmembership,
                ..
            } => (membership(x, t), nonmembership(x, t)),
        }
    }

    /// `(T(x - y, t), U(x - y, t))`.
    pub fn eval_difference(&self, x: &[f64], y: &[f64], t: f64) -> (f64, f64) {
        match &self.kind {
            IfnKind::Standard => standard_pair(self.space.norm.distance(x, y), t),
            IfnKind::Custom { .. } => {
                let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                self.eval_unchecked(&diff, t)
            }
        }
    }
}

fn standard_pair(r: f64, t: f64) -> (f64, f64) {
    (t / (t + r), r / (t + r))
}

pub fn ifn_eval(ifn: &IntuitionisticFuzzyNorm, x: &[f64], t: f64) -> Result<(f64, f64)> {
    ifn.eval(x, t)
}

/// One row of an axiom report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub max_violation: f64,
    /// Samples whose violation exceeded the tolerance.
    pub failures: usize,
    /// Whether this check counts towards `passed`.
    pub required: bool,
}

impl AxiomCheck {
    fn new(name: &'static str, required: bool) -> Self {
        Self {
            name,
            max_violation: 0.0,
            failures: 0,
            required,
        }
    }

    fn record(&mut self, violation: f64) {
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > self.max_violation {
            self.max_violation = v;
        }
        if v > AXIOM_TOLERANCE {
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IfnAxiomReport {
    pub ifn: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
    pub passed: bool,
}

impl IfnAxiomReport {
    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.required && !c.passed())
            .map(|c| c.name)
            .collect()
    }
}

// Strict relations are all-or-nothing: a failure counts as a full unit of
// violation so that, say, T = 0 cannot hide under the tolerance.
fn strict(holds: bool) -> f64 {
    if holds {
        0.0
    } else {
        1.0
    }
}

fn le(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        (a - b).max(0.0)
    }
}

fn eq(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn signed_log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = log_uniform(rng, lo, hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

const T_RANGE: (f64, f64) = (1e-3, 1e3);
const T_HUGE: f64 = 1e200;
const T_TINY: f64 = 1e-200;
const CONTINUITY_STEP: f64 = 1e-13;

/// Checks the thirteen IFN axioms on seeded pseudo-random samples.
///
/// Vectors have log-uniform coordinates in `±[1e-3, 1e3]`, scalars
/// `α ∈ ±[1e-2, 1e2]`, and `t, s` are log-uniform in `[1e-3, 1e3]`.
/// Continuity is probed with a relative step of `1e-13` in `t`; the limits at
/// `0⁺` and `∞` are probed at `t = 1e-200` and `t = 1e200`.
///
/// Nondecreasingness of `T(x, ·)` (and nonincreasingness of `U(x, ·)`) is
/// always measured but only required of the standard IFN.
pub fn check_ifn_axioms(
    ifn: &IntuitionisticFuzzyNorm,
    sample_count: usize,
    seed: u64,
) -> Result<IfnAxiomReport> {
    if sample_count == 0 {
        return Err(domain("sample count must be >= 1"));
    }
    let d = ifn.space.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let standard = ifn.is_standard();

    let mut c = [
        AxiomCheck::new("sum_at_most_one", true),
        AxiomCheck::new("membership_positive", true),
        AxiomCheck::new("membership_one_iff_zero", true),
        AxiomCheck::new("membership_scaling", true),
        AxiomCheck::new("membership_triangle", true),
        AxiomCheck::new("membership_continuous", true),
        AxiomCheck::new("membership_limits", true),
        AxiomCheck::new("nonmembership_below_one", true),
        AxiomCheck::new("nonmembership_zero_iff_zero", true),
        AxiomCheck::new("nonmembership_scaling", true),
        AxiomCheck::new("nonmembership_triangle", true),
        AxiomCheck::new("nonmembership_continuous", true),
        AxiomCheck::new("nonmembership_limits", true),
        AxiomCheck::new("membership_monotone_in_t", standard),
        AxiomCheck::new("nonmembership_monotone_in_t", standard),
    ];

    let zero = vec![0.0; d];
    let tn = &ifn.tnorm;
    let tc = &ifn.tconorm;
    let ev = |x: &[f64], t: f64| ifn.eval_unchecked(x, t);

    for _ in 0..sample_count {
        let x: Vec<f64> = (0..d).map(|_| signed_log_uniform(&mut rng, 1e-3, 1e3)).collect();
        let y: Vec<f64> = (0..d).map(|_| signed_log_uniform(&mut rng, 1e-3, 1e3)).collect();
        let alpha = signed_log_uniform(&mut rng, 1e-2, 1e2);
        let t = log_uniform(&mut rng, T_RANGE.0, T_RANGE.1);
        let s = log_uniform(&mut rng, T_RANGE.0, T_RANGE.1);

        let (tx, ux) = ev(&x, t);
        let (ty, uy) = ev(&y, s);
        let (t0, u0) = ev(&zero, t);

        c[0].record(le(tx + ux, 1.0).max(le(t0 + u0, 1.0)));
        c[1].record(strict(tx > 0.0).max(strict(t0 > 0.0)));
        c[2].record(eq(t0, 1.0).max(strict(tx < 1.0)));

        let ax: Vec<f64> = x.iter().map(|v| alpha * v).collect();
        let (tax, uax) = ev(&ax, t);
        let (tsc, usc) = ev(&x, t / alpha.abs());
        c[3].record(eq(tax, tsc));
        c[9].record(eq(uax, usc));

        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (tsum, usum) = ev(&sum, t + s);
        c[4].record(le(tn.apply(tx, ty), tsum));
        c[10].record(le(usum, tc.apply(ux, uy)));

        let t_next = t * (1.0 + CONTINUITY_STEP);
        let (tx2, ux2) = ev(&x, t_next);
        c[5].record(eq(tx2, tx));
        c[11].record(eq(ux2, ux));
        c[13].record(le(tx, tx2));
        c[14].record(le(ux2, ux));

        let (t_big, u_big) = ev(&x, T_HUGE);
        let (t_small, u_small) = ev(&x, T_TINY);
        c[6].record(eq(t_big, 1.0).max(eq(t_small, 0.0)));
        c[12].record(eq(u_big, 0.0).max(eq(u_small, 1.0)));

        c[7].record(strict(ux < 1.0).max(strict(u0 < 1.0)));
        c[8].record(eq(u0, 0.0).max(strict(ux > 0.0)));
    }

    let checks = c.to_vec();
    let passed = checks.iter().filter(|c| c.required).all(AxiomCheck::passed);
    Ok(IfnAxiomReport {
        ifn: ifn.name().to_string(),
        samples: sample_count,
        seed,
        tolerance: AXIOM_TOLERANCE,
        checks,
        passed,
    })
}

/// Broken IFNs for exercising the axiom suite.
pub mod mutants {
    use super::*;

    /// `T' = T`, `U' = 1 - T/2`: violates `T + U <= 1` (at `x = 0` the sum is 1.5).
    pub fn broken_sum(space: NormedSpace) -> IntuitionisticFuzzyNorm {
        let norm = space.norm;
        IntuitionisticFuzzyNorm::custom(
            space,
            "broken",
            move |x, t| t / (t + norm.eval(x)),
            move |x, t| 1.0 - 0.5 * t / (t + norm.eval(x)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> IntuitionisticFuzzyNorm {
        standard_ifn(NormedSpace::real_line())
    }

    #[test]
    fn standard_values() {
        let ifn = line();
        assert_eq!(ifn.eval(&[0.0], 1.0).unwrap(), (1.0, 0.0));
        assert_eq!(ifn.eval(&[3.0], 1.0).unwrap(), (0.25, 0.75));
        assert_eq!(ifn.eval(&[-1.0], 1.0).unwrap(), (0.5, 0.5));
        assert_eq!(ifn.eval(&[1.0], 3.0).unwrap(), (0.75, 0.25));
        let (m, _) = ifn.eval(&[1.0], 1e9).unwrap();
        assert!((1.0 - m).abs() < 1e-8);
    }

    #[test]
    fn eval_errors() {
        let ifn = line();
        assert!(ifn.eval(&[1.0], 0.0).is_err());
        assert!(ifn.eval(&[1.0], -2.0).is_err());
        assert!(ifn.eval(&[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn space_validation() {
        assert!(NormedSpace::new(0, Norm::Max).is_err());
        assert!(NormedSpace::new(2, Norm::Abs).is_err());
        let s = NormedSpace::new(2, Norm::Euclidean).unwrap();
        assert_eq!(s.norm_of(&[3.0, 4.0]).unwrap(), 5.0);
        let m = NormedSpace::new(2, Norm::Max).unwrap();
        assert_eq!(m.norm_of(&[3.0, -4.0]).unwrap(), 4.0);
    }

    #[test]
    fn euclidean_norm_survives_huge_entries() {
        let v = Norm::Euclidean.eval(&[1e200, 1e200]);
        assert!(v.is_finite());
        assert!((v / 1e200 - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scaling_by_minus_two_is_exact() {
        let ifn = line();
        for x in [0.3, 1.0, 7.5, 123.0] {
            for t in [0.01, 1.0, 40.0] {
                let lhs = ifn.eval(&[-2.0 * x], t).unwrap();
                let rhs = ifn.eval(&[x], t / 2.0).unwrap();
                assert!((lhs.0 - rhs.0).abs() <= 1e-15 && (lhs.1 - rhs.1).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn threshold_equivalence() {
        let ifn = line();
        for (eps, t) in [(0.5, 1.0), (0.1, 2.0), (0.9, 0.3)] {
            let r = ifn.threshold_radius(eps, t).unwrap();
            for x in [0.0, r * 0.5, r * 0.999, r * 1.001, r * 3.0] {
                let (m, u) = ifn.eval(&[x], t).unwrap();
                assert_eq!(m <= 1.0 - eps, x >= r, "eps={eps} t={t} x={x}");
                assert_eq!(u >= eps, x >= r);
            }
        }
    }

    #[test]
    fn standard_passes_axioms() {
        let r = check_ifn_axioms(&line(), 2000, DEFAULT_AXIOM_SEED).unwrap();
        assert!(r.passed, "{:?}", r.failed());
        assert_eq!(r.checks.iter().filter(|c| c.required).count(), 15);
        let l2 = standard_ifn(NormedSpace::new(3, Norm::Euclidean).unwrap());
        assert!(check_ifn_axioms(&l2, 500, 7).unwrap().passed);
    }

    #[test]
    fn broken_pair_is_flagged() {
        let r = check_ifn_axioms(&mutants::broken_sum(NormedSpace::real_line()), 100, 1).unwrap();
        assert!(!r.passed);
        assert!(r.failed().contains(&"sum_at_most_one"));
    }

    #[test]
    fn axiom_report_is_deterministic() {
        let a = check_ifn_axioms(&line(), 300, 11).unwrap();
        let b = check_ifn_axioms(&line(), 300, 11).unwrap();
        assert_eq!(a, b);
        assert!(check_ifn_axioms(&line(), 0, 11).is_err());
    }
}
