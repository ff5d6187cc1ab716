//! Triangular norms and conorms on `[0, 1]`, with a grid-based axiom checker.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Pure binary operation on `[0, 1]` supplied by the caller.
#[derive(Clone)]
pub struct CustomOp {
    pub name: String,
    pub op: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl CustomOp {
    pub fn new(name: impl Into<String>, op: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            op: Arc::new(op),
        }
    }
}

impl fmt::Debug for CustomOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomOp").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone, Default)]
pub enum TriangularNorm {
    #[default]
    Product,
    Minimum,
    Lukasiewicz,
    Custom(CustomOp),
}

#[derive(Debug, Clone, Default)]
pub enum TriangularConorm {
    ProbabilisticSum,
    Maximum,
    #[default]
    Lukasiewicz,
    Custom(CustomOp),
}

/// Shared surface of t-norms and t-conorms for the axiom checker.
pub trait Connective {
    fn name(&self) -> String;
    /// Neutral element: 1 for t-norms, 0 for t-conorms.
    fn identity(&self) -> f64;
    /// Applies the operation without validating the arguments.
    fn apply(&self, a: f64, b: f64) -> f64;

    fn eval(&self, a: f64, b: f64) -> Result<f64> {
        for v in [a, b] {
            if !(0.0..=1.0).contains(&v) {
                return Err(domain(format!("{} expects arguments in [0, 1], got {v}", self.name())));
            }
        }
        Ok(self.apply(a, b))
    }
}

impl Connective for TriangularNorm {
    fn name(&self) -> String {
        match self {
            TriangularNorm::Product => "product".into(),
            TriangularNorm::Minimum => "min".into(),
            TriangularNorm::Lukasiewicz => "lukasiewicz".into(),
            TriangularNorm::Custom(c) => c.name.clone(),
        }
    }

    fn identity(&self) -> f64 {
        1.0
    }

    fn apply(&self, a: f64, b: f64) -> f64 {
        match self {
            TriangularNorm::Product => a * b,
            TriangularNorm::Minimum => a.min(b),
            // Written so that T(a, 1) = a holds exactly in floating point.
            TriangularNorm::Lukasiewicz => (a - (1.0 - b)).max(0.0),
            TriangularNorm::Custom(c) => (c.op)(a, b),
        }
    }
}

impl Connective for TriangularConorm {
    fn name(&self) -> String {
        match self {
            TriangularConorm::ProbabilisticSum => "probsum".into(),
            TriangularConorm::Maximum => "max".into(),
            TriangularConorm::Lukasiewicz => "lukasiewicz".into(),
            TriangularConorm::Custom(c) => c.name.clone(),
        }
    }

    fn identity(&self) -> f64 {
        0.0
    }

    fn apply(&self, a: f64, b: f64) -> f64 {
        match self {
            TriangularConorm::ProbabilisticSum => a + b - a * b,
            TriangularConorm::Maximum => a.max(b),
            TriangularConorm::Lukasiewicz => (a + b).min(1.0),
            TriangularConorm::Custom(c) => (c.op)(a, b),
        }
    }
}

impl FromStr for TriangularNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(Self::Product),
            "min" | "minimum" => Ok(Self::Minimum),
            "lukasiewicz" => Ok(Self::Lukasiewicz),
            other => Err(domain(format!("unknown t-norm `{other}` (product|min|lukasiewicz)"))),
        }
    }
}

impl FromStr for TriangularConorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probsum" => Ok(Self::ProbabilisticSum),
            "max" | "maximum" => Ok(Self::Maximum),
            "lukasiewicz" => Ok(Self::Lukasiewicz),
            other => Err(domain(format!("unknown t-conorm `{other}` (probsum|max|lukasiewicz)"))),
        }
    }
}

pub fn tnorm_eval(op: &TriangularNorm, a: f64, b: f64) -> Result<f64> {
    op.eval(a, b)
}

pub fn tconorm_eval(op: &TriangularConorm, a: f64, b: f64) -> Result<f64> {
    op.eval(a, b)
}

/// Largest violation tolerated by [`check_axioms`].
pub const AXIOM_TOLERANCE: f64 = 1e-12;

/// The continuity surrogate: the operation must be Lipschitz in each argument
/// with at most this constant on adjacent grid points. Every shipped family is
/// 1-Lipschitz.
pub const DEFAULT_LIPSCHITZ_BOUND: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub operator: String,
    pub grid_step: f64,
    pub boundary: f64,
    pub commutativity: f64,
    pub associativity: f64,
    pub monotonicity: f64,
    pub range: f64,
    /// Observed Lipschitz constant over adjacent grid points.
    pub lipschitz: f64,
    pub lipschitz_bound: f64,
    pub passed: bool,
}

impl AxiomReport {
    /// Names of the axioms whose violation exceeded the tolerance.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (name, v) in [
            ("boundary", self.boundary),
            ("commutativity", self.commutativity),
            ("associativity", self.associativity),
            ("monotonicity", self.monotonicity),
            ("range", self.range),
        ] {
            if !(v <= AXIOM_TOLERANCE) {
                out.push(name);
            }
        }
        if !(self.lipschitz <= self.lipschitz_bound + AXIOM_TOLERANCE) {
            out.push("continuity");
        }
        out
    }
}

/// `{0, step, 2·step, …, 1}`; 1 is always included.
pub fn unit_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(domain(format!("grid step must lie in (0, 0.5], got {step}")));
    }
    let m = (1.0 / step).round() as usize;
    let mut grid: Vec<f64> = if ((m as f64) * step - 1.0).abs() < 1e-9 {
        (0..=m).map(|i| i as f64 / m as f64).collect()
    } else {
        let k = (1.0 / step).floor() as usize;
        let mut g: Vec<f64> = (0..=k).map(|i| i as f64 * step).collect();
        g.push(1.0);
        g
    };
    grid.dedup();
    Ok(grid)
}

/// Measures every t-norm/t-conorm axiom on a uniform grid over `[0, 1]`.
pub fn check_axioms(op: &dyn Connective, grid_step: f64) -> Result<AxiomReport> {
    check_axioms_with_bound(op, grid_step, DEFAULT_LIPSCHITZ_BOUND)
}

pub fn check_axioms_with_bound(
    op: &dyn Connective,
    grid_step: f64,
    lipschitz_bound: f64,
) -> Result<AxiomReport> {
    let grid = unit_grid(grid_step)?;
    let e = op.identity();
    let f = |a: f64, b: f64| op.apply(a, b);

    let mut boundary: f64 = 0.0;
    let mut commutativity: f64 = 0.0;
    let mut monotonicity: f64 = 0.0;
    let mut range: f64 = 0.0;
    let mut lipschitz: f64 = 0.0;
    for (i, &a) in grid.iter().enumerate() {
        boundary = boundary.max(dist(f(a, e), a)).max(dist(f(e, a), a));
        for (j, &b) in grid.iter().enumerate() {
            let v = f(a, b);
            range = range.max(out_of_unit(v));
            commutativity = commutativity.max(dist(v, f(b, a)));
            if i + 1 < grid.len() {
                let a2 = grid[i + 1];
                let v2 = f(a2, b);
                monotonicity = monotonicity.max(nonneg_or_nan(v - v2));
                lipschitz = lipschitz.max(slope(v2 - v, a2 - a));
            }
            if j + 1 < grid.len() {
                let b2 = grid[j + 1];
                let v2 = f(a, b2);
                monotonicity = monotonicity.max(nonneg_or_nan(v - v2));
                lipschitz = lipschitz.max(slope(v2 - v, b2 - b));
            }
        }
    }
    let mut associativity: f64 = 0.0;
    for &a in &grid {
        for &b in &grid {
            let ab = f(a, b);
            for &c in &grid {
                associativity = associativity.max(dist(f(ab, c), f(a, f(b, c))));
            }
        }
    }

    let mut report = AxiomReport {
        operator: op.name(),
        grid_step,
        boundary,
        commutativity,
        associativity,
        monotonicity,
        range,
        lipschitz,
        lipschitz_bound,
        passed: false,
    };
    report.passed = report.failures().is_empty();
    Ok(report)
}

// NaN-propagating helpers: a NaN result is a violation, never a pass.
fn dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

fn nonneg_or_nan(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v.max(0.0)
    }
}

fn out_of_unit(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        (-v).max(v - 1.0).max(0.0)
    }
}

fn slope(dv: f64, dx: f64) -> f64 {
    let s = dv.abs() / dx;
    if s.is_nan() {
        f64::INFINITY
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub tnorm: String,
    pub tconorm: String,
    /// `max |1 - (a ★ b) - ((1-a) ▲ (1-b))|` over the grid.
    pub max_violation: f64,
    pub passed: bool,
}

/// Checks `1 - (a ★ b) = (1 - a) ▲ (1 - b)` on the grid.
pub fn check_duality(
    tnorm: &TriangularNorm,
    tconorm: &TriangularConorm,
    grid_step: f64,
) -> Result<DualityReport> {
    let grid = unit_grid(grid_step)?;
    let mut worst: f64 = 0.0;
    for &a in &grid {
        for &b in &grid {
            let lhs = 1.0 - tnorm.apply(a, b);
            let rhs = tconorm.apply(1.0 - a, 1.0 - b);
            worst = worst.max(dist(lhs, rhs));
        }
    }
    Ok(DualityReport {
        tnorm: tnorm.name(),
        tconorm: tconorm.name(),
        max_violation: worst,
        passed: worst <= AXIOM_TOLERANCE,
    })
}

/// Deliberately broken operators for exercising the checkers.
pub mod mutants {
    use super::*;

    /// `a·b²`: fails commutativity.
    pub fn non_commutative() -> TriangularNorm {
        TriangularNorm::Custom(CustomOp::new("mutant:a*b^2", |a, b| a * b * b))
    }

    /// `4ab(1-a)(1-b)` in the interior with `x ★ 1 = x` patched in, so the
    /// boundary axiom holds but the operator decreases towards the edges.
    pub fn non_monotone() -> TriangularNorm {
        TriangularNorm::Custom(CustomOp::new("mutant:non-monotone", |a, b| {
            if a == 1.0 {
                b
            } else if b == 1.0 {
                a
            } else {
                (a * b * (1.0 - a) * (1.0 - b) * 4.0).min(1.0)
            }
        }))
    }

    /// `(a·b)/2`: commutative and monotone but `x ★ 1 = x/2`.
    pub fn wrong_boundary() -> TriangularNorm {
        TriangularNorm::Custom(CustomOp::new("mutant:half-product", |a, b| a * b / 2.0))
    }

    /// `max(a, b)/2`: wrong identity for a conorm.
    pub fn wrong_boundary_conorm() -> TriangularConorm {
        TriangularConorm::Custom(CustomOp::new("mutant:half-max", |a, b| a.max(b) / 2.0))
    }
}
