//! Index sets over `[1, horizon]`, counting functions, and finite-n natural
//! density estimates.
//!
//! Natural density is a limit and cannot be decided from a prefix. Every
//! verdict here is an estimate read off the tail of a sampled profile
//! `n ↦ |A ∩ [1, n]| / n`, using thresholds from [`DensityConfig`].

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A finite set of positive integers, all at most `horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indices: Vec<usize>,
    horizon: usize,
}

impl IndexSet {
    /// `indices` must be strictly increasing, positive, and `<= horizon`.
    pub fn new(indices: Vec<usize>, horizon: usize) -> Result<Self> {
        if indices.first() == Some(&0) {
            return Err(domain("index sets hold positive integers only"));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(domain(format!(
                "indices must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(&last) = indices.last() {
            if last > horizon {
                return Err(domain(format!("index {last} exceeds horizon {horizon}")));
            }
        }
        Ok(Self { indices, horizon })
    }

    pub fn from_predicate(horizon: usize, mut keep: impl FnMut(usize) -> bool) -> Self {
        let indices = (1..=horizon).filter(|&k| keep(k)).collect();
        Self { indices, horizon }
    }

    pub fn empty(horizon: usize) -> Self {
        Self {
            indices: Vec::new(),
            horizon,
        }
    }

    pub fn full(horizon: usize) -> Self {
        Self::from_predicate(horizon, |_| true)
    }

    pub fn squares(horizon: usize) -> Self {
        let indices = (1..)
            .map(|j: usize| j * j)
            .take_while(|&s| s <= horizon)
            .collect();
        Self { indices, horizon }
    }

    pub fn evens(horizon: usize) -> Self {
        Self::from_predicate(horizon, |k| k % 2 == 0)
    }

    pub fn odds(horizon: usize) -> Self {
        Self::from_predicate(horizon, |k| k % 2 == 1)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.binary_search(&k).is_ok()
    }

    /// `|A ∩ [1, n]|`.
    pub fn count_upto(&self, n: usize) -> Result<usize> {
        if n > self.horizon {
            return Err(domain(format!(
                "cannot count up to {n}: set only examined up to {}",
                self.horizon
            )));
        }
        Ok(self.indices.partition_point(|&k| k <= n))
    }

    /// `[1, horizon] \ A`.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.horizon - self.indices.len());
        let mut it = self.indices.iter().peekable();
        for k in 1..=self.horizon {
            if it.peek() == Some(&&k) {
                it.next();
            } else {
                out.push(k);
            }
        }
        Self {
            indices: out,
            horizon: self.horizon,
        }
    }

    fn same_horizon(&self, other: &Self) -> Result<()> {
        if self.horizon != other.horizon {
            return Err(domain(format!(
                "horizon mismatch: {} vs {}",
                self.horizon, other.horizon
            )));
        }
        Ok(())
    }

    fn merge(&self, other: &Self, keep: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.same_horizon(other)?;
        let (a, b) = (&self.indices, &other.indices);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() || j < b.len() {
            let (k, in_a, in_b) = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) => match x.cmp(&y) {
                    Ordering::Less => (x, true, false),
                    Ordering::Greater => (y, false, true),
                    Ordering::Equal => (x, true, true),
                },
                (Some(&x), None) => (x, true, false),
                (None, Some(&y)) => (y, false, true),
                (None, None) => unreachable!(),
            };
            if in_a {
                i += 1;
            }
            if in_b {
                j += 1;
            }
            if keep(in_a, in_b) {
                out.push(k);
            }
        }
        Ok(Self {
            indices: out,
            horizon: self.horizon,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.merge(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.merge(other, |a, b| a && b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Result<Self> {
        self.merge(other, |a, b| a != b)
    }
}

/// Thresholds for turning a sampled profile into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    /// The tail is every grid point `n >= (1 - tail_window) · n_max`.
    pub tail_window: f64,
    /// Zero needs the tail limsup below this; One needs the tail liminf above
    /// one minus this.
    pub zero_threshold: f64,
    /// Value(v) needs the tail spread below this.
    pub value_band: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            tail_window: 0.5,
            zero_threshold: 0.02,
            value_band: 0.02,
        }
    }
}

impl DensityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_window > 0.0 && self.tail_window <= 1.0) {
            return Err(domain(format!(
                "tail window must lie in (0, 1], got {}",
                self.tail_window
            )));
        }
        if !(self.zero_threshold > 0.0 && self.zero_threshold < 0.5) {
            return Err(domain(format!(
                "zero threshold must lie in (0, 0.5), got {}",
                self.zero_threshold
            )));
        }
        if !(self.value_band > 0.0 && self.value_band.is_finite()) {
            return Err(domain("value band must be positive"));
        }
        Ok(())
    }
}

/// Geometric sample grid `⌈10 · 1.5^j⌉` below `n_max`, closed by `n_max`.
pub fn geometric_grid(n_max: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let (mut num, mut den) = (10u128, 1u128); // 10 * 3^j / 2^j
    loop {
        let n = num.div_ceil(den);
        if n >= n_max as u128 {
            break;
        }
        let n = n as usize;
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        num *= 3;
        den *= 2;
    }
    if n_max > 0 {
        grid.push(n_max);
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub n: usize,
    pub count: usize,
}

impl ProfilePoint {
    /// `count / n` as an exact fraction `(numerator, denominator)`.
    pub fn exact_ratio(&self) -> (u128, u128) {
        (self.count as u128, self.n as u128)
    }

    pub fn ratio(&self) -> f64 {
        self.count as f64 / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DensityVerdict {
    Zero,
    One,
    Value(f64),
    Undetermined,
}

impl DensityVerdict {
    /// The verdict the complement set should receive.
    pub fn complement(self) -> Self {
        match self {
            DensityVerdict::Zero => DensityVerdict::One,
            DensityVerdict::One => DensityVerdict::Zero,
            DensityVerdict::Value(v) => DensityVerdict::Value(1.0 - v),
            DensityVerdict::Undetermined => DensityVerdict::Undetermined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub points: Vec<ProfilePoint>,
    pub tail_liminf: f64,
    pub tail_limsup: f64,
    pub verdict: DensityVerdict,
}

impl DensityProfile {
    pub fn final_ratio(&self) -> f64 {
        self.points.last().map(ProfilePoint::ratio).unwrap_or(0.0)
    }

    /// Builds a profile from `(n, count)` pairs already computed by the caller.
    pub fn from_points(points: Vec<ProfilePoint>, config: &DensityConfig) -> Result<Self> {
        config.validate()?;
        if points.is_empty() {
            return Err(domain("density grid must be nonempty"));
        }
        if points[0].n == 0 || points.windows(2).any(|w| w[0].n >= w[1].n) {
            return Err(domain("density grid must be strictly increasing positive integers"));
        }
        if let Some(p) = points.iter().find(|p| p.count > p.n) {
            return Err(domain(format!("count {} exceeds n = {}", p.count, p.n)));
        }

        let horizon = points[points.len() - 1].n as f64;
        let tail_from = (1.0 - config.tail_window) * horizon;
        let tail_start = points
            .iter()
            .position(|p| p.n as f64 >= tail_from)
            .unwrap_or(points.len() - 1);
        let tail = &points[tail_start..];
        let lo = tail.iter().copied().min_by(cmp_ratio).expect("nonempty tail");
        let hi = tail.iter().copied().max_by(cmp_ratio).expect("nonempty tail");

        let last3 = &points[points.len().saturating_sub(3)..];
        let nonincreasing = last3
            .windows(2)
            .all(|w| cmp_ratio(&w[0], &w[1]) != Ordering::Less);
        let nondecreasing = last3
            .windows(2)
            .all(|w| cmp_ratio(&w[0], &w[1]) != Ordering::Greater);

        // The complement's limsup is exactly 1 - liminf; computing it from the
        // integer counts keeps verdicts of A and its complement in lockstep.
        let co_limsup = (lo.n - lo.count) as f64 / lo.n as f64;
        let spread = frac_to_f64(sub_frac(hi.exact_ratio(), lo.exact_ratio()));
        let mid = frac_to_f64(mid_frac(lo.exact_ratio(), hi.exact_ratio()));

        let verdict = if hi.ratio() < config.zero_threshold && nonincreasing {
            DensityVerdict::Zero
        } else if co_limsup < config.zero_threshold && nondecreasing {
            DensityVerdict::One
        } else if spread < config.value_band {
            DensityVerdict::Value(mid)
        } else {
            DensityVerdict::Undetermined
        };

        Ok(Self {
            tail_liminf: lo.ratio(),
            tail_limsup: hi.ratio(),
            verdict,
            points,
        })
    }

    /// Writes `n,ratio` rows for plotting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "ratio"])?;
        for p in &self.points {
            w.write_record([p.n.to_string(), p.ratio().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn cmp_ratio(a: &ProfilePoint, b: &ProfilePoint) -> Ordering {
    (a.count as u128 * b.n as u128).cmp(&(b.count as u128 * a.n as u128))
}

fn sub_frac((an, ad): (u128, u128), (bn, bd): (u128, u128)) -> (u128, u128) {
    (an * bd - bn * ad, ad * bd)
}

fn mid_frac((an, ad): (u128, u128), (bn, bd): (u128, u128)) -> (u128, u128) {
    (an * bd + bn * ad, 2 * ad * bd)
}

fn frac_to_f64((n, d): (u128, u128)) -> f64 {
    let g = gcd(n, d);
    (n / g) as f64 / (d / g) as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn check_grid(set: &IndexSet, grid: &[usize]) -> Result<()> {
    match grid.last() {
        None => Err(domain("density grid must be nonempty")),
        Some(&max) if max > set.horizon() => Err(domain(format!(
            "grid reaches {max} but the set is only examined up to {}",
            set.horizon()
        ))),
        _ => Ok(()),
    }
}

/// Profile of `|A(n)| / n` over `grid`.
pub fn density_profile(
    set: &IndexSet,
    grid: &[usize],
    config: &DensityConfig,
) -> Result<DensityProfile> {
    check_grid(set, grid)?;
    let points = grid
        .iter()
        .map(|&n| {
            Ok(ProfilePoint {
                n,
                count: set.count_upto(n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DensityProfile::from_points(points, config)
}

/// Profile of `1 - |Aᶜ(n)| / n`, the finite-n upper density.
pub fn upper_density_profile(
    set: &IndexSet,
    grid: &[usize],
    config: &DensityConfig,
) -> Result<DensityProfile> {
    check_grid(set, grid)?;
    let complement = set.complement();
    let points = grid
        .iter()
        .map(|&n| {
            Ok(ProfilePoint {
                n,
                count: n - complement.count_upto(n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DensityProfile::from_points(points, config)
}

/// Finite-n surrogates of the lower-density axioms for one pair of sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAxioms {
    pub disjoint: bool,
    /// `|A ∪ B|(n) = |A|(n) + |B|(n)` at every grid point; `None` unless disjoint.
    pub disjoint_additivity: Option<bool>,
    /// `|A|(n) + |B|(n) <= n + |A ∩ B|(n)` at every grid point.
    pub intersection_bound: bool,
    /// `||A|(n) - |B|(n)| <= |A Δ B|(n)` at every grid point.
    pub symmetric_difference_bound: bool,
    /// `|A Δ B|` over the whole horizon.
    pub symmetric_difference_size: usize,
    /// Largest `||A|(n) - |B|(n)| / n` over the tail half of the grid.
    pub tail_ratio_gap: f64,
}

impl PairAxioms {
    pub fn holds(&self) -> bool {
        self.disjoint_additivity.unwrap_or(true)
            && self.intersection_bound
            && self.symmetric_difference_bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityAxiomReport {
    pub pairs: Vec<PairAxioms>,
    /// `|Z⁺ ∩ [1, n]| = n` at every grid point.
    pub full_set_normalized: bool,
    pub holds: bool,
}

/// Checks the counting surrogates of the lower-density axioms on `pairs`.
pub fn check_density_axioms(
    pairs: &[(IndexSet, IndexSet)],
    grid: &[usize],
) -> Result<DensityAxiomReport> {
    let Some(&max) = grid.last() else {
        return Err(domain("density grid must be nonempty"));
    };
    let mut out = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        a.same_horizon(b)?;
        check_grid(a, grid)?;
        let union = a.union(b)?;
        let inter = a.intersection(b)?;
        let symdiff = a.symmetric_difference(b)?;
        let disjoint = inter.is_empty();
        let mut additivity = true;
        let mut bound = true;
        let mut sd_bound = true;
        let mut tail_gap: f64 = 0.0;
        let tail_from = grid.len() / 2;
        for (i, &n) in grid.iter().enumerate() {
            let (ca, cb) = (a.count_upto(n)?, b.count_upto(n)?);
            additivity &= union.count_upto(n)? == ca + cb;
            bound &= ca + cb <= n + inter.count_upto(n)?;
            sd_bound &= ca.abs_diff(cb) <= symdiff.count_upto(n)?;
            if i >= tail_from {
                tail_gap = tail_gap.max(ca.abs_diff(cb) as f64 / n as f64);
            }
        }
        out.push(PairAxioms {
            disjoint,
            disjoint_additivity: disjoint.then_some(additivity),
            intersection_bound: bound,
            symmetric_difference_bound: sd_bound,
            symmetric_difference_size: symdiff.len(),
            tail_ratio_gap: tail_gap,
        });
    }
    let full = IndexSet::full(max);
    let full_set_normalized = grid
        .iter()
        .all(|&n| full.count_upto(n).map(|c| c == n).unwrap_or(false));
    let holds = full_set_normalized && out.iter().all(PairAxioms::holds);
    Ok(DensityAxiomReport {
        pairs: out,
        full_set_normalized,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        assert_eq!(IndexSet::squares(100).count_upto(100).unwrap(), 10);
        assert_eq!(IndexSet::empty(50).count_upto(37).unwrap(), 0);
        assert_eq!(IndexSet::evens(1000).count_upto(1000).unwrap(), 500);
    }

    #[test]
    fn counting_beyond_horizon_fails() {
        assert!(IndexSet::evens(10).count_upto(11).is_err());
    }

    #[test]
    fn new_validates() {
        assert!(IndexSet::new(vec![1, 3, 3], 5).is_err());
        assert!(IndexSet::new(vec![0, 3], 5).is_err());
        assert!(IndexSet::new(vec![1, 6], 5).is_err());
        assert!(IndexSet::new(vec![2, 5], 5).is_ok());
    }

    #[test]
    fn set_operations() {
        let a = IndexSet::new(vec![1, 2, 5], 6).unwrap();
        let b = IndexSet::new(vec![2, 3, 6], 6).unwrap();
        assert_eq!(a.union(&b).unwrap().indices(), &[1, 2, 3, 5, 6]);
        assert_eq!(a.intersection(&b).unwrap().indices(), &[2]);
        assert_eq!(a.symmetric_difference(&b).unwrap().indices(), &[1, 3, 5, 6]);
        assert_eq!(a.complement().indices(), &[3, 4, 6]);
        assert!(a.union(&IndexSet::empty(7)).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = geometric_grid(100);
        assert_eq!(g, vec![10, 15, 23, 34, 51, 76, 100]);
        assert_eq!(geometric_grid(5), vec![5]);
        assert_eq!(*geometric_grid(1_000_000).last().unwrap(), 1_000_000);
    }

    #[test]
    fn squares_profile_to_a_million() {
        let n = 1_000_000;
        let p = density_profile(&IndexSet::squares(n), &geometric_grid(n), &DensityConfig::default())
            .unwrap();
        assert_eq!(p.points.last().unwrap().exact_ratio(), (1000, 1_000_000));
        assert_eq!(p.final_ratio(), 0.001);
        assert_eq!(p.verdict, DensityVerdict::Zero);
    }

    #[test]
    fn full_set_is_one() {
        let n = 10_000;
        let p = density_profile(&IndexSet::full(n), &geometric_grid(n), &DensityConfig::default())
            .unwrap();
        assert!(p.points.iter().all(|pt| pt.ratio() == 1.0));
        assert_eq!(p.verdict, DensityVerdict::One);
    }

    #[test]
    fn evens_have_density_one_half() {
        let n = 100_000;
        let p = density_profile(&IndexSet::evens(n), &geometric_grid(n), &DensityConfig::default())
            .unwrap();
        match p.verdict {
            DensityVerdict::Value(v) => assert!((v - 0.5).abs() < 1e-3, "{v}"),
            other => panic!("expected Value, got {other:?}"),
        }
    }

    #[test]
    fn upper_density_examples() {
        let n = 1_000_000;
        let grid = geometric_grid(n);
        let cfg = DensityConfig::default();
        let evens = upper_density_profile(&IndexSet::evens(n), &grid, &cfg).unwrap();
        assert_eq!(evens.final_ratio(), 0.5);
        let empty = upper_density_profile(&IndexSet::empty(n), &grid, &cfg).unwrap();
        assert!(empty.points.iter().all(|p| p.count == 0));
        let sq = upper_density_profile(&IndexSet::squares(n), &grid, &cfg).unwrap();
        assert_eq!(sq.final_ratio(), 0.001);
        assert_eq!(sq, density_profile(&IndexSet::squares(n), &grid, &cfg).unwrap());
    }

    #[test]
    fn profile_errors() {
        let set = IndexSet::evens(100);
        let cfg = DensityConfig::default();
        assert!(density_profile(&set, &[], &cfg).is_err());
        assert!(density_profile(&set, &[10, 200], &cfg).is_err());
        assert!(density_profile(&set, &[10, 10], &cfg).is_err());
        let bad = DensityConfig {
            tail_window: 0.0,
            ..cfg
        };
        assert!(density_profile(&set, &[10], &bad).is_err());
    }

    #[test]
    fn axiom_examples() {
        let n = 10_000;
        let grid = geometric_grid(n);
        let sq = IndexSet::squares(n);
        let mut plus: Vec<usize> = sq.indices().to_vec();
        plus.extend([2, 3]);
        plus.sort_unstable();
        let sq_plus = IndexSet::new(plus, n).unwrap();
        let pairs = vec![
            (IndexSet::evens(n), IndexSet::odds(n)),
            (IndexSet::evens(n), IndexSet::evens(n)),
            (sq.clone(), sq_plus),
        ];
        let report = check_density_axioms(&pairs, &grid).unwrap();
        assert!(report.holds);
        assert_eq!(report.pairs[0].disjoint_additivity, Some(true));
        assert!(!report.pairs[1].disjoint);
        assert_eq!(report.pairs[2].symmetric_difference_size, 2);
        assert!(report.pairs[2].tail_ratio_gap <= 2.0 / grid[grid.len() / 2] as f64);
        let mismatch = vec![(IndexSet::evens(n), IndexSet::odds(n + 1))];
        assert!(check_density_axioms(&mismatch, &grid).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = density_profile(&IndexSet::evens(20), &[10, 20], &DensityConfig::default()).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,ratio\n10,0.5\n20,0.5\n");
    }
}
