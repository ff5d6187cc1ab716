//! Exact Fibonacci numbers, the classical identities, and the Fibonacci
//! difference operator F̂.
//!
//! Convention: `f_1 = f_2 = 1`. F̂ is the lower-bidiagonal operator
//!
//! ```text
//! (F̂x)_1 = (f_1/f_2) x_1
//! (F̂x)_n = (f_n/f_{n+1}) x_n - (f_{n+1}/f_n) x_{n-1}     n >= 2
//! ```
//!
//! Its inverse is forward substitution, which amplifies floating-point error
//! by roughly the golden ratio squared per step. Use [`Arithmetic::Exact`]
//! for anything longer than a few dozen terms where the round trip matters.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::sequence::RealSequence;

/// The golden ratio `(1 + √5) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Memoized exact Fibonacci numbers `f_0 ..= f_max`.
///
/// Built once and then only read, so a table can be shared between threads.
#[derive(Debug, Clone)]
pub struct FibTable {
    values: Vec<BigUint>,
}

impl FibTable {
    /// Table holding `f_0` through `f_max`.
    pub fn new(max: usize) -> Self {
        let mut values = Vec::with_capacity(max.max(2) + 1);
        values.push(BigUint::zero());
        values.push(BigUint::one());
        for n in 2..=max {
            let next = &values[n - 1] + &values[n - 2];
            values.push(next);
        }
        values.truncate(max.max(1) + 1);
        Self { values }
    }

    /// Largest index held.
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    /// `f_n`, for `1 <= n <= max_index()`.
    pub fn get(&self, n: usize) -> Result<&BigUint> {
        if n == 0 {
            return Err(domain("Fibonacci index must be >= 1"));
        }
        self.values
            .get(n)
            .ok_or_else(|| domain(format!("f_{n} is beyond the table (max {})", self.max_index())))
    }

    fn signed(&self, n: usize) -> Result<BigInt> {
        Ok(BigInt::from(self.get(n)?.clone()))
    }
}

/// `f_n` with `f_1 = f_2 = 1`.
pub fn fib(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(domain("Fibonacci index must be >= 1"));
    }
    Ok(FibTable::new(n).get(n)?.clone())
}

/// `(f_1 + … + f_n) - (f_{n+2} - 1)`, which is zero for every `n >= 1`.
pub fn check_sum_identity(n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(domain("sum identity needs n >= 1"));
    }
    let table = FibTable::new(n + 2);
    let mut sum = BigInt::zero();
    for k in 1..=n {
        sum += table.signed(k)?;
    }
    Ok(sum - (table.signed(n + 2)? - BigInt::one()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CassiniReport {
    pub n: usize,
    /// `f_{n-1} f_{n+1} - f_n^2`.
    pub residual: BigInt,
    /// `(-1)^n`.
    pub expected: i8,
    pub matches: bool,
}

/// Evaluates `f_{n-1} f_{n+1} - f_n^2` exactly and compares it with `(-1)^n`.
pub fn check_cassini(n: usize) -> Result<CassiniReport> {
    if n < 2 {
        return Err(domain("Cassini identity needs n >= 2"));
    }
    let table = FibTable::new(n + 1);
    let fn_ = table.signed(n)?;
    let residual = table.signed(n - 1)? * table.signed(n + 1)? - &fn_ * &fn_;
    let expected: i8 = if n.is_multiple_of(2) { 1 } else { -1 };
    let matches = residual == BigInt::from(expected);
    Ok(CassiniReport {
        n,
        residual,
        expected,
        matches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenRatioEstimate {
    pub n: usize,
    /// `f_{n+1} / f_n` rounded to `f64`.
    pub ratio: f64,
    pub reference: f64,
}

impl GoldenRatioEstimate {
    pub fn error(&self) -> f64 {
        (self.ratio - self.reference).abs()
    }
}

pub fn golden_ratio_estimate(n: usize) -> Result<GoldenRatioEstimate> {
    let table = FibTable::new(n + 1);
    let ratio = BigRational::new(table.signed(n + 1)?, table.signed(n)?);
    Ok(GoldenRatioEstimate {
        n,
        ratio: ratio.to_f64().unwrap_or(f64::NAN),
        reference: GOLDEN_RATIO,
    })
}

/// Row `n` of F̂ in exact and floating-point form.
#[derive(Debug, Clone, PartialEq)]
pub struct FhatRow {
    pub n: usize,
    /// `f_n / f_{n+1}`.
    pub diag: BigRational,
    /// `-f_{n+1} / f_n`; absent on the first row.
    pub sub: Option<BigRational>,
    pub diag_f64: f64,
    pub sub_f64: Option<f64>,
}

impl FhatRow {
    pub fn new(n: usize, table: &FibTable) -> Result<Self> {
        let fn_ = table.signed(n)?;
        let fn1 = table.signed(n + 1)?;
        let diag = BigRational::new(fn_.clone(), fn1.clone());
        let sub = (n >= 2).then(|| -BigRational::new(fn1, fn_));
        let (diag_f64, sub_f64) = float_row(n);
        Ok(Self {
            n,
            diag,
            sub,
            diag_f64,
            sub_f64: (n >= 2).then_some(sub_f64),
        })
    }
}

// Beyond this row f_{n+1} no longer fits in a u128; the ratio has long since
// converged to 1/φ at f64 resolution.
const FLOAT_ROWS: usize = 185;

fn float_rows() -> &'static [(f64, f64)] {
    static ROWS: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let mut rows = Vec::with_capacity(FLOAT_ROWS);
        let (mut a, mut b) = (1u128, 1u128); // f_n, f_{n+1} starting at n = 1
        for _ in 1..=FLOAT_ROWS {
            let (fa, fb) = (a as f64, b as f64);
            rows.push((fa / fb, -(fb / fa)));
            // The final step would overflow and its result is never used.
            if let Some(next) = a.checked_add(b) {
                a = b;
                b = next;
            }
        }
        rows
    })
}

/// `(diag, sub)` for row `n` in `f64`. The `sub` value is meaningless for `n = 1`.
fn float_row(n: usize) -> (f64, f64) {
    let rows = float_rows();
    rows[n.min(FLOAT_ROWS) - 1]
}

/// Applies F̂ to a (possibly vector-valued) sequence, componentwise.
pub fn fhat_apply(x: &RealSequence) -> Result<RealSequence> {
    if x.is_empty() {
        return Err(domain("cannot apply F̂ to an empty sequence"));
    }
    let d = x.dim();
    let src = x.as_flat();
    let mut out = Vec::with_capacity(src.len());
    let (diag1, _) = float_row(1);
    out.extend(src[..d].iter().map(|v| diag1 * v));
    for n in 2..=x.len() {
        let (diag, sub) = float_row(n);
        let cur = &src[(n - 1) * d..n * d];
        let prev = &src[(n - 2) * d..(n - 1) * d];
        out.extend(cur.iter().zip(prev).map(|(c, p)| diag * c + sub * p));
    }
    RealSequence::from_flat(out, d, format!("fhat({})", x.provenance()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Float,
    /// Converts the input to exact rationals, substitutes exactly, then
    /// rounds the result once.
    Exact,
}

/// Solves `F̂x = y` by forward substitution.
///
/// Fails if the float result overflows, which happens for long prefixes of
/// most sequences.
pub fn fhat_invert(y: &RealSequence, arithmetic: Arithmetic) -> Result<RealSequence> {
    if y.is_empty() {
        return Err(domain("cannot invert F̂ on an empty sequence"));
    }
    let d = y.dim();
    let out = match arithmetic {
        Arithmetic::Float => invert_float(y.as_flat(), d),
        Arithmetic::Exact => {
            let table = FibTable::new(y.len() + 1);
            let mut out = vec![0.0; y.as_flat().len()];
            for c in 0..d {
                let column = y
                    .terms()
                    .map(|t| {
                        BigRational::from_float(t[c])
                            .ok_or_else(|| domain("value is not representable as a rational"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let x = fhat_invert_exact(&column, &table)?;
                for (k, v) in x.iter().enumerate() {
                    out[k * d + c] = v.to_f64().unwrap_or(f64::INFINITY);
                }
            }
            out
        }
    };
    RealSequence::from_flat(out, d, format!("fhat_inv({})", y.provenance()))
}

fn invert_float(y: &[f64], d: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let (diag1, _) = float_row(1);
    out.extend(y[..d].iter().map(|v| v / diag1));
    let len = y.len() / d;
    for n in 2..=len {
        let (diag, _) = float_row(n);
        let up = 1.0 / diag; // f_{n+1}/f_n
        for c in 0..d {
            let prev = out[(n - 2) * d + c];
            out.push(up * y[(n - 1) * d + c] + up * up * prev);
        }
    }
    out
}

/// Exact F̂ on a scalar rational sequence. `table` must reach `f_{len+1}`.
pub fn fhat_apply_exact(x: &[BigRational], table: &FibTable) -> Result<Vec<BigRational>> {
    if x.is_empty() {
        return Err(domain("cannot apply F̂ to an empty sequence"));
    }
    let mut out = Vec::with_capacity(x.len());
    for n in 1..=x.len() {
        let row = FhatRow::new(n, table)?;
        let mut v = &row.diag * &x[n - 1];
        if let Some(sub) = &row.sub {
            v += sub * &x[n - 2];
        }
        out.push(v);
    }
    Ok(out)
}

/// Exact inverse of [`fhat_apply_exact`].
pub fn fhat_invert_exact(y: &[BigRational], table: &FibTable) -> Result<Vec<BigRational>> {
    if y.is_empty() {
        return Err(domain("cannot invert F̂ on an empty sequence"));
    }
    let mut out: Vec<BigRational> = Vec::with_capacity(y.len());
    for n in 1..=y.len() {
        let up = BigRational::new(table.signed(n + 1)?, table.signed(n)?);
        let mut v = &up * &y[n - 1];
        if n >= 2 {
            v += &up * &up * &out[n - 2];
        }
        out.push(v);
    }
    Ok(out)
}
