use crate::error::{domain, Error, Result};
use crate::sequence::{RealSequence, Subject};

use super::TestParams;

/// Robust limit estimate for the sequence under test (`F̂x` by default).
///
/// Takes the last `⌈tail_window · len⌉` terms and, coordinate by coordinate,
/// drops values further than 3 MADs from the median before taking the median
/// again. Density-zero contamination such as spikes on the squares is thinned
/// out of the tail and discarded.
pub fn estimate_statistical_limit(subject: &Subject, params: &TestParams) -> Result<Vec<f64>> {
    params.density.validate()?;
    let y = subject.under_test(params.apply_fhat)?;
    trimmed_tail_median(&y, params.density.tail_window)
}

pub fn trimmed_tail_median(y: &RealSequence, tail_window: f64) -> Result<Vec<f64>> {
    if !(tail_window > 0.0 && tail_window <= 1.0) {
        return Err(domain(format!("tail window must lie in (0, 1], got {tail_window}")));
    }
    let len = y.len();
    if len == 0 {
        return Err(Error::Estimation("empty sequence".into()));
    }
    let tail = ((tail_window * len as f64).ceil() as usize).clamp(1, len);
    let d = y.dim();
    let mut out = Vec::with_capacity(d);
    let mut column = Vec::with_capacity(tail);
    for c in 0..d {
        column.clear();
        column.extend((len - tail + 1..=len).map(|k| y.term(k)[c]));
        let m = median(&mut column);
        let mut dev: Vec<f64> = column.iter().map(|v| (v - m).abs()).collect();
        let mad = median(&mut dev);
        column.retain(|v| (v - m).abs() <= 3.0 * mad);
        if column.is_empty() {
            return Err(Error::Estimation(format!(
                "coordinate {c}: nothing left in the tail after trimming"
            )));
        }
        out.push(median(&mut column));
    }
    Ok(out)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
