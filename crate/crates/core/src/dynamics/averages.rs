use serde::Serialize;

use crate::error::{Error, Result};

/// Abel means integrate up to `ABEL_SPAN · T`.
pub const ABEL_SPAN: f64 = 6.0;
/// Minimal coverage `t_max >= ABEL_COVERAGE · T`.
pub const ABEL_COVERAGE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeMean {
    pub t: f64,
    pub value: f64,
    /// Bound on the neglected tail (Abel) or 0 (Cesàro).
    pub remainder: f64,
}

fn check_series(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::input("need at least two samples with matching times and values"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::input("sample times must increase"));
    }
    Ok(())
}

/// Linear interpolation inside the sampled range.
fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let i = times.partition_point(|x| *x <= t).clamp(1, times.len() - 1);
    let (t0, t1) = (times[i - 1], times[i]);
    values[i - 1] + (values[i] - values[i - 1]) * (t - t0) / (t1 - t0)
}

/// Trapezoid rule for `∫_{t0}^{t_end} w(t) f(t) dt` over the samples.
fn weighted_trapezoid(times: &[f64], values: &[f64], t_end: f64, w: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 1..times.len() {
        let (a, b) = (times[i - 1], times[i].min(t_end));
        if a >= t_end {
            break;
        }
        let fa = w(a) * values[i - 1];
        let fb = w(b) * if b == times[i] { values[i] } else { interpolate(times, values, b) };
        acc += 0.5 * (b - a) * (fa + fb);
    }
    acc
}

/// `(2/T) ∫_0^∞ e^{-2t/T} f(t) dt`, truncated at `min(6T, t_last)`. The
/// remainder assumes `f(t) <= f(t_max) (t / t_max)²` beyond the cut:
/// `f(t_max) e^{-2 t_max/T} (1 + T/t_max + T²/(2 t_max²))`.
pub fn abel_mean(times: &[f64], values: &[f64], t: f64) -> Result<TimeMean> {
    check_series(times, values)?;
    if !(t > 0.0) {
        return Err(Error::input(format!("averaging time {t} must be positive")));
    }
    let last = *times.last().expect("nonempty");
    if last < ABEL_COVERAGE * t * (1.0 - 1e-12) || times[0] > 0.0 {
        return Err(Error::Coverage { required: ABEL_COVERAGE * t, available: last });
    }
    let t_max = last.min(ABEL_SPAN * t);
    let value = weighted_trapezoid(times, values, t_max, |s| 2.0 / t * (-2.0 * s / t).exp());
    let f_end = interpolate(times, values, t_max).abs();
    let remainder = f_end * (-2.0 * t_max / t).exp() * (1.0 + t / t_max + t * t / (2.0 * t_max * t_max));
    Ok(TimeMean { t, value, remainder })
}

/// `T⁻¹ ∫_0^T f(t) dt`.
pub fn cesaro_mean(times: &[f64], values: &[f64], t: f64) -> Result<TimeMean> {
    check_series(times, values)?;
    if !(t > 0.0) {
        return Err(Error::input(format!("averaging time {t} must be positive")));
    }
    let last = *times.last().expect("nonempty");
    if last < t * (1.0 - 1e-12) || times[0] > 0.0 {
        return Err(Error::Coverage { required: t, available: last });
    }
    Ok(TimeMean { t, value: weighted_trapezoid(times, values, t, |_| 1.0) / t, remainder: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Half the log-log slope (`m = 2`).
    pub beta: f64,
    /// Twice the standard error of `beta`.
    pub band: f64,
    pub intercept: f64,
}

/// Least-squares slope of `log mean` against `log T`, divided by 2.
pub fn fit_exponent(ts: &[f64], means: &[f64]) -> Result<ExponentFit> {
    if ts.len() != means.len() || ts.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 points, got {}", ts.len().min(means.len()))));
    }
    if ts.iter().chain(means).any(|v| !(*v > 0.0)) {
        return Err(Error::Fit("times and means must be positive".into()));
    }
    let (lo, hi) = ts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), t| (a.min(*t), b.max(*t)));
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::Fit(format!("T grid spans [{lo}, {hi}], less than one decade")));
    }
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = (rss / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit { beta: slope / 2.0, band: se, intercept })
}
