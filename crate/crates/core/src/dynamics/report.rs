use serde::Serialize;

use super::averages::{abel_mean, cesaro_mean, fit_exponent, ExponentFit, TimeMean};
use super::moments::MomentSeries;
use crate::error::{Error, Result};

pub const REPORT_SCHEMA: u32 = 1;

/// Predictions the measured moments are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predictions {
    /// Floor coefficient: `⟨⟨X²⟩⟩_T >= c1 T²`.
    pub c1: f64,
    /// `t²` coefficient of `⟨X²⟩(t)` from the group velocity.
    pub c_gv: f64,
    /// Speed used in the upper bound `(√X₀ + v t)²`.
    pub v_max: f64,
    /// Whether the packet has any weight on non-resonant cells.
    pub mask_empty: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub v_max: f64,
    /// `max_t ⟨X²⟩(t) / (√X₀ + v t)²`.
    pub max_ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportReport {
    pub schema: u32,
    pub t_grid: Vec<f64>,
    pub abel: Vec<TimeMean>,
    pub cesaro: Vec<TimeMean>,
    pub beta_abel: Option<ExponentFit>,
    pub beta_cesaro: Option<ExponentFit>,
    /// `|β_A - β_C| <= max(band_A, band_C)`.
    pub exponents_consistent: Option<bool>,
    pub x0: f64,
    pub predictions: Predictions,
    /// Least-squares `c` in `⟨⟨X²⟩⟩_T - X₀ ≈ b T + c T²`.
    pub abel_t2_coefficient: f64,
    /// `2 c`, comparable with `c_gv`.
    pub measured_coefficient: f64,
    /// `measured_coefficient / c_gv`.
    pub coefficient_ratio: f64,
    /// `⟨⟨X²⟩⟩_T >= c1 T²` per grid point.
    pub floor: Vec<bool>,
    /// Smallest grid `T` from which the floor holds for every larger `T`.
    pub onset: Option<f64>,
    pub upper_bound: UpperBound,
    pub wrap_risk: bool,
    pub norm_drift: f64,
    /// False when any snapshot had wrap risk or the packet missed the mask.
    pub trusted: bool,
    pub notes: Vec<String>,
}

impl TransportReport {
    pub fn floor_holds_beyond_onset(&self) -> bool {
        match self.onset {
            Some(t0) => self.t_grid.iter().zip(&self.floor).all(|(t, ok)| *t < t0 || *ok),
            None => false,
        }
    }
}

/// Least squares `y ≈ b x + c x²`.
fn fit_linear_quadratic(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mut s2, mut s3, mut s4, mut sy1, mut sy2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        s2 += a * a;
        s3 += a * a * a;
        s4 += a * a * a * a;
        sy1 += a * b;
        sy2 += a * a * b;
    }
    let det = s2 * s4 - s3 * s3;
    ((sy1 * s4 - sy2 * s3) / det, (s2 * sy2 - s3 * sy1) / det)
}

/// Abel and Cesàro means over `t_grid`, exponent fits, the floor `c1 T²`,
/// the group-velocity comparison and the ballistic upper bound.
pub fn ballistic_check(series: &MomentSeries, t_grid: &[f64], pred: Predictions) -> Result<TransportReport> {
    if t_grid.is_empty() {
        return Err(Error::input("empty T grid"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::input("T grid must increase"));
    }
    let times = series.times();
    let values = series.values();
    let abel: Vec<TimeMean> = t_grid.iter().map(|t| abel_mean(&times, &values, *t)).collect::<Result<_>>()?;
    let cesaro: Vec<TimeMean> = t_grid.iter().map(|t| cesaro_mean(&times, &values, *t)).collect::<Result<_>>()?;
    let mut notes = Vec::new();
    let fit = |m: &[TimeMean], name: &str, notes: &mut Vec<String>| {
        let v: Vec<f64> = m.iter().map(|x| x.value).collect();
        fit_exponent(t_grid, &v).map_err(|e| notes.push(format!("{name} exponent: {e}"))).ok()
    };
    let beta_abel = fit(&abel, "Abel", &mut notes);
    let beta_cesaro = fit(&cesaro, "Cesàro", &mut notes);
    let exponents_consistent = match (beta_abel, beta_cesaro) {
        (Some(a), Some(c)) => Some((a.beta - c.beta).abs() <= a.band.max(c.band)),
        _ => None,
    };
    let x0 = values[0];
    let excess: Vec<f64> = abel.iter().map(|m| m.value - x0).collect();
    let (_, c) = fit_linear_quadratic(t_grid, &excess);
    let measured = 2.0 * c;
    let floor: Vec<bool> = abel.iter().map(|m| m.value >= pred.c1 * m.t * m.t).collect();
    let onset = (0..t_grid.len()).find(|&i| floor[i..].iter().all(|b| *b)).map(|i| t_grid[i]);
    let sx0 = x0.max(0.0).sqrt();
    let max_ratio = times
        .iter()
        .zip(&values)
        .map(|(t, v)| {
            let b = (sx0 + pred.v_max * t).powi(2);
            if b > 0.0 {
                v / b
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    let wrap_risk = series.any_wrap_risk();
    if wrap_risk {
        notes.push("wrap risk: mass reached the outer band of the box".into());
    }
    if pred.mask_empty {
        notes.push("packet has no weight on non-resonant cells; no claim".into());
    }
    Ok(TransportReport {
        schema: REPORT_SCHEMA,
        t_grid: t_grid.to_vec(),
        abel,
        cesaro,
        beta_abel,
        beta_cesaro,
        exponents_consistent,
        x0,
        predictions: pred,
        abel_t2_coefficient: c,
        measured_coefficient: measured,
        coefficient_ratio: if pred.c_gv > 0.0 { measured / pred.c_gv } else { f64::NAN },
        floor,
        onset,
        upper_bound: UpperBound { v_max: pred.v_max, max_ratio, holds: max_ratio <= 1.0 },
        wrap_risk,
        norm_drift: series.norm_drift(),
        trusted: !wrap_risk && !pred.mask_empty,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::moments::MomentSample;

    fn synthetic(x0: f64, c: f64, t_end: f64, dt: f64) -> MomentSeries {
        let mut s = MomentSeries::new([0.0, 0.0], dt);
        let n = (t_end / dt).round() as usize;
        for i in 0..=n {
            let t = i as f64 * dt;
            s.samples.push(MomentSample { t, m2: x0 + c * t * t, centroid: [0.0; 2], edge_mass: 0.0, norm: 1.0 });
        }
        s
    }

    #[test]
    fn quadratic_growth_report() {
        let s = synthetic(0.02, 4.0, 12.0, 0.005);
        let grid: Vec<f64> = (0..6).map(|i| 0.2 * 10f64.powf(i as f64 / 5.0)).collect();
        let pred = Predictions { c1: 0.05, c_gv: 4.0, v_max: 2.5, mask_empty: false };
        let r = ballistic_check(&s, &grid, pred).unwrap();
        assert!((r.coefficient_ratio - 1.0).abs() < 1e-3);
        assert!(r.floor.iter().all(|b| *b));
        assert_eq!(r.onset, Some(grid[0]));
        assert!(r.upper_bound.holds);
        assert!(r.trusted);
        let b = r.beta_abel.unwrap();
        assert!(b.beta > 0.9 && b.beta < 1.0);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"schema\":1"));
    }
}
