use serde::Serialize;

use super::{BlochMatrix, DispersionPoint};

/// Size of the coefficient table of one branch point, normalized to `C_0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    pub k_norm: f64,
    /// `Σ_r |C_r|`.
    pub l1: f64,
    /// `Σ_{|k+p_r| < |k|/4} |C_r|`.
    pub inner_sum: f64,
    /// `inner_sum · |k|^depth`.
    pub scaled_inner: f64,
    pub depth: usize,
}

pub fn coefficient_decay_profile(point: &DispersionPoint, m: &BlochMatrix, depth: usize) -> DecayReport {
    let k_norm = point.k_norm();
    let c = point.unit_leading();
    let l1 = c.iter().map(|z| z.norm()).sum();
    let inner_sum = c
        .iter()
        .zip(&m.momenta)
        .filter(|(_, q)| q[0].hypot(q[1]) < 0.25 * k_norm)
        .map(|(z, _)| z.norm())
        .sum::<f64>();
    DecayReport { k_norm, l1, inner_sum, scaled_inner: inner_sum * k_norm.powi(depth as i32), depth }
}

/// Exponent `a` of a least-squares fit `inner_sum ~ |k|^{-a}`; `None` when
/// fewer than two reports have a positive inner sum.
pub fn fit_decay_power(reports: &[DecayReport]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.inner_sum > 0.0 && r.k_norm > 0.0)
        .map(|r| (r.k_norm.ln(), r.inner_sum.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}
