use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::KRect;
use crate::nonresonant::mollifier::{dilate, erode, mollify};

/// Smooth cutoff `η_δ`: 1 on the mask, 0 outside its `δ`-neighbourhood.
#[derive(Debug, Clone, Serialize)]
pub struct CutoffFunction {
    pub rect: KRect,
    pub delta: f64,
    pub values: Vec<f64>,
    /// `sup |∇η_δ| · δ` from central differences.
    pub gradient_scale: f64,
}

impl CutoffFunction {
    pub fn ones(rect: KRect) -> Self {
        let values = vec![1.0; rect.len()];
        Self { rect, delta: 0.0, values, gradient_scale: 0.0 }
    }
}

/// Mollifies the `δ/2`-neighbourhood of `mask` with a bump of radius `δ/2`.
/// `δ` must span at least two cells.
pub fn build_eta_delta(rect: &KRect, mask: &[bool], delta: f64) -> Result<CutoffFunction> {
    if mask.len() != rect.len() {
        return Err(Error::input("mask does not cover the rectangle"));
    }
    let spacing = rect.spacing[0].max(rect.spacing[1]);
    if !(delta >= 2.0 * spacing * (1.0 - 1e-12)) {
        return Err(Error::BlendWidth { width: delta, spacing: 2.0 * spacing });
    }
    let grown = dilate(rect, mask, 0.5 * delta);
    let values = mollify(rect, &grown, 0.5 * delta)?;
    let gradient_scale = central_gradient_sup(rect, &values) * delta;
    Ok(CutoffFunction { rect: rect.clone(), delta, values, gradient_scale })
}

/// `sup |∇f|` by central differences (one-sided on the border).
pub fn central_gradient_sup(rect: &KRect, f: &[f64]) -> f64 {
    let [n0, n1] = rect.n;
    let d = |i: usize, j: usize, axis: usize| -> f64 {
        let (n, idx) = if axis == 0 { (n0, i) } else { (n1, j) };
        if n < 2 {
            return 0.0;
        }
        let at = |t: usize| if axis == 0 { f[t * n1 + j] } else { f[i * n1 + t] };
        let (lo, hi) = (idx.saturating_sub(1), (idx + 1).min(n - 1));
        (at(hi) - at(lo)) / ((hi - lo) as f64 * rect.spacing[axis])
    };
    let mut worst = 0.0f64;
    for i in 0..n0 {
        for j in 0..n1 {
            worst = worst.max(d(i, j, 0).hypot(d(i, j, 1)));
        }
    }
    worst
}

/// `1{eroded by δ} <= η_δ <= 1{dilated by δ}` cellwise.
pub fn sandwich_holds(rect: &KRect, mask: &[bool], eta: &CutoffFunction) -> bool {
    let inner = erode(rect, mask, eta.delta);
    let outer = dilate(rect, mask, eta.delta);
    (0..mask.len()).all(|c| {
        let v = eta.values[c];
        (0.0..=1.0).contains(&v) && (!inner[c] || v == 1.0) && (outer[c] || v == 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(n: usize) -> KRect {
        KRect::spanning([0.0, 0.0], [n as f64, n as f64], [n, n]).unwrap()
    }

    #[test]
    fn trivial_masks() {
        let r = rect(16);
        let full = build_eta_delta(&r, &vec![true; 256], 4.0).unwrap();
        assert!(full.values.iter().all(|v| *v == 1.0));
        let empty = build_eta_delta(&r, &vec![false; 256], 4.0).unwrap();
        assert!(empty.values.iter().all(|v| *v == 0.0));
        assert!(build_eta_delta(&r, &vec![true; 256], 1.5).is_err());
    }

    #[test]
    fn equals_one_on_the_mask() {
        let r = rect(40);
        let mask: Vec<bool> = (0..1600).map(|c| ((c / 40) as i64 - 20).pow(2) + ((c % 40) as i64 - 20).pow(2) < 100).collect();
        let eta = build_eta_delta(&r, &mask, 6.0).unwrap();
        assert!(sandwich_holds(&r, &mask, &eta));
        for c in 0..1600 {
            if mask[c] {
                assert_eq!(eta.values[c], 1.0);
            }
        }
    }
}
