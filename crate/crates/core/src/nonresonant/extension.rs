use serde::Serialize;

use super::mollifier::{erode, max_difference, mollify};
use super::NonResonantMask;
use crate::bloch::DispersionBranch;
use crate::error::{Error, Result};
use crate::grid::KRect;

/// `|k|² + η (λ_n - |k|²)` with `η` a mollified indicator supported in the
/// non-resonant cells and equal to 1 on cells eroded by the blend width.
#[derive(Debug, Clone, Serialize)]
pub struct ExtendedDispersion {
    pub rect: KRect,
    pub blend_width: f64,
    pub blend: Vec<f64>,
    pub correction: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `max |D^m (λ_ext - |k|²)| / coupling` for `m = 1..=4` (raw maxima when
    /// the coupling is zero).
    pub derivative_bounds: [f64; 4],
    pub coupling: f64,
}

impl ExtendedDispersion {
    /// Value at the centre of cell `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.lambda[self.rect.index(i, j)]
    }
}

/// Blends a per-cell correction with the mask.
pub fn extend_correction(
    rect: &KRect,
    mask: &[bool],
    correction: &[f64],
    blend_width: f64,
    coupling: f64,
) -> Result<ExtendedDispersion> {
    if mask.len() != rect.len() || correction.len() != rect.len() {
        return Err(Error::input("mask and correction must cover the rectangle"));
    }
    if !mask.iter().any(|b| *b) {
        return Err(Error::EmptyRect("mask has no non-resonant cell".into()));
    }
    let spacing = rect.spacing[0].min(rect.spacing[1]);
    if !(blend_width >= spacing) {
        return Err(Error::BlendWidth { width: blend_width, spacing });
    }
    let half = 0.5 * blend_width;
    let core = erode(rect, mask, half);
    let blend = if half >= spacing {
        mollify(rect, &core, half)?
    } else {
        core.iter().map(|b| f64::from(u8::from(*b))).collect()
    };
    let mut lambda = Vec::with_capacity(rect.len());
    let mut blended = Vec::with_capacity(rect.len());
    for (c, k) in rect.centers().enumerate() {
        let k2 = k[0] * k[0] + k[1] * k[1];
        let (l, d) = if blend[c] == 1.0 {
            (k2 + correction[c], correction[c])
        } else if blend[c] == 0.0 {
            (k2, 0.0)
        } else {
            (k2 + blend[c] * correction[c], blend[c] * correction[c])
        };
        lambda.push(l);
        blended.push(d);
    }
    let scale = if coupling > 0.0 { coupling } else { 1.0 };
    let mut derivative_bounds = [0.0; 4];
    for (m, b) in derivative_bounds.iter_mut().enumerate() {
        *b = max_difference(rect, &blended, m + 1) / scale;
    }
    Ok(ExtendedDispersion { rect: rect.clone(), blend_width, blend, correction: blended, lambda, derivative_bounds, coupling })
}

/// Extends a computed branch across its resonant cells. Where the blend is
/// exactly 1 the stored branch value is returned unchanged.
pub fn extend_dispersion(mask: &NonResonantMask, branch: &DispersionBranch, blend_width: f64) -> Result<ExtendedDispersion> {
    if mask.rect != branch.rect {
        return Err(Error::input("mask and branch live on different rectangles"));
    }
    let correction: Vec<f64> = branch.points.iter().map(|p| p.lambda - p.k_norm().powi(2)).collect();
    let mut ext = extend_correction(&mask.rect, &mask.mask, &correction, blend_width, branch.coupling)?;
    for c in 0..ext.lambda.len() {
        if ext.blend[c] == 1.0 {
            ext.lambda[c] = branch.points[c].lambda;
        }
    }
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(n: usize) -> KRect {
        KRect::spanning([2.0, 2.0], [2.0 + n as f64 * 0.1, 2.0 + n as f64 * 0.1], [n, n]).unwrap()
    }

    #[test]
    fn zero_correction_gives_free_dispersion() {
        let r = rect(16);
        let e = extend_correction(&r, &vec![true; 256], &vec![0.0; 256], 0.3, 0.0).unwrap();
        for (c, k) in r.centers().enumerate() {
            assert_eq!(e.lambda[c], k[0] * k[0] + k[1] * k[1]);
        }
        assert_eq!(e.derivative_bounds, [0.0; 4]);
    }

    #[test]
    fn checkerboard_blocks_stay_in_range() {
        let r = rect(32);
        let c = 0.02;
        let mask: Vec<bool> = (0..1024).map(|i| ((i / 32) / 8 + (i % 32) / 8) % 2 == 0).collect();
        let e = extend_correction(&r, &mask, &vec![c; 1024], 0.3, 0.05).unwrap();
        let core = erode(&r, &mask, 0.3);
        for i in 0..1024 {
            assert!(e.correction[i] >= 0.0 && e.correction[i] <= c);
            if core[i] {
                assert_eq!(e.correction[i], c);
            }
            if !mask[i] {
                assert_eq!(e.correction[i], 0.0);
            }
        }
        assert!(e.derivative_bounds.iter().all(|b| b.is_finite() && *b > 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let r = rect(8);
        assert!(matches!(
            extend_correction(&r, &vec![true; 64], &vec![0.0; 64], 0.05, 1.0),
            Err(Error::BlendWidth { .. })
        ));
        assert!(extend_correction(&r, &vec![false; 64], &vec![0.0; 64], 0.3, 1.0).is_err());
    }
}
