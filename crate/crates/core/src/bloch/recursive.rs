use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::branch::make_point;
use super::{BlochMatrix, DispersionPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursiveOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Divergence is declared once `Σ|C_r|` (with `C_0 = 1`) exceeds this.
    pub l1_bound: f64,
}

impl Default for RecursiveOptions {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-13, l1_bound: 4.0 }
    }
}

/// Fixed-point iteration of `C_r = (λ - |k+p_r|²)⁻¹ Σ_{r'} V_{r-r'} C_{r'}`
/// for `r != 0` with `C_0 = 1`, alternating with the Rayleigh quotient
/// update of `λ`.
pub fn solve_recursive(m: &BlochMatrix, opts: RecursiveOptions) -> Result<DispersionPoint> {
    let n = m.dim();
    let fail = |iterations: usize, reason: String| Error::NonConvergent { k: m.k, iterations, reason };
    if n > 1 && m.resonance_gap() == 0.0 {
        return Err(fail(0, "exactly resonant quasimomentum".into()));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    c[0] = Complex64::new(1.0, 0.0);
    let mut lambda = m.diagonal[0];
    let mut next = c.clone();
    for it in 1..=opts.max_iter {
        for r in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(s, w) in &m.couplings[r] {
                acc += w * c[s];
            }
            next[r] = acc / (lambda - m.diagonal[r]);
        }
        next[0] = Complex64::new(1.0, 0.0);
        let l1: f64 = next.iter().map(|z| z.norm()).sum();
        if !l1.is_finite() || l1 > opts.l1_bound {
            return Err(fail(it, format!("coefficient l1 norm {l1:e} exceeds {}", opts.l1_bound)));
        }
        let hc = m.apply(&next);
        let num: Complex64 = next.iter().zip(&hc).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = next.iter().map(|z| z.norm_sqr()).sum();
        let new_lambda = num.re / den;
        let change: f64 = next.iter().zip(&c).map(|(a, b)| (a - b).norm()).sum();
        let dl = (new_lambda - lambda).abs();
        std::mem::swap(&mut c, &mut next);
        lambda = new_lambda;
        if dl < opts.tol * lambda.abs().max(1.0) && change < opts.tol {
            let norm = den.sqrt();
            let unit: Vec<Complex64> = c.iter().map(|z| z / norm).collect();
            return make_point(m, lambda, unit);
        }
    }
    Err(fail(opts.max_iter, "iteration limit reached".into()))
}
