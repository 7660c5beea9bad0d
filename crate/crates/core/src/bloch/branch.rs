use num_complex::Complex64;
use serde::Serialize;

use super::{BlochMatrix, EigenPairs};
use crate::error::{Error, Result};

/// The quasi-plane-wave eigenpair at one quasimomentum.
#[derive(Debug, Clone, Serialize)]
pub struct DispersionPoint {
    pub k: [f64; 2],
    pub lambda: f64,
    /// `C_r`, indexed like the dual set; unit ℓ² norm with `C_0 >= 0` real.
    pub coefficients: Vec<Complex64>,
    pub grad: [f64; 2],
    /// `|C_0|²`.
    pub weight: f64,
    pub resonance_gap: f64,
    pub coupled_gap: f64,
}

impl DispersionPoint {
    /// Coefficients rescaled so that `C_0 = 1`.
    pub fn unit_leading(&self) -> Vec<Complex64> {
        let c0 = self.coefficients[0];
        self.coefficients.iter().map(|c| c / c0).collect()
    }

    pub fn k_norm(&self) -> f64 {
        self.k[0].hypot(self.k[1])
    }
}

#[derive(Debug, Clone)]
pub enum BranchOutcome {
    Plane(DispersionPoint),
    /// No eigenvector carries at least the threshold plane-wave weight; the
    /// best candidate is attached for diagnostics.
    Resonant(DispersionPoint),
}

impl BranchOutcome {
    pub fn point(&self) -> &DispersionPoint {
        match self {
            BranchOutcome::Plane(p) | BranchOutcome::Resonant(p) => p,
        }
    }

    pub fn is_resonant(&self) -> bool {
        matches!(self, BranchOutcome::Resonant(_))
    }

    pub fn plane(self) -> Option<DispersionPoint> {
        match self {
            BranchOutcome::Plane(p) => Some(p),
            BranchOutcome::Resonant(_) => None,
        }
    }
}

/// Rotates `v` so that its `r = 0` entry is real and nonnegative.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let c0 = v[0];
    if c0.norm() > 0.0 {
        let phase = c0.conj() / c0.norm();
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

/// Hellmann–Feynman gradient `Σ_r 2 (k + p_r) |C_r|²`; only the diagonal of
/// the Bloch matrix depends on `k`.
pub fn grad_lambda(m: &BlochMatrix, coefficients: &[Complex64]) -> Result<[f64; 2]> {
    let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Unnormalized(norm));
    }
    let mut g = [0.0; 2];
    for (q, c) in m.momenta.iter().zip(coefficients) {
        let w = 2.0 * c.norm_sqr();
        g[0] += w * q[0];
        g[1] += w * q[1];
    }
    Ok(g)
}

pub(crate) fn make_point(m: &BlochMatrix, lambda: f64, mut coefficients: Vec<Complex64>) -> Result<DispersionPoint> {
    fix_phase(&mut coefficients);
    let grad = grad_lambda(m, &coefficients)?;
    Ok(DispersionPoint {
        k: m.k,
        lambda,
        weight: coefficients[0].norm_sqr(),
        coefficients,
        grad,
        resonance_gap: m.resonance_gap(),
        coupled_gap: m.coupled_gap(),
    })
}

/// Picks the eigenpair with the largest plane-wave weight `|C_0|²`; ties
/// go to the eigenvalue closer to `|k|²`.
pub fn select_plane_wave_branch(pairs: &EigenPairs, m: &BlochMatrix, theta: f64) -> Result<BranchOutcome> {
    if pairs.is_empty() {
        return Err(Error::EmptyLattice { cutoff: 0.0 });
    }
    let k2 = m.diagonal[0];
    let mut best = 0;
    let mut best_w = -1.0;
    for i in 0..pairs.len() {
        let w = pairs.vectors[(0, i)].norm_sqr();
        let closer = (pairs.values[i] - k2).abs() < (pairs.values[best] - k2).abs();
        if w > best_w + 1e-14 || ((w - best_w).abs() <= 1e-14 && closer) {
            best = i;
            best_w = w;
        }
    }
    let point = make_point(m, pairs.values[best], pairs.vector(best))?;
    Ok(if point.weight >= theta && point.weight > 0.0 {
        BranchOutcome::Plane(point)
    } else {
        BranchOutcome::Resonant(point)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{assemble_bloch_matrix, solve_dense, DualSet};
    use crate::potentials::{FourierPotential, FrequencyModule, Mode};
    use std::f64::consts::PI;

    fn cosine(g: f64) -> FourierPotential {
        let v = Complex64::new(0.5 * g, 0.0);
        FourierPotential::new(
            FrequencyModule::Lattice { step: [2.0 * PI, 2.0 * PI] },
            vec![
                Mode { label: [1, 0, 0, 0], coeff: v },
                Mode { label: [-1, 0, 0, 0], coeff: v },
                Mode { label: [0, 1, 0, 0], coeff: v },
                Mode { label: [0, -1, 0, 0], coeff: v },
            ],
        )
    }

    fn branch(pot: &FourierPotential, k: [f64; 2], theta: f64) -> BranchOutcome {
        let dual = DualSet::build(pot, 30.0, 0).unwrap();
        let m = assemble_bloch_matrix(pot, &dual, k).unwrap();
        select_plane_wave_branch(&solve_dense(&m, 2000).unwrap(), &m, theta).unwrap()
    }

    #[test]
    fn free_branch_is_the_plane_wave() {
        let k = [1.3, -0.4];
        let p = branch(&cosine(0.0), k, 0.9).plane().unwrap();
        assert!((p.lambda - (k[0] * k[0] + k[1] * k[1])).abs() < 1e-12);
        assert!((p.weight - 1.0).abs() < 1e-14);
        assert!(p.coefficients[1..].iter().all(|c| c.norm() < 1e-14));
        assert!((p.grad[0] - 2.0 * k[0]).abs() < 1e-12 && (p.grad[1] - 2.0 * k[1]).abs() < 1e-12);
    }

    #[test]
    fn weak_coupling_matches_second_order_perturbation() {
        let g = 0.01;
        let pot = cosine(g);
        let k = [5.1, 3.3];
        let p = branch(&pot, k, 0.9).plane().unwrap();
        assert!(p.weight > 0.99);
        let k2 = k[0] * k[0] + k[1] * k[1];
        let mut second = 0.0;
        for m in &pot.modes {
            let f = pot.freq(m.label);
            let q2 = (k[0] + f[0]).powi(2) + (k[1] + f[1]).powi(2);
            second += m.coeff.norm_sqr() / (k2 - q2);
        }
        assert!((p.lambda - k2 - second).abs() < 1e-5, "{} vs {}", p.lambda - k2, second);
    }

    #[test]
    fn bragg_plane_is_resonant() {
        // |k + p|² = |k|² for p = (-2π, 0) when k1 = π
        let k = [PI, 2.2];
        assert!(branch(&cosine(0.05), k, 0.9).is_resonant());
    }

    #[test]
    fn unnormalized_vector_is_rejected() {
        let pot = cosine(0.0);
        let dual = DualSet::build(&pot, 10.0, 0).unwrap();
        let m = assemble_bloch_matrix(&pot, &dual, [1.0, 0.0]).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); m.dim()];
        v[0] = Complex64::new(2.0, 0.0);
        assert!(matches!(grad_lambda(&m, &v), Err(Error::Unnormalized(_))));
    }
}
