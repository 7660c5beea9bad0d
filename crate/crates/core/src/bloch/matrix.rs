use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DualSet;
use crate::error::{Error, Result};
use crate::potentials::{sub_labels, FourierPotential};

/// Plane-wave matrix of `-Δ + V` restricted to the Bloch fibre `k`:
/// `H_{rr'} = |k + p_r|² δ_{rr'} + V_{p_r - p_r'}`.
#[derive(Debug, Clone)]
pub struct BlochMatrix {
    pub k: [f64; 2],
    pub entries: DMatrix<Complex64>,
    /// `k + p_r`.
    pub momenta: Vec<[f64; 2]>,
    /// `|k + p_r|²`.
    pub diagonal: Vec<f64>,
    /// Sparse off-diagonal rows: `(r', V_{r - r'})`.
    pub couplings: Vec<Vec<(usize, Complex64)>>,
}

impl BlochMatrix {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Largest `|H - H*|` entry.
    pub fn hermiticity_residual(&self) -> f64 {
        let h = &self.entries;
        let mut worst = 0.0f64;
        for i in 0..h.nrows() {
            for j in 0..=i {
                worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `H v` using the sparse structure.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|r| {
                let mut acc = v[r] * self.diagonal[r];
                for &(s, w) in &self.couplings[r] {
                    acc += w * v[s];
                }
                acc
            })
            .collect()
    }

    /// Smallest `| |k+p_r|² - |k|² |` over the plane waves coupled directly
    /// to `r = 0`.
    pub fn coupled_gap(&self) -> f64 {
        let k2 = self.diagonal[0];
        self.couplings[0]
            .iter()
            .map(|&(s, _)| (self.diagonal[s] - k2).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `min_{r != 0} | |k+p_r|² - |k|² |`.
    pub fn resonance_gap(&self) -> f64 {
        let k2 = self.diagonal[0];
        self.diagonal[1..]
            .iter()
            .map(|d| (d - k2).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn assemble_bloch_matrix(pot: &FourierPotential, dual: &DualSet, k: [f64; 2]) -> Result<BlochMatrix> {
    if dual.is_empty() {
        return Err(Error::EmptyLattice { cutoff: dual.cutoff });
    }
    if dual.module != pot.module {
        return Err(Error::input("dual set was built for a different frequency module"));
    }
    let defect = pot.hermiticity_defect();
    if defect > 1e-12 * pot.l1_norm().max(1.0) {
        return Err(Error::NonHermitian(format!("|V_-m - conj(V_m)| reaches {defect:e}")));
    }
    let n = dual.len();
    let momenta: Vec<[f64; 2]> = dual.vectors.iter().map(|p| [k[0] + p[0], k[1] + p[1]]).collect();
    let diagonal: Vec<f64> = momenta.iter().map(|q| q[0] * q[0] + q[1] * q[1]).collect();
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut couplings = vec![Vec::new(); n];
    for r in 0..n {
        entries[(r, r)] = Complex64::new(diagonal[r], 0.0);
        for m in &pot.modes {
            if m.coeff == Complex64::default() {
                continue;
            }
            // V_{p_r - p_s} = V_m  <=>  label_s = label_r - m
            if let Some(s) = dual.position(sub_labels(dual.labels[r], m.label)) {
                entries[(r, s)] += m.coeff;
                couplings[r].push((s, m.coeff));
            }
        }
    }
    Ok(BlochMatrix { k, entries, momenta, diagonal, couplings })
}
