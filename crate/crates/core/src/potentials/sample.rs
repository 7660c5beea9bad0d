use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{FourierPotential, FrequencyModule};
use crate::error::{Error, Result};
use crate::grid::Grid2;

/// Real potential values on a periodic grid.
#[derive(Debug, Clone)]
pub struct PotentialField {
    pub grid: Grid2,
    pub samples: Array2<f64>,
    /// Largest imaginary part of the synthesized sum before it was dropped.
    pub imag_residual: f64,
}

impl PotentialField {
    pub fn zeros(grid: Grid2) -> Self {
        let samples = Array2::zeros((grid.n[0], grid.n[1]));
        Self { grid, samples, imag_residual: 0.0 }
    }

    pub fn mean(&self) -> f64 {
        self.samples.mean().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Checks that every frequency of `pot` is resolved by `grid` and, for a
/// lattice potential, that the box is a whole number of periods.
pub fn check_compatible(pot: &FourierPotential, grid: &Grid2) -> Result<()> {
    if pot.modes.is_empty() {
        return Ok(());
    }
    let nyq = grid.nyquist();
    for m in &pot.modes {
        let f = pot.freq(m.label);
        for a in 0..2 {
            if f[a].abs() >= nyq[a] * (1.0 - 1e-12) {
                return Err(Error::Resolution(format!(
                    "frequency {:.6} on axis {a} reaches the Nyquist limit {:.6}; increase resolution",
                    f[a], nyq[a]
                )));
            }
        }
    }
    if let FrequencyModule::Lattice { .. } = pot.module {
        let period = pot.module.period().expect("lattice has a period");
        for a in 0..2 {
            let ratio = grid.lengths[a] / period[a];
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
                return Err(Error::Box(format!(
                    "box length {} on axis {a} is not a multiple of the period {}",
                    grid.lengths[a], period[a]
                )));
            }
        }
    }
    Ok(())
}

/// Literal trigonometric sum at the grid points.
pub fn sample_potential(pot: &FourierPotential, grid: &Grid2) -> Result<PotentialField> {
    check_compatible(pot, grid)?;
    let (n0, n1) = (grid.n[0], grid.n[1]);
    // separable phases e^{i f0 x0} and e^{i f1 x1} per mode
    let phases: Vec<(Complex64, Vec<Complex64>, Vec<Complex64>)> = pot
        .modes
        .iter()
        .map(|m| {
            let f = pot.freq(m.label);
            let p0 = (0..n0).map(|i| Complex64::cis(f[0] * grid.x(0, i))).collect();
            let p1 = (0..n1).map(|j| Complex64::cis(f[1] * grid.x(1, j))).collect();
            (m.coeff, p0, p1)
        })
        .collect();
    let rows: Vec<(Vec<f64>, f64)> = (0..n0)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n1];
            for (c, p0, p1) in &phases {
                let ci = c * p0[i];
                for (a, p) in acc.iter_mut().zip(p1) {
                    *a += ci * p;
                }
            }
            let imag = acc.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
            (acc.iter().map(|v| v.re).collect(), imag)
        })
        .collect();
    let mut samples = Array2::zeros((n0, n1));
    let mut imag_residual = 0.0f64;
    for (i, (row, imag)) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::input(format!("non-finite potential value at ({i}, {j})")));
            }
            samples[[i, j]] = v;
        }
        imag_residual = imag_residual.max(imag);
    }
    Ok(PotentialField { grid: grid.clone(), samples, imag_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{Alpha, LimitPeriodicPotential, PeriodicLayer, QuasiPeriodicPotential};

    fn cosine_layer() -> LimitPeriodicPotential {
        let l = PeriodicLayer::new(1, [1.0, 1.0]).with_real_pair([1, 0], Complex64::new(0.5, 0.0));
        LimitPeriodicPotential::new(vec![l], 10.0, 0.5)
    }

    #[test]
    fn zero_potential_gives_zero_field() {
        let p = LimitPeriodicPotential::new(vec![PeriodicLayer::new(1, [1.0, 1.0])], 10.0, 0.5);
        let g = Grid2::centered([3.0, 3.0], [16, 16]).unwrap();
        let f = sample_potential(&p.fourier(), &g).unwrap();
        assert!(f.samples.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_cosine() {
        let g = Grid2::centered([4.0, 2.0], [32, 16]).unwrap();
        let f = sample_potential(&cosine_layer().fourier(), &g).unwrap();
        for ((i, j), v) in f.samples.indexed_iter() {
            let x = g.x(0, i);
            assert!((v - (2.0 * std::f64::consts::PI * x).cos()).abs() < 1e-12, "{i} {j}");
        }
        // x = 0 is grid point 16
        assert!((f.samples[[16, 0]] - 1.0).abs() < 1e-15);
        assert!((f.max() - 1.0).abs() < 1e-12);
        assert!(f.imag_residual < 1e-12);
    }

    #[test]
    fn rejects_unresolved_and_incommensurate() {
        let p = cosine_layer().fourier();
        let coarse = Grid2::centered([4.0, 4.0], [8, 8]).unwrap();
        assert!(matches!(sample_potential(&p, &coarse), Err(Error::Resolution(_))));
        let odd = Grid2::centered([2.5, 4.0], [64, 64]).unwrap();
        assert!(matches!(sample_potential(&p, &odd), Err(Error::Box(_))));
    }

    #[test]
    fn quasi_example_bounds() {
        let q = QuasiPeriodicPotential::mixed_example(Alpha::golden()).unwrap();
        let g = Grid2::centered([16.0, 16.0], [256, 256]).unwrap();
        let f = sample_potential(&q.fourier(), &g).unwrap();
        assert!(f.max() <= 4.0 && f.min() >= -4.0);
        assert!(f.mean().abs() < 1e-2, "mean {}", f.mean());
        assert!(f.imag_residual < 1e-12 * q.fourier().l1_norm());
    }
}
