//! Uniform periodic grids in position space, their dual momentum grids,
//! and a 2D FFT wrapper.
//!
//! Conventions used throughout the crate:
//!
//! * a position grid covers the box `[origin, origin + L)` per axis with
//!   `N` points, `Δx = L / N`;
//! * the dual grid consists of `k = Δk · m` with `Δk = 2π / L` and the
//!   integer `m` in FFT order, `-N/2 <= m < N/2`;
//! * the continuum transform pair is discretised as
//!   `F̂(k) = (2π)⁻¹ Σ_x F(x) e^{-i⟨k,x⟩} Δx₁Δx₂` and
//!   `F(x) = (2π)⁻¹ Σ_k F̂(k) e^{i⟨k,x⟩} Δk₁Δk₂`, which is exactly unitary:
//!   `Σ |F|² Δx₁Δx₂ = Σ |F̂|² Δk₁Δk₂`.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub lengths: [f64; 2],
    pub n: [usize; 2],
    pub origin: [f64; 2],
}

impl Grid2 {
    /// Box centred on the origin.
    pub fn centered(lengths: [f64; 2], n: [usize; 2]) -> Result<Self> {
        Self::new(lengths, n, [-0.5 * lengths[0], -0.5 * lengths[1]])
    }

    pub fn new(lengths: [f64; 2], n: [usize; 2], origin: [f64; 2]) -> Result<Self> {
        for axis in 0..2 {
            if !(lengths[axis].is_finite() && lengths[axis] > 0.0) {
                return Err(Error::input(format!("box length {} must be positive", lengths[axis])));
            }
            if n[axis] < 2 || !n[axis].is_power_of_two() {
                return Err(Error::Resolution(format!(
                    "resolution {} on axis {axis} must be a power of two >= 2",
                    n[axis]
                )));
            }
        }
        Ok(Self { lengths, n, origin })
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> [f64; 2] {
        [self.lengths[0] / self.n[0] as f64, self.lengths[1] / self.n[1] as f64]
    }

    pub fn dk(&self) -> [f64; 2] {
        [2.0 * PI / self.lengths[0], 2.0 * PI / self.lengths[1]]
    }

    pub fn cell_area(&self) -> f64 {
        let dx = self.dx();
        dx[0] * dx[1]
    }

    pub fn dual_cell_area(&self) -> f64 {
        let dk = self.dk();
        dk[0] * dk[1]
    }

    pub fn x(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.dx()[axis]
    }

    /// Largest representable wavenumber per axis.
    pub fn nyquist(&self) -> [f64; 2] {
        let dx = self.dx();
        [PI / dx[0], PI / dx[1]]
    }

    /// Signed frequency index of storage slot `i` along `axis`.
    pub fn freq_index(&self, axis: usize, i: usize) -> i64 {
        let n = self.n[axis];
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Storage slot of signed frequency index `m`, if it lies on the grid.
    pub fn slot_of(&self, axis: usize, m: i64) -> Option<usize> {
        let n = self.n[axis] as i64;
        if m < -n / 2 || m >= n / 2 {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + n) as usize)
        }
    }

    pub fn k(&self, axis: usize, i: usize) -> f64 {
        self.freq_index(axis, i) as f64 * self.dk()[axis]
    }

    /// Minimal-image displacement `x - c` along `axis`.
    pub fn wrap_delta(&self, axis: usize, d: f64) -> f64 {
        let l = self.lengths[axis];
        d - l * (d / l).round()
    }
}

/// Rectangle of equally spaced momentum cell centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRect {
    /// Centre of cell `(0, 0)`.
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub n: [usize; 2],
}

impl KRect {
    /// Cells covering `[lo, hi]` per axis with `n` cell centres.
    pub fn spanning(lo: [f64; 2], hi: [f64; 2], n: [usize; 2]) -> Result<Self> {
        if n[0] == 0 || n[1] == 0 {
            return Err(Error::EmptyRect("zero cells".into()));
        }
        let mut spacing = [0.0; 2];
        for a in 0..2 {
            if !(hi[a] > lo[a]) {
                return Err(Error::EmptyRect(format!("axis {a}: [{}, {}]", lo[a], hi[a])));
            }
            spacing[a] = (hi[a] - lo[a]) / n[a] as f64;
        }
        Ok(Self {
            origin: [lo[0] + 0.5 * spacing[0], lo[1] + 0.5 * spacing[1]],
            spacing,
            n,
        })
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n[1] + j
    }

    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.spacing[0],
            self.origin[1] + j as f64 * self.spacing[1],
        ]
    }

    pub fn centers(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.n[0]).flat_map(move |i| (0..self.n[1]).map(move |j| self.center(i, j)))
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing[0] * self.spacing[1]
    }
}

/// Sub-rectangle of a box's dual grid, addressed by signed frequency indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualWindow {
    pub grid: Grid2,
    pub start: [i64; 2],
    pub n: [usize; 2],
}

impl DualWindow {
    pub fn new(grid: Grid2, start: [i64; 2], n: [usize; 2]) -> Result<Self> {
        if n[0] == 0 || n[1] == 0 {
            return Err(Error::EmptyRect("dual window has no cells".into()));
        }
        for a in 0..2 {
            let last = start[a] + n[a] as i64 - 1;
            if grid.slot_of(a, start[a]).is_none() || grid.slot_of(a, last).is_none() {
                return Err(Error::Resolution(format!(
                    "dual window [{}, {last}] leaves the grid on axis {a}",
                    start[a]
                )));
            }
        }
        Ok(Self { grid, start, n })
    }

    /// Smallest window containing all dual points with `|k - center|_∞ <= half_width`.
    pub fn around(grid: Grid2, center: [f64; 2], half_width: [f64; 2]) -> Result<Self> {
        let dk = grid.dk();
        let mut start = [0i64; 2];
        let mut n = [0usize; 2];
        for a in 0..2 {
            let lo = ((center[a] - half_width[a]) / dk[a]).floor() as i64;
            let hi = ((center[a] + half_width[a]) / dk[a]).ceil() as i64;
            let nmax = grid.n[a] as i64;
            let lo = lo.max(-nmax / 2);
            let hi = hi.min(nmax / 2 - 1);
            start[a] = lo;
            n[a] = (hi - lo + 1).max(0) as usize;
        }
        Self::new(grid, start, n)
    }

    /// The whole dual grid.
    pub fn full(grid: Grid2) -> Self {
        let start = [-(grid.n[0] as i64) / 2, -(grid.n[1] as i64) / 2];
        let n = grid.n;
        Self { grid, start, n }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rect(&self) -> KRect {
        let dk = self.grid.dk();
        KRect {
            origin: [self.start[0] as f64 * dk[0], self.start[1] as f64 * dk[1]],
            spacing: dk,
            n: self.n,
        }
    }

    pub fn freq(&self, i: usize, j: usize) -> [i64; 2] {
        [self.start[0] + i as i64, self.start[1] + j as i64]
    }

    pub fn k(&self, i: usize, j: usize) -> [f64; 2] {
        let dk = self.grid.dk();
        let m = self.freq(i, j);
        [m[0] as f64 * dk[0], m[1] as f64 * dk[1]]
    }

    /// Window cell holding the signed frequency `m`, if any.
    pub fn cell_of(&self, m: [i64; 2]) -> Option<usize> {
        let i = m[0] - self.start[0];
        let j = m[1] - self.start[1];
        if i < 0 || j < 0 || i >= self.n[0] as i64 || j >= self.n[1] as i64 {
            None
        } else {
            Some(i as usize * self.n[1] + j as usize)
        }
    }

    /// Grid storage slot of window cell `(i, j)`.
    pub fn slot(&self, i: usize, j: usize) -> (usize, usize) {
        let m = self.freq(i, j);
        (
            self.grid.slot_of(0, m[0]).expect("window inside grid"),
            self.grid.slot_of(1, m[1]).expect("window inside grid"),
        )
    }
}

/// Unnormalised 2D FFT over row-major `[n0, n1]` arrays.
pub struct Fft2 {
    n: [usize; 2],
    fwd: [Arc<dyn Fft<f64>>; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
    scratch: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: [usize; 2]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = [planner.plan_fft_forward(n[0]), planner.plan_fft_forward(n[1])];
        let inv = [planner.plan_fft_inverse(n[0]), planner.plan_fft_inverse(n[1])];
        let scratch_len = fwd
            .iter()
            .chain(inv.iter())
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            n,
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            transposed: vec![Complex64::new(0.0, 0.0); n[0] * n[1]],
        }
    }

    pub fn forward(&mut self, data: &mut Array2<Complex64>) {
        self.apply(data, false);
    }

    /// Inverse transform without the `1/N` factor.
    pub fn inverse(&mut self, data: &mut Array2<Complex64>) {
        self.apply(data, true);
    }

    fn apply(&mut self, data: &mut Array2<Complex64>, inverse: bool) {
        assert_eq!(data.dim(), (self.n[0], self.n[1]), "FFT plan/array shape mismatch");
        let plans = if inverse { &self.inv } else { &self.fwd };
        let buf = data.as_slice_mut().expect("standard layout");
        // rows (axis 1) are contiguous
        plans[1].process_with_scratch(buf, &mut self.scratch);
        transpose(buf, &mut self.transposed, self.n[0], self.n[1]);
        plans[0].process_with_scratch(&mut self.transposed, &mut self.scratch);
        transpose(&self.transposed, buf, self.n[1], self.n[0]);
    }
}

/// `dst[c * rows + r] = src[r * cols + c]`, blocked for cache locality.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for rb in (0..rows).step_by(B) {
        for cb in (0..cols).step_by(B) {
            for r in rb..(rb + B).min(rows) {
                for c in cb..(cb + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid2::centered([1.0, 1.0], [12, 16]).is_err());
        assert!(Grid2::centered([1.0, 1.0], [16, 16]).is_ok());
    }

    #[test]
    fn freq_slot_roundtrip() {
        let g = Grid2::centered([4.0, 4.0], [8, 16]).unwrap();
        for i in 0..8 {
            let m = g.freq_index(0, i);
            assert_eq!(g.slot_of(0, m), Some(i));
        }
        assert_eq!(g.slot_of(0, 4), None);
        assert_eq!(g.slot_of(0, -4), Some(4));
    }

    #[test]
    fn fft_roundtrip_and_single_mode() {
        let n = [8, 4];
        let mut fft = Fft2::new(n);
        let mut a = Array2::from_shape_fn((8, 4), |(i, j)| Complex64::new(i as f64, (j * j) as f64));
        let orig = a.clone();
        fft.forward(&mut a);
        fft.inverse(&mut a);
        for (x, y) in a.iter().zip(orig.iter()) {
            assert!((x / 32.0 - y).norm() < 1e-12);
        }
        // e^{2πi(i/8 + 2j/4)} lands in slot (1, 2)
        let mut b = Array2::from_shape_fn((8, 4), |(i, j)| {
            Complex64::from_polar(1.0, 2.0 * PI * (i as f64 / 8.0 + 2.0 * j as f64 / 4.0))
        });
        fft.forward(&mut b);
        for ((i, j), v) in b.indexed_iter() {
            let expect = if (i, j) == (1, 2) { 32.0 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-10 && v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn dual_window_cells() {
        let g = Grid2::centered([2.0 * PI, 2.0 * PI], [16, 16]).unwrap();
        let w = DualWindow::around(g, [2.0, -1.0], [1.0, 1.0]).unwrap();
        assert_eq!(w.start, [1, -2]);
        assert_eq!(w.n, [3, 3]);
        assert_eq!(w.cell_of([2, -1]), Some(4));
        assert_eq!(w.k(1, 1), [2.0, -1.0]);
    }
}
