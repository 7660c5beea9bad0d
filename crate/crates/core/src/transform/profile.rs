use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DualWindow, Grid2};
use crate::nonresonant::mollifier::bump;

/// Momentum amplitudes on the cells of a dual window.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumProfile {
    pub window: DualWindow,
    pub values: Vec<Complex64>,
}

/// Analytic profile families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileShape {
    /// `exp(-|k - k0|² / 4σ²)`: momentum spread `σ` per axis.
    Gaussian { center: [f64; 2], sigma: f64 },
    /// Radial bump `(1 - u²)⁴`, `u = (|k| - k_mid) / half_width`, supported
    /// on `k_min <= |k| <= k_max`.
    Ring { k_min: f64, k_max: f64 },
}

impl ProfileShape {
    pub fn eval(&self, k: [f64; 2]) -> f64 {
        match *self {
            ProfileShape::Gaussian { center, sigma } => {
                let d2 = (k[0] - center[0]).powi(2) + (k[1] - center[1]).powi(2);
                (-d2 / (4.0 * sigma * sigma)).exp()
            }
            ProfileShape::Ring { k_min, k_max } => {
                let mid = 0.5 * (k_min + k_max);
                let half = 0.5 * (k_max - k_min);
                let u = (k[0].hypot(k[1]) - mid) / half;
                bump(u * u)
            }
        }
    }

    /// `(center, half_width)` of a square containing the numerical support.
    pub fn extent(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            ProfileShape::Gaussian { center, sigma } => (center, [8.0 * sigma; 2]),
            ProfileShape::Ring { k_max, .. } => ([0.0, 0.0], [k_max; 2]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ProfileShape::Gaussian { center, sigma } => sigma > 0.0 && sigma.is_finite() && center.iter().all(|c| c.is_finite()),
            ProfileShape::Ring { k_min, k_max } => k_min >= 0.0 && k_max > k_min && k_max.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::input(format!("invalid profile {self:?}")))
        }
    }

    /// Profile sampled on the smallest dual window covering its support.
    pub fn sample(&self, grid: &Grid2) -> Result<MomentumProfile> {
        self.validate()?;
        let (c, h) = self.extent();
        let window = DualWindow::around(grid.clone(), c, h)?;
        Ok(MomentumProfile::from_fn(window, |k| Complex64::new(self.eval(k), 0.0)))
    }
}

impl MomentumProfile {
    pub fn from_fn(window: DualWindow, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(window.len());
        for i in 0..window.n[0] {
            for j in 0..window.n[1] {
                values.push(f(window.k(i, j)));
            }
        }
        Self { window, values }
    }

    pub fn k(&self, cell: usize) -> [f64; 2] {
        self.window.k(cell / self.window.n[1], cell % self.window.n[1])
    }

    /// `Σ |φ̂|² Δk₁Δk₂`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.window.grid.dual_cell_area()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::EmptyPacket);
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(n)
    }

    /// Cellwise product with a real weight (for example a cutoff).
    pub fn weighted(&self, weight: &[f64]) -> Result<Self> {
        if weight.len() != self.values.len() {
            return Err(Error::input("weight does not match the profile cells"));
        }
        let values = self.values.iter().zip(weight).map(|(v, w)| v * *w).collect();
        Ok(Self { window: self.window.clone(), values })
    }

    /// `max |k|^j |φ̂(k)|` for `j = 0..=6`.
    pub fn decay_moments(&self) -> [f64; 7] {
        let mut out = [0.0; 7];
        for (c, v) in self.values.iter().enumerate() {
            let k = self.k(c);
            let r = k[0].hypot(k[1]);
            let a = v.norm();
            for (j, o) in out.iter_mut().enumerate() {
                *o = f64::max(*o, r.powi(j as i32) * a);
            }
        }
        out
    }

    /// Fraction of `Σ|φ̂|²` on the outermost ring of window cells; small when
    /// the window captures the profile.
    pub fn edge_fraction(&self) -> f64 {
        let [n0, n1] = self.window.n;
        let total: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge: f64 = (0..self.values.len())
            .filter(|c| {
                let (i, j) = (c / n1, c % n1);
                i == 0 || j == 0 || i + 1 == n0 || j + 1 == n1
            })
            .map(|c| self.values[c].norm_sqr())
            .sum();
        edge / total
    }

    /// Columns `kx, ky, re, im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "kx,ky,re,im")?;
        for (c, v) in self.values.iter().enumerate() {
            let k = self.k(c);
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", k[0], k[1], v.re, v.im)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a CSV profile onto the dual grid of `grid`. Every row must sit
    /// on a dual grid point; cells not listed are zero.
    pub fn read_csv(path: &Path, grid: &Grid2) -> Result<Self> {
        let bad = |line: usize, m: &str| Error::Format { path: path.to_path_buf(), message: format!("line {line}: {m}") };
        let r = std::io::BufReader::new(std::fs::File::open(path)?);
        let dk = grid.dk();
        let mut rows = Vec::new();
        for (no, line) in r.lines().enumerate() {
            let line = line?;
            if no == 0 {
                if line.trim() != "kx,ky,re,im" {
                    return Err(bad(1, "expected header kx,ky,re,im"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(no + 1, "non-numeric field"))?;
            if f.len() != 4 {
                return Err(bad(no + 1, "expected four columns"));
            }
            let mut m = [0i64; 2];
            for a in 0..2 {
                let x = f[a] / dk[a];
                if (x - x.round()).abs() > 1e-6 {
                    return Err(bad(no + 1, "momentum is not on the dual grid"));
                }
                m[a] = x.round() as i64;
            }
            rows.push((m, Complex64::new(f[2], f[3])));
        }
        if rows.is_empty() {
            return Err(bad(1, "no data rows"));
        }
        let lo = [0, 1].map(|a| rows.iter().map(|r| r.0[a]).min().expect("rows"));
        let hi = [0, 1].map(|a| rows.iter().map(|r| r.0[a]).max().expect("rows"));
        let window = DualWindow::new(grid.clone(), lo, [(hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize])?;
        let mut values = vec![Complex64::new(0.0, 0.0); window.len()];
        for (m, v) in rows {
            values[window.cell_of(m).expect("inside bounds")] = v;
        }
        Ok(Self { window, values })
    }
}
