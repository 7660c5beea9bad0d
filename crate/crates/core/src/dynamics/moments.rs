use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transform::WaveField;

/// Fraction of the box half-width treated as the wrap band: mass whose
/// minimal-image offset from the centroid exceeds `(1 - WRAP_BAND) L/2` on
/// either axis counts as at risk.
pub const WRAP_BAND: f64 = 0.1;
/// Mass fraction in the wrap band that raises the flag.
pub const WRAP_THRESHOLD: f64 = 1e-6;

/// Centroid of `|ψ|²` from the circular mean on each axis, as the image
/// nearest `previous`.
pub fn centroid(field: &WaveField, previous: [f64; 2]) -> [f64; 2] {
    let g = &field.grid;
    let mut out = [0.0; 2];
    for a in 0..2 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        let w = 2.0 * PI / g.lengths[a];
        for ((i, j), z) in field.psi.indexed_iter() {
            let x = if a == 0 { g.x(0, i) } else { g.x(1, j) };
            acc += num_complex::Complex64::from_polar(z.norm_sqr(), w * x);
        }
        let raw = if acc.norm() > 0.0 { acc.arg() / w } else { previous[a] };
        out[a] = previous[a] + g.wrap_delta(a, raw - previous[a]);
    }
    out
}

/// Moment of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSample {
    pub t: f64,
    /// `Σ |x - center|² |ψ|² Δx / ‖ψ‖²` with minimal-image coordinates.
    pub m2: f64,
    pub centroid: [f64; 2],
    /// Mass fraction inside the wrap band.
    pub edge_mass: f64,
    pub norm: f64,
}

impl MomentSample {
    pub fn wrap_risk(&self) -> bool {
        self.edge_mass >= WRAP_THRESHOLD
    }
}

/// Second moment about `center`; each point is represented by its image
/// nearest `reference` (normally the tracked centroid).
pub fn second_moment_about(field: &WaveField, center: [f64; 2], reference: [f64; 2]) -> (f64, f64) {
    let g = &field.grid;
    let limit = [0.5 * (1.0 - WRAP_BAND) * g.lengths[0], 0.5 * (1.0 - WRAP_BAND) * g.lengths[1]];
    let dx: Vec<f64> = (0..g.n[0]).map(|i| g.wrap_delta(0, g.x(0, i) - reference[0])).collect();
    let dy: Vec<f64> = (0..g.n[1]).map(|j| g.wrap_delta(1, g.x(1, j) - reference[1])).collect();
    let shift = [reference[0] - center[0], reference[1] - center[1]];
    let (mut m, mut total, mut edge) = (0.0, 0.0, 0.0);
    for ((i, j), z) in field.psi.indexed_iter() {
        let w = z.norm_sqr();
        let (u, v) = (dx[i] + shift[0], dy[j] + shift[1]);
        m += (u * u + v * v) * w;
        total += w;
        if dx[i].abs() > limit[0] || dy[j].abs() > limit[1] {
            edge += w;
        }
    }
    if total == 0.0 {
        (0.0, 0.0)
    } else {
        (m / total, edge / total)
    }
}

/// Second moment about `center` with the centroid as unwrapping reference.
pub fn second_moment(field: &WaveField, center: [f64; 2]) -> f64 {
    let c = centroid(field, center);
    second_moment_about(field, center, c).0
}

/// Moments along a trajectory, with the centroid tracked continuously.
#[derive(Debug, Clone, Serialize)]
pub struct MomentSeries {
    pub center: [f64; 2],
    pub dt: f64,
    pub steps: usize,
    pub samples: Vec<MomentSample>,
}

impl MomentSeries {
    pub fn new(center: [f64; 2], dt: f64) -> Self {
        Self { center, dt, steps: 0, samples: Vec::new() }
    }

    /// Appends the moment of `field`; times must increase.
    pub fn record(&mut self, field: &WaveField) -> Result<()> {
        if let Some(last) = self.samples.last() {
            if !(field.time > last.t) {
                return Err(Error::input("sample times must increase"));
            }
        }
        let prev = self.samples.last().map_or(self.center, |s| s.centroid);
        let c = centroid(field, prev);
        let (m2, edge_mass) = second_moment_about(field, self.center, c);
        self.samples.push(MomentSample { t: field.time, m2, centroid: c, edge_mass, norm: field.norm() });
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.m2).collect()
    }

    pub fn any_wrap_risk(&self) -> bool {
        self.samples.iter().any(|s| s.wrap_risk())
    }

    /// Largest `|‖ψ(t)‖ - ‖ψ(0)‖| / ‖ψ(0)‖`.
    pub fn norm_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else { return 0.0 };
        self.samples.iter().map(|s| (s.norm - first.norm).abs() / first.norm).fold(0.0, f64::max)
    }

    /// Columns `t, m2, wrap_flag`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "t,m2,wrap_flag")?;
        for s in &self.samples {
            writeln!(w, "{:.15e},{:.15e},{}", s.t, s.m2, u8::from(s.wrap_risk()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2;
    use num_complex::Complex64;

    fn gaussian(g: &Grid2, c: [f64; 2], s: f64) -> WaveField {
        let mut f = WaveField::from_fn(g.clone(), |x| {
            let dx = g.wrap_delta(0, x[0] - c[0]);
            let dy = g.wrap_delta(1, x[1] - c[1]);
            Complex64::new((-(dx * dx + dy * dy) / (4.0 * s * s)).exp(), 0.0)
        });
        f.normalize().unwrap();
        f
    }

    #[test]
    fn gaussian_variance() {
        let g = Grid2::centered([32.0, 32.0], [128, 128]).unwrap();
        let f = gaussian(&g, [0.0, 0.0], 1.5);
        assert!((second_moment(&f, [0.0, 0.0]) - 2.0 * 1.5 * 1.5).abs() < 1e-10);
    }

    #[test]
    fn point_mass_and_translation() {
        let g = Grid2::centered([16.0, 16.0], [32, 32]).unwrap();
        let mut f = WaveField::zeros(g.clone());
        f.psi[(16, 16)] = Complex64::new(1.0, 0.0);
        assert_eq!(second_moment(&f, [0.0, 0.0]), 0.0);
        let a = gaussian(&g, [1.0, 2.0], 1.0);
        let b = gaussian(&g, [7.5, -6.0], 1.0);
        let ma = second_moment(&a, centroid(&a, [1.0, 2.0]));
        let mb = second_moment(&b, centroid(&b, [7.5, -6.0]));
        assert!((ma - mb).abs() < 1e-8);
    }

    #[test]
    fn wrapped_packet_keeps_its_distance() {
        let g = Grid2::centered([16.0, 16.0], [64, 64]).unwrap();
        let f = gaussian(&g, [7.5, 0.0], 0.5);
        let mut s = MomentSeries::new([0.0, 0.0], 1.0);
        s.record(&f).unwrap();
        assert!((s.samples[0].m2 - (7.5f64.powi(2) + 0.5)).abs() < 1e-8);
        let mut far = gaussian(&g, [-0.5, 0.0], 0.5);
        far.time = 1.0;
        s.samples[0].centroid = [23.0, 0.0];
        s.record(&far).unwrap();
        // tracked from 23, the packet at -0.5 is the image at 15.5
        assert!((s.samples[1].m2 - (15.5f64.powi(2) + 0.5)).abs() < 1e-6);
        assert!(s.record(&far).is_err());
    }
}
