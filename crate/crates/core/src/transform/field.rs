use std::io::{BufRead, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Fft2, Grid2};

/// Complex amplitude on a periodic grid at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid2,
    pub psi: Array2<Complex64>,
    pub time: f64,
}

impl WaveField {
    pub fn zeros(grid: Grid2) -> Self {
        let psi = Array2::zeros((grid.n[0], grid.n[1]));
        Self { grid, psi, time: 0.0 }
    }

    pub fn from_fn(grid: Grid2, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let psi = Array2::from_shape_fn((grid.n[0], grid.n[1]), |(i, j)| f([grid.x(0, i), grid.x(1, j)]));
        Self { grid, psi, time: 0.0 }
    }

    /// `Σ |ψ|² Δx₁Δx₂`.
    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        self.psi.mapv_inplace(|z| z * s);
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::EmptyPacket);
        }
        self.scale(1.0 / n);
        Ok(n)
    }

    /// `Σ ψ̄ φ Δx₁Δx₂`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.psi.iter().zip(other.psi.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.cell_area()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d: f64 = self.psi.iter().zip(other.psi.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        (d * self.grid.cell_area()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.psi.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Writes the packet format: a text header terminated by `data`, then
    /// row-major little-endian `f64` pairs `(re, im)`.
    pub fn write_packet<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        let g = &self.grid;
        writeln!(w, "ballistic-packet 1")?;
        writeln!(w, "box {:e} {:e}", g.lengths[0], g.lengths[1])?;
        writeln!(w, "origin {:e} {:e}", g.origin[0], g.origin[1])?;
        writeln!(w, "resolution {} {}", g.n[0], g.n[1])?;
        writeln!(w, "time {:e}", self.time)?;
        writeln!(w, "endian little")?;
        writeln!(w, "data")?;
        for z in self.psi.iter() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_packet(path: &Path) -> Result<Self> {
        let bad = |m: &str| Error::Format { path: path.to_path_buf(), message: m.to_string() };
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lengths = None;
        let mut origin = None;
        let mut n = None;
        let mut time = 0.0;
        let mut line = String::new();
        let mut first = true;
        loop {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(bad("missing data marker"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if first {
                if parts != ["ballistic-packet", "1"] {
                    return Err(bad("not a version 1 packet file"));
                }
                first = false;
                continue;
            }
            let pair = |p: &[&str]| -> Result<[f64; 2]> {
                match p {
                    [a, b] => Ok([a.parse().map_err(|_| bad("bad number"))?, b.parse().map_err(|_| bad("bad number"))?]),
                    _ => Err(bad("expected two values")),
                }
            };
            match parts.first().copied() {
                Some("box") => lengths = Some(pair(&parts[1..])?),
                Some("origin") => origin = Some(pair(&parts[1..])?),
                Some("resolution") => {
                    let v = pair(&parts[1..])?;
                    n = Some([v[0] as usize, v[1] as usize]);
                }
                Some("time") => time = parts.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad time"))?,
                Some("endian") => {
                    if parts.get(1) != Some(&"little") {
                        return Err(bad("only little-endian data is supported"));
                    }
                }
                Some("data") => break,
                _ => return Err(bad(&format!("unknown header line {:?}", line.trim()))),
            }
        }
        let (Some(lengths), Some(n)) = (lengths, n) else {
            return Err(bad("header lacks box or resolution"));
        };
        let grid = match origin {
            Some(o) => Grid2::new(lengths, n, o)?,
            None => Grid2::centered(lengths, n)?,
        };
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != grid.len() * 16 {
            return Err(bad(&format!("expected {} data bytes, found {}", grid.len() * 16, bytes.len())));
        }
        let vals: Vec<Complex64> = bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        let psi = Array2::from_shape_vec((n[0], n[1]), vals).map_err(|e| bad(&e.to_string()))?;
        Ok(Self { grid, psi, time })
    }
}

/// Phase `e^{-i⟨k_m, origin⟩}` linking FFT output to the centred transform.
fn origin_phase(grid: &Grid2, i: usize, j: usize) -> Complex64 {
    let t = grid.k(0, i) * grid.origin[0] + grid.k(1, j) * grid.origin[1];
    Complex64::from_polar(1.0, -t)
}

/// `F̂(k) = (2π)⁻¹ Σ_x F(x) e^{-i⟨k,x⟩} Δx₁Δx₂` in FFT storage order.
pub fn spectrum_of(field: &WaveField, fft: &mut Fft2) -> Array2<Complex64> {
    let g = &field.grid;
    let mut s = field.psi.clone();
    fft.forward(&mut s);
    let c = g.cell_area() / (2.0 * std::f64::consts::PI);
    for ((i, j), z) in s.indexed_iter_mut() {
        *z *= origin_phase(g, i, j) * c;
    }
    s
}

/// Inverse of [`spectrum_of`].
pub fn field_from_spectrum(grid: &Grid2, spectrum: &Array2<Complex64>, fft: &mut Fft2) -> WaveField {
    let mut s = spectrum.clone();
    let c = grid.dual_cell_area() / (2.0 * std::f64::consts::PI);
    for ((i, j), z) in s.indexed_iter_mut() {
        *z *= origin_phase(grid, i, j).conj() * c;
    }
    fft.inverse(&mut s);
    WaveField { grid: grid.clone(), psi: s, time: 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_spectrum_is_a_spike() {
        let g = Grid2::centered([8.0, 4.0], [16, 8]).unwrap();
        let k = [g.k(0, 3), g.k(1, 6)];
        let f = WaveField::from_fn(g.clone(), |x| Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]));
        let mut fft = Fft2::new(g.n);
        let s = spectrum_of(&f, &mut fft);
        let expected = g.cell_area() * g.len() as f64 / (2.0 * std::f64::consts::PI);
        for ((i, j), z) in s.indexed_iter() {
            if (i, j) == (3, 6) {
                assert!((z - expected).norm() < 1e-12);
            } else {
                assert!(z.norm() < 1e-12);
            }
        }
        let back = field_from_spectrum(&g, &s, &mut fft);
        assert!(back.distance(&f) < 1e-12);
        let s2: f64 = s.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dual_cell_area();
        assert!((s2 - f.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn packet_file_round_trip() {
        let g = Grid2::centered([2.0, 2.0], [4, 8]).unwrap();
        let mut f = WaveField::from_fn(g, |x| Complex64::new(x[0], -x[1]));
        f.time = 1.25;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.bin");
        f.write_packet(std::fs::File::create(&path).unwrap()).unwrap();
        assert_eq!(WaveField::read_packet(&path).unwrap(), f);
        std::fs::write(&path, b"ballistic-packet 1\nbox 1 1\nresolution 4 4\ndata\n").unwrap();
        assert!(matches!(WaveField::read_packet(&path), Err(Error::Format { .. })));
    }
}
