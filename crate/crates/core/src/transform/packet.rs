use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::field::{field_from_spectrum, spectrum_of, WaveField};
use super::profile::MomentumProfile;
use crate::bloch::{BranchSolver, DispersionPoint};
use crate::error::{Error, Result};
use crate::grid::{DualWindow, Fft2};

/// Branch eigenfunctions `Ψ(k, x) = e^{i⟨k,x⟩} Σ_r C_r(k) e^{i⟨p_r,x⟩}` for
/// the cells of a dual window. The coefficients have unit ℓ² norm, so the
/// family is orthonormal up to truncation of the dual set.
#[derive(Debug, Clone)]
pub struct PacketBasis {
    pub window: DualWindow,
    /// `p_r` in units of the box's dual spacing.
    pub offsets: Vec<[i64; 2]>,
    /// Branch point per window cell; `None` where nothing was solved.
    pub points: Vec<Option<DispersionPoint>>,
    pub nonresonant: Vec<bool>,
}

impl PacketBasis {
    /// Solves the branch at every window cell where `support` is true (all
    /// cells when `None`). The dual vectors must lie on the box's dual grid.
    pub fn compute(solver: &BranchSolver, window: DualWindow, support: Option<&[bool]>) -> Result<Self> {
        if let Some(s) = support {
            if s.len() != window.len() {
                return Err(Error::input("support does not match the window"));
            }
        }
        let dk = window.grid.dk();
        let mut offsets = Vec::with_capacity(solver.dual.len());
        for p in &solver.dual.vectors {
            let mut m = [0i64; 2];
            for a in 0..2 {
                let x = p[a] / dk[a];
                if (x - x.round()).abs() > 1e-9 * x.abs().max(1.0) {
                    return Err(Error::Box(format!(
                        "dual vector ({:.6}, {:.6}) is not on the dual grid of the box",
                        p[0], p[1]
                    )));
                }
                m[a] = x.round() as i64;
            }
            offsets.push(m);
        }
        let n1 = window.n[1];
        let solved: Vec<Result<(Option<DispersionPoint>, bool)>> = (0..window.len())
            .into_par_iter()
            .map(|c| {
                if support.is_some_and(|s| !s[c]) {
                    return Ok((None, false));
                }
                let k = window.k(c / n1, c % n1);
                if k[0] == 0.0 && k[1] == 0.0 && !solver.potential.is_zero() {
                    return Ok((None, false));
                }
                let out = solver.solve(k)?;
                let ok = !out.is_resonant() && solver.options.accepts(out.point());
                Ok((Some(out.point().clone()), ok))
            })
            .collect();
        let mut points = Vec::with_capacity(window.len());
        let mut nonresonant = Vec::with_capacity(window.len());
        for s in solved {
            let (p, ok) = s?;
            points.push(p);
            nonresonant.push(ok);
        }
        Ok(Self { window, offsets, points, nonresonant })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn check(&self, amp: &[Complex64]) -> Result<()> {
        if amp.len() != self.len() {
            return Err(Error::input(format!("{} amplitudes for {} window cells", amp.len(), self.len())));
        }
        Ok(())
    }

    /// Grid storage slot of `cell`'s frequency shifted by `p_r`.
    fn slot(&self, cell: usize, r: usize) -> Option<(usize, usize)> {
        let n1 = self.window.n[1];
        let m = self.window.freq(cell / n1, cell % n1);
        let g = &self.window.grid;
        Some((g.slot_of(0, m[0] + self.offsets[r][0])?, g.slot_of(1, m[1] + self.offsets[r][1])?))
    }

    /// Spectrum of `Σ_k a(k) Ψ(k, ·)`; terms falling off the grid are
    /// dropped and their `Δk`-weighted squared size returned.
    pub fn spectrum(&self, amp: &[Complex64]) -> Result<(Array2<Complex64>, f64)> {
        self.check(amp)?;
        let g = &self.window.grid;
        let mut s = Array2::zeros((g.n[0], g.n[1]));
        let mut dropped = 0.0;
        for (c, a) in amp.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let Some(p) = &self.points[c] else { continue };
            for (r, cr) in p.coefficients.iter().enumerate() {
                match self.slot(c, r) {
                    Some(ij) => s[ij] += a * cr,
                    None => dropped += (a * cr).norm_sqr(),
                }
            }
        }
        Ok((s, dropped * g.dual_cell_area()))
    }

    /// `Σ_r conj(C_r(k)) F̂(k + p_r)` per window cell.
    pub fn coefficients_of(&self, spectrum: &Array2<Complex64>) -> Vec<Complex64> {
        (0..self.len())
            .map(|c| match &self.points[c] {
                None => Complex64::new(0.0, 0.0),
                Some(p) => p
                    .coefficients
                    .iter()
                    .enumerate()
                    .filter_map(|(r, cr)| self.slot(c, r).map(|ij| cr.conj() * spectrum[ij]))
                    .sum(),
            })
            .collect()
    }
}

/// Result of packet synthesis.
#[derive(Debug, Clone)]
pub struct Synthesis {
    /// Unit-norm packet.
    pub field: WaveField,
    /// `‖Σ_k Δk a(k) Ψ(k, ·) / 2π‖` before normalization.
    pub prenorm: f64,
    /// Squared norm of components beyond the grid's frequency range.
    pub dropped: f64,
}

/// `(2π)⁻¹ Σ_k Δk₁Δk₂ a(k) Ψ(k, x)` without normalization.
pub fn synthesize_raw(basis: &PacketBasis, amp: &[Complex64], fft: &mut Fft2) -> Result<(WaveField, f64)> {
    let (s, dropped) = basis.spectrum(amp)?;
    Ok((field_from_spectrum(&basis.window.grid, &s, fft), dropped))
}

/// Packet from momentum amplitudes (typically `φ̂ η_δ`), normalized.
pub fn synthesize(basis: &PacketBasis, amp: &MomentumProfile) -> Result<Synthesis> {
    if amp.window != basis.window {
        return Err(Error::input("profile and basis use different windows"));
    }
    let mut fft = Fft2::new(basis.window.grid.n);
    let (mut field, dropped) = synthesize_raw(basis, &amp.values, &mut fft)?;
    let prenorm = field.norm();
    if !(prenorm > 0.0) {
        return Err(Error::EmptyPacket);
    }
    field.scale(1.0 / prenorm);
    Ok(Synthesis { field, prenorm, dropped })
}

/// `(T F)(k) = (2π)⁻¹ (F, Ψ(k, ·))` on the window cells.
pub fn analyze(basis: &PacketBasis, field: &WaveField, fft: &mut Fft2) -> Result<MomentumProfile> {
    if field.grid != basis.window.grid {
        return Err(Error::Box("field grid differs from the basis box".into()));
    }
    let s = spectrum_of(field, fft);
    Ok(MomentumProfile { window: basis.window.clone(), values: basis.coefficients_of(&s) })
}

/// `| ‖S T F‖² - Σ Δk |T F|² |`.
pub fn parseval_defect(basis: &PacketBasis, field: &WaveField, fft: &mut Fft2) -> Result<f64> {
    let t = analyze(basis, field, fft)?;
    let (back, _) = synthesize_raw(basis, &t.values, fft)?;
    Ok((back.norm_sqr() - t.norm_sqr()).abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct Closeness {
    /// Power-iteration estimate of `‖S_n - S_0‖` on the non-resonant cells.
    pub estimate: f64,
    /// `sup|C_0 - 1| + Σ_{r≠0} sup_k |C_r(k)|`.
    pub upper_bound: f64,
    pub iterations: usize,
}

/// Estimates the distance between branch synthesis and plain Fourier
/// synthesis on the non-resonant cells of the window.
pub fn fourier_closeness(basis: &PacketBasis, seed: u64, iterations: usize) -> Result<Closeness> {
    use rand::{Rng, SeedableRng};
    let iterations = iterations.max(20);
    let active = |c: usize| if basis.nonresonant[c] { basis.points[c].as_ref() } else { None };
    let mut sup = vec![0.0f64; basis.offsets.len()];
    for p in (0..basis.len()).filter_map(active) {
        for (r, c) in p.coefficients.iter().enumerate() {
            let d = if r == 0 { c - 1.0 } else { *c };
            sup[r] = sup[r].max(d.norm());
        }
    }
    let upper_bound: f64 = sup.iter().sum();
    if upper_bound == 0.0 {
        return Ok(Closeness { estimate: 0.0, upper_bound, iterations: 0 });
    }
    let g = &basis.window.grid;
    let apply = |a: &[Complex64]| -> Array2<Complex64> {
        let mut s = Array2::zeros((g.n[0], g.n[1]));
        for (c, x) in a.iter().enumerate() {
            let Some(p) = active(c) else { continue };
            for (r, cr) in p.coefficients.iter().enumerate() {
                let d = if r == 0 { cr - 1.0 } else { *cr };
                if let Some(ij) = basis.slot(c, r) {
                    s[ij] += x * d;
                }
            }
        }
        s
    };
    let adjoint = |s: &Array2<Complex64>| -> Vec<Complex64> {
        (0..basis.len())
            .map(|c| match active(c) {
                None => Complex64::new(0.0, 0.0),
                Some(p) => p
                    .coefficients
                    .iter()
                    .enumerate()
                    .filter_map(|(r, cr)| {
                        let d = if r == 0 { cr - 1.0 } else { *cr };
                        basis.slot(c, r).map(|ij| d.conj() * s[ij])
                    })
                    .sum(),
            })
            .collect()
    };
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..basis.len())
        .map(|c| {
            if active(c).is_some() {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let n = norm(&v);
        if n == 0.0 {
            break;
        }
        v.iter_mut().for_each(|z| *z /= n);
        let w = adjoint(&apply(&v));
        estimate = norm(&w).sqrt();
        v = w;
    }
    Ok(Closeness { estimate, upper_bound, iterations })
}
