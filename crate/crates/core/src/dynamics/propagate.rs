use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Fft2, Grid2};
use crate::potentials::PotentialField;
use crate::transform::WaveField;

/// `0.2 / max |k|²` over the kinetic grid.
pub fn default_dt(grid: &Grid2) -> f64 {
    let n = grid.nyquist();
    0.2 / (n[0] * n[0] + n[1] * n[1])
}

/// Strang splitting `e^{-iK dt/2} e^{-iV dt} e^{-iK dt/2}` with `K = -Δ`
/// applied in frequency space. Consecutive half kinetic steps are fused, so
/// `n` steps cost `n + 1` transform pairs.
pub struct Propagator {
    pub grid: Grid2,
    pub dt: f64,
    fft: Fft2,
    half: Array2<Complex64>,
    full: Array2<Complex64>,
    potential: Option<Array2<Complex64>>,
    spectrum: Array2<Complex64>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator").field("grid", &self.grid).field("dt", &self.dt).finish()
    }
}

impl Propagator {
    /// `dt` may be negative (backward evolution). A zero potential field is
    /// skipped entirely.
    pub fn new(grid: &Grid2, potential: Option<&PotentialField>, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::input(format!("time step {dt} must be finite and nonzero")));
        }
        let shape = (grid.n[0], grid.n[1]);
        let phase = |scale: f64| {
            Array2::from_shape_fn(shape, |(i, j)| {
                let k2 = grid.k(0, i).powi(2) + grid.k(1, j).powi(2);
                Complex64::from_polar(1.0, -k2 * dt * scale)
            })
        };
        let potential = match potential {
            Some(v) => {
                if v.grid != *grid {
                    return Err(Error::input("potential sampled on a different grid"));
                }
                if v.samples.iter().all(|x| *x == 0.0) {
                    None
                } else {
                    Some(v.samples.mapv(|x| Complex64::from_polar(1.0, -x * dt)))
                }
            }
            None => None,
        };
        Ok(Self {
            grid: grid.clone(),
            dt,
            fft: Fft2::new(grid.n),
            half: phase(0.5),
            full: phase(1.0),
            potential,
            spectrum: Array2::zeros(shape),
        })
    }

    /// Advances `field` by `steps` steps in place.
    pub fn advance(&mut self, field: &mut WaveField, steps: usize) -> Result<()> {
        if field.grid != self.grid {
            return Err(Error::input("field lives on a different grid"));
        }
        if steps == 0 {
            return Ok(());
        }
        let inv_n = 1.0 / self.grid.len() as f64;
        self.spectrum.assign(&field.psi);
        self.fft.forward(&mut self.spectrum);
        Zip::from(&mut self.spectrum).and(&self.half).for_each(|s, p| *s *= p);
        for step in 0..steps {
            if let Some(v) = &self.potential {
                self.fft.inverse(&mut self.spectrum);
                Zip::from(&mut self.spectrum).and(v).for_each(|s, p| *s *= p * inv_n);
                self.fft.forward(&mut self.spectrum);
            }
            let k = if step + 1 == steps { &self.half } else { &self.full };
            Zip::from(&mut self.spectrum).and(k).for_each(|s, p| *s *= p);
        }
        self.fft.inverse(&mut self.spectrum);
        Zip::from(&mut field.psi).and(&self.spectrum).for_each(|f, s| *f = s * inv_n);
        field.time += steps as f64 * self.dt;
        if !field.is_finite() {
            return Err(Error::NonFinite { step: steps });
        }
        Ok(())
    }
}

/// Snapshots at steps `0, every, 2·every, ..., steps`.
pub fn propagate(field: &WaveField, prop: &mut Propagator, steps: usize, every: usize) -> Result<Vec<WaveField>> {
    if every == 0 {
        return Err(Error::input("sampling cadence must be positive"));
    }
    let mut f = field.clone();
    let mut out = vec![f.clone()];
    let mut done = 0;
    while done < steps {
        let n = every.min(steps - done);
        prop.advance(&mut f, n).map_err(|e| match e {
            Error::NonFinite { step } => Error::NonFinite { step: done + step },
            e => e,
        })?;
        done += n;
        out.push(f.clone());
    }
    Ok(out)
}

/// `⟨ψ, (-Δ + V) ψ⟩ / ‖ψ‖²`.
pub fn energy(field: &WaveField, potential: Option<&PotentialField>, fft: &mut Fft2) -> f64 {
    let g = &field.grid;
    let mut s = field.psi.clone();
    fft.forward(&mut s);
    let mut kin = 0.0;
    let mut tot = 0.0;
    for ((i, j), z) in s.indexed_iter() {
        let w = z.norm_sqr();
        kin += (g.k(0, i).powi(2) + g.k(1, j).powi(2)) * w;
        tot += w;
    }
    let mut e = kin / tot;
    if let Some(v) = potential {
        let m: f64 = field.psi.iter().map(|z| z.norm_sqr()).sum();
        let pv: f64 = field.psi.iter().zip(v.samples.iter()).map(|(z, x)| z.norm_sqr() * x).sum();
        e += pv / m;
    }
    e
}
