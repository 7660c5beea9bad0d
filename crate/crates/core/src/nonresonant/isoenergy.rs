use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::BranchSolver;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Radius {
    Root(f64),
    NoRoot,
}

impl Radius {
    pub fn value(&self) -> Option<f64> {
        match self {
            Radius::Root(k) => Some(*k),
            Radius::NoRoot => None,
        }
    }
}

/// Relative residual a returned root must meet.
pub const ROOT_RESIDUAL: f64 = 1e-8;

/// Default bracket `[0.5 √λ, 1.5 √λ]`.
pub fn default_bracket(lambda: f64) -> [f64; 2] {
    [0.5 * lambda.sqrt(), 1.5 * lambda.sqrt()]
}

/// Root of `λ_n(κ ν) = λ` along `ν = (cos φ, sin φ)` by bisection on the
/// dominant branch. The direction is rejected when the root is not a
/// non-resonant point or misses the residual tolerance.
pub fn isoenergetic_radius(solver: &BranchSolver, lambda: f64, phi: f64, bracket: [f64; 2]) -> Result<Radius> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::input(format!("energy {lambda} must be positive")));
    }
    let [mut lo, mut hi] = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::input(format!("invalid bracket [{lo}, {hi}]")));
    }
    let nu = [phi.cos(), phi.sin()];
    let f = |kappa: f64| -> Result<f64> { Ok(solver.lambda([kappa * nu[0], kappa * nu[1]])? - lambda) };
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        hi = lo;
    } else if fhi == 0.0 {
        lo = hi;
    } else if (flo > 0.0) == (fhi > 0.0) {
        return Ok(Radius::NoRoot);
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let kappa = 0.5 * (lo + hi);
    let k = [kappa * nu[0], kappa * nu[1]];
    match solver.nonresonant(k)? {
        Some(p) if (p.lambda - lambda).abs() < ROOT_RESIDUAL * lambda => Ok(Radius::Root(kappa)),
        _ => Ok(Radius::NoRoot),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub phi: f64,
    pub kappa: Option<f64>,
}

impl CurveSample {
    pub fn member(&self) -> bool {
        self.kappa.is_some()
    }
}

/// Samples of the level set `λ_n(k) = λ` in polar form.
#[derive(Debug, Clone, Serialize)]
pub struct IsoenergeticCurve {
    pub lambda: f64,
    pub level: usize,
    pub samples: Vec<CurveSample>,
}

impl IsoenergeticCurve {
    /// Traces `count` equally spaced directions `φ_j = 2π j / count`.
    pub fn trace(solver: &BranchSolver, lambda: f64, level: usize, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::input("need at least one direction"));
        }
        let bracket = default_bracket(lambda);
        let samples: Vec<Result<CurveSample>> = (0..count)
            .into_par_iter()
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / count as f64;
                Ok(CurveSample { phi, kappa: isoenergetic_radius(solver, lambda, phi, bracket)?.value() })
            })
            .collect();
        Ok(Self { lambda, level, samples: samples.into_iter().collect::<Result<_>>()? })
    }

    /// `2π` times the fraction of sampled directions with a radius.
    pub fn direction_measure(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        2.0 * PI * self.samples.iter().filter(|s| s.member()).count() as f64 / self.samples.len() as f64
    }

    /// `max |κ - √λ|` over member directions.
    pub fn max_deviation(&self) -> f64 {
        let r = self.lambda.sqrt();
        self.samples
            .iter()
            .filter_map(|s| s.kappa)
            .map(|k| (k - r).abs())
            .fold(0.0, f64::max)
    }

    /// Columns `phi, kappa, member`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "phi,kappa,member")?;
        for s in &self.samples {
            match s.kappa {
                Some(k) => writeln!(w, "{:.15e},{:.15e},1", s.phi, k)?,
                None => writeln!(w, "{:.15e},nan,0", s.phi)?,
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveDerivative {
    /// `(φ, dκ/dφ)` at members whose both neighbours are members.
    pub values: Vec<(f64, f64)>,
    pub max_abs: f64,
    /// Member directions without two member neighbours.
    pub skipped: usize,
}

/// Central differences over consecutive member samples (periodic in φ).
/// Samples must be equally spaced.
pub fn curve_derivative(curve: &IsoenergeticCurve) -> Result<CurveDerivative> {
    let n = curve.samples.len();
    if n < 3 {
        return Err(Error::input("need at least three directions"));
    }
    let h = 2.0 * PI / n as f64;
    let mut values = Vec::new();
    let mut skipped = 0;
    for i in 0..n {
        let Some(_) = curve.samples[i].kappa else { continue };
        let prev = curve.samples[(i + n - 1) % n].kappa;
        let next = curve.samples[(i + 1) % n].kappa;
        match (prev, next) {
            (Some(a), Some(b)) => values.push((curve.samples[i].phi, (b - a) / (2.0 * h))),
            _ => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::input("no run of three consecutive member directions"));
    }
    let max_abs = values.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
    Ok(CurveDerivative { values, max_abs, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::BranchOptions;
    use crate::potentials::{FourierPotential, FrequencyModule};

    fn free() -> BranchSolver {
        let pot = FourierPotential::zero(FrequencyModule::Lattice { step: [1.0, 1.0] });
        BranchSolver::new(pot, BranchOptions::default(), 10.0).unwrap()
    }

    #[test]
    fn free_radius_is_sqrt_lambda() {
        let s = free();
        for phi in [0.0, 0.7, 2.0, 4.5] {
            let k = isoenergetic_radius(&s, 36.0, phi, default_bracket(36.0)).unwrap().value().unwrap();
            assert!((k - 6.0).abs() < 1e-10);
        }
        assert!(isoenergetic_radius(&s, 36.0, 0.0, [3.0, 2.0]).is_err());
        assert_eq!(isoenergetic_radius(&s, 36.0, 0.0, [7.0, 8.0]).unwrap(), Radius::NoRoot);
    }

    #[test]
    fn free_curve_is_a_full_circle() {
        let c = IsoenergeticCurve::trace(&free(), 16.0, 1, 360).unwrap();
        assert!((c.direction_measure() - 2.0 * PI).abs() < 1e-12);
        assert!(c.max_deviation() < 1e-10);
        let d = curve_derivative(&c).unwrap();
        assert!(d.max_abs < 1e-6);
        assert_eq!(d.skipped, 0);
    }

    #[test]
    fn synthetic_derivative() {
        let eps = 0.01;
        let n = 3600;
        let samples = (0..n)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / n as f64;
                CurveSample { phi, kappa: Some(6.0 + eps * phi.sin()) }
            })
            .collect();
        let c = IsoenergeticCurve { lambda: 36.0, level: 1, samples };
        let d = curve_derivative(&c).unwrap();
        for (phi, v) in d.values {
            assert!((v - eps * phi.cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn isolated_members_are_skipped() {
        let samples = (0..6)
            .map(|j| CurveSample { phi: j as f64, kappa: if j % 2 == 0 { Some(1.0) } else { None } })
            .collect();
        let c = IsoenergeticCurve { lambda: 1.0, level: 1, samples };
        assert!(curve_derivative(&c).is_err());
    }
}
