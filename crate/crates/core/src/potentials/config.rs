//! Potentials as read from the `[potential]` table of a
//! TOML scenario file.
//!
//! ```toml
//! [potential]
//! kind = "limit-periodic"        # or "quasi-periodic", "free"
//! coupling = 0.05                # global factor g, default 1
//! periods = [1.0, 1.0]           # base periods d1, d2
//! r0 = 10.0                      # bandwidth radius, default 10
//! eta = 0.5                      # decay exponent
//! schedule = [1]                 # M_n, default M_n = n
//! coefficients = [
//!   { r = 1, q = [1, 0], re = 0.5, im = 0.0 },
//!   { r = 1, q = [-1, 0], re = 0.5, im = 0.0 },
//! ]
//! ```
//!
//! A quasi-periodic potential instead lists
//! `alpha = "(sqrt(5)-1)/2"` and `modes = [{ s1 = [1, 0], s2 = [0, 0], re = 0.5, im = 0.0 }, ...]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    Alpha, FourierPotential, FrequencyModule, LimitPeriodicPotential, PeriodicLayer,
    QuasiPeriodicPotential, ValidationReport,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Free,
    LimitPeriodic,
    QuasiPeriodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerRow {
    pub r: usize,
    pub q: [i64; 2],
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRow {
    pub s1: [i64; 2],
    pub s2: [i64; 2],
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialTable {
    pub kind: PotentialKind,
    #[serde(default = "one")]
    pub coupling: f64,
    pub periods: Option<[f64; 2]>,
    #[serde(default = "default_r0")]
    pub r0: f64,
    pub eta: Option<f64>,
    pub schedule: Option<Vec<usize>>,
    #[serde(default)]
    pub coefficients: Vec<LayerRow>,
    pub alpha: Option<String>,
    #[serde(default)]
    pub modes: Vec<ModeRow>,
}

fn one() -> f64 {
    1.0
}

fn default_r0() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    LimitPeriodic(LimitPeriodicPotential),
    QuasiPeriodic(QuasiPeriodicPotential),
}

fn required<T: Clone>(v: &Option<T>, key: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::input(format!("missing key `potential.{key}`")))
}

impl PotentialTable {
    pub fn build(&self) -> Result<PotentialSpec> {
        if !self.coupling.is_finite() {
            return Err(Error::input("`potential.coupling` must be finite"));
        }
        match self.kind {
            PotentialKind::Free => {
                if !self.coefficients.is_empty() || !self.modes.is_empty() {
                    return Err(Error::input("a free potential takes no coefficients or modes"));
                }
                Ok(PotentialSpec::Free)
            }
            PotentialKind::LimitPeriodic => {
                let periods = required(&self.periods, "periods")?;
                let eta = required(&self.eta, "eta")?;
                if !self.modes.is_empty() || self.alpha.is_some() {
                    return Err(Error::input("`alpha`/`modes` belong to quasi-periodic potentials"));
                }
                if !periods.iter().all(|d| d.is_finite() && *d > 0.0) {
                    return Err(Error::input("`potential.periods` must be positive"));
                }
                let depth = self.coefficients.iter().map(|c| c.r).max().unwrap_or(1);
                if self.coefficients.iter().any(|c| c.r == 0) {
                    return Err(Error::input("`potential.coefficients`: layer index r starts at 1"));
                }
                let mut layers: Vec<PeriodicLayer> =
                    (1..=depth).map(|r| PeriodicLayer::new(r, periods)).collect();
                for row in &self.coefficients {
                    let layer = &mut layers[row.r - 1];
                    if layer.coefficients.insert(row.q, Complex64::new(row.re, row.im)).is_some() {
                        return Err(Error::input(format!(
                            "`potential.coefficients`: duplicate row r = {}, q = {:?}",
                            row.r, row.q
                        )));
                    }
                }
                let mut p = LimitPeriodicPotential::new(layers, self.r0, eta).with_coupling(self.coupling);
                if let Some(s) = &self.schedule {
                    p = p.with_schedule(s.clone());
                }
                Ok(PotentialSpec::LimitPeriodic(p))
            }
            PotentialKind::QuasiPeriodic => {
                let alpha = Alpha::parse(&required(&self.alpha, "alpha")?)?;
                if !self.coefficients.is_empty() || self.periods.is_some() {
                    return Err(Error::input("`periods`/`coefficients` belong to limit-periodic potentials"));
                }
                let mut p = QuasiPeriodicPotential::new(alpha)?.with_coupling(self.coupling);
                for row in &self.modes {
                    if p.coefficients.insert((row.s1, row.s2), Complex64::new(row.re, row.im)).is_some() {
                        return Err(Error::input(format!(
                            "`potential.modes`: duplicate row s1 = {:?}, s2 = {:?}",
                            row.s1, row.s2
                        )));
                    }
                }
                Ok(PotentialSpec::QuasiPeriodic(p))
            }
        }
    }
}

impl PotentialSpec {
    /// Fourier series of the `n`-th approximant. Quasi-periodic potentials
    /// have a single (finite) level; `n` is ignored.
    pub fn approximant(&self, n: usize) -> Result<FourierPotential> {
        match self {
            PotentialSpec::Free => Ok(FourierPotential::zero(FrequencyModule::Lattice {
                step: [2.0 * std::f64::consts::PI; 2],
            })),
            PotentialSpec::LimitPeriodic(p) => Ok(p.truncate(n)?.fourier()),
            PotentialSpec::QuasiPeriodic(q) => Ok(q.fourier()),
        }
    }

    /// Number of approximation levels available.
    pub fn levels(&self) -> usize {
        match self {
            PotentialSpec::LimitPeriodic(p) => p.schedule.len(),
            _ => 1,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            PotentialSpec::Free => ValidationReport::default(),
            PotentialSpec::LimitPeriodic(p) => p.validate(),
            PotentialSpec::QuasiPeriodic(q) => q.validate(),
        }
    }

    pub fn coupling(&self) -> f64 {
        match self {
            PotentialSpec::Free => 0.0,
            PotentialSpec::LimitPeriodic(p) => p.coupling,
            PotentialSpec::QuasiPeriodic(q) => q.coupling,
        }
    }
}
