use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{FourierPotential, FrequencyModule, Mode, ValidationReport};
use crate::error::{Error, Result};

/// `V_r(x) = Σ_q v_{r,q} e^{i⟨q̃,x⟩}`, `q̃ = 2π (q1/(2^{r-1} d1), q2/(2^{r-1} d2))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicLayer {
    pub index: usize,
    pub coefficients: BTreeMap<[i64; 2], Complex64>,
    pub base_periods: [f64; 2],
}

impl PeriodicLayer {
    pub fn new(index: usize, base_periods: [f64; 2]) -> Self {
        Self { index, coefficients: BTreeMap::new(), base_periods }
    }

    pub fn with(mut self, q: [i64; 2], v: Complex64) -> Self {
        self.coefficients.insert(q, v);
        self
    }

    /// Adds `v` at `q` and its conjugate at `-q`.
    pub fn with_real_pair(self, q: [i64; 2], v: Complex64) -> Self {
        self.with(q, v).with([-q[0], -q[1]], v.conj())
    }

    pub fn periods(&self) -> [f64; 2] {
        let s = self.scale();
        [s * self.base_periods[0], s * self.base_periods[1]]
    }

    fn scale(&self) -> f64 {
        2f64.powi(self.index as i32 - 1)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.values().map(|v| v.norm()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPeriodicPotential {
    pub layers: Vec<PeriodicLayer>,
    pub r0: f64,
    pub eta: f64,
    /// `M_n` for `n = 1, 2, ...`.
    pub schedule: Vec<usize>,
    /// Global factor applied to every coefficient.
    pub coupling: f64,
}

impl LimitPeriodicPotential {
    /// Default schedule `M_n = n`, coupling 1.
    pub fn new(layers: Vec<PeriodicLayer>, r0: f64, eta: f64) -> Self {
        let schedule = (1..=layers.len()).collect();
        Self { layers, r0, eta, schedule, coupling: 1.0 }
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.coupling = g;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<usize>) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn base_periods(&self) -> [f64; 2] {
        self.layers.first().map(|l| l.base_periods).unwrap_or([1.0, 1.0])
    }

    /// Period of the sum of all layers.
    pub fn period(&self) -> [f64; 2] {
        let s = 2f64.powi(self.layers.len().max(1) as i32 - 1);
        let d = self.base_periods();
        [s * d[0], s * d[1]]
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            rep.push("parameters", None, None, format!("R0 = {} must be positive", self.r0));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            rep.push("parameters", None, None, format!("eta = {} must be positive", self.eta));
        }
        if !self.coupling.is_finite() {
            rep.push("parameters", None, None, "coupling is not finite");
        }
        let d0 = self.base_periods();
        for (pos, layer) in self.layers.iter().enumerate() {
            let r = layer.index;
            if r != pos + 1 {
                rep.push("layer indices", Some(r), None, format!("expected layer {}, found {r}", pos + 1));
            }
            if layer.base_periods != d0 {
                rep.push("base periods", Some(r), None, "layers must share base periods");
            }
            if !layer.base_periods.iter().all(|d| d.is_finite() && *d > 0.0) {
                rep.push("base periods", Some(r), None, "base periods must be positive");
            }
            let scale = 2f64.powi(1 - r as i32);
            let mut total = 0.0;
            for (&q, &v) in &layer.coefficients {
                let v = v * self.coupling;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    rep.push("finite", Some(r), Some(q.to_vec()), "non-finite coefficient");
                    continue;
                }
                total += v.norm();
                if q == [0, 0] {
                    rep.push("zero mean", Some(r), Some(q.to_vec()), "coefficient at q = (0,0)");
                }
                let partner = layer.coefficients.get(&[-q[0], -q[1]]).copied();
                match partner {
                    Some(w) if (w * self.coupling - v.conj()).norm() <= 1e-14 * v.norm().max(1e-300) => {}
                    Some(_) => rep.push(
                        "realness",
                        Some(r),
                        Some(q.to_vec()),
                        "coefficient at -q is not the conjugate",
                    ),
                    None => rep.push("realness", Some(r), Some(q.to_vec()), "missing coefficient at -q"),
                }
                let norm = ((q[0] * q[0] + q[1] * q[1]) as f64).sqrt();
                if scale * norm >= self.r0 {
                    rep.push(
                        "bandwidth",
                        Some(r),
                        Some(q.to_vec()),
                        format!("2^(1-r)|q| = {} >= R0 = {}", scale * norm, self.r0),
                    );
                }
            }
            let budget = (-(2f64.powf(self.eta * r as f64))).exp();
            if total >= budget {
                rep.push(
                    "decay budget",
                    Some(r),
                    None,
                    format!("sum |v| = {total} >= exp(-2^(eta r)) = {budget}"),
                );
            }
        }
        let mut prev = 0;
        for (i, &m) in self.schedule.iter().enumerate() {
            if m <= prev || m > self.layers.len() {
                rep.push(
                    "truncation schedule",
                    None,
                    None,
                    format!("M_{} = {m} must exceed {prev} and not exceed {}", i + 1, self.layers.len()),
                );
            }
            prev = m;
        }
        rep
    }

    /// Potential of the `n`-th approximant: layers `1..=M_n`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.schedule.len() {
            return Err(Error::Range { index: n, len: self.schedule.len() });
        }
        let m = self.schedule[n - 1].min(self.layers.len());
        Ok(Self {
            layers: self.layers[..m].to_vec(),
            r0: self.r0,
            eta: self.eta,
            schedule: self.schedule[..n].to_vec(),
            coupling: self.coupling,
        })
    }

    /// Layers `from..=to` (1-based) on the lattice dual to the period of
    /// layer `lattice_layer`.
    fn layers_on_lattice(&self, from: usize, to: usize, lattice_layer: usize) -> FourierPotential {
        let top = lattice_layer.max(1);
        let d = self.base_periods();
        let s = 2f64.powi(top as i32 - 1);
        let module = FrequencyModule::Lattice { step: [2.0 * PI / (s * d[0]), 2.0 * PI / (s * d[1])] };
        let mut modes = Vec::new();
        for layer in self.layers.iter().filter(|l| l.index >= from && l.index <= to) {
            let mult = 1i64 << (top - layer.index);
            for (&q, &v) in &layer.coefficients {
                modes.push(Mode { label: [q[0] * mult, q[1] * mult, 0, 0], coeff: v * self.coupling });
            }
        }
        FourierPotential::new(module, modes)
    }

    /// Sum of all layers as a finite Fourier series.
    pub fn fourier(&self) -> FourierPotential {
        let top = self.layers.len();
        self.layers_on_lattice(1, top, top)
    }

    /// `W_n`: the layers added between approximants `n-1` and `n`, on the
    /// lattice of approximant `n`.
    pub fn increment(&self, n: usize) -> Result<FourierPotential> {
        if n == 0 || n > self.schedule.len() {
            return Err(Error::Range { index: n, len: self.schedule.len() });
        }
        let hi = self.schedule[n - 1].min(self.layers.len());
        let lo = if n == 1 { 0 } else { self.schedule[n - 2] };
        Ok(self.layers_on_lattice(lo + 1, hi, hi))
    }

    /// `Σ_{r > M_n} Σ_q |g v_{r,q}|`, a sup-norm bound on `V - V_n`.
    pub fn tail_bound(&self, n: usize) -> Result<f64> {
        let t = self.truncate(n)?;
        Ok(self.layers[t.layers.len()..]
            .iter()
            .map(|l| l.l1_norm() * self.coupling.abs())
            .sum())
    }
}
