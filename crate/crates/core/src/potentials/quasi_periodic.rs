use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Alpha, FourierPotential, FrequencyModule, Mode, ValidationReport};
use crate::error::{Error, Result};

/// `V(x) = Σ V_{s1,s2} e^{2πi⟨s1 + α s2, x⟩}` over a finite set of integer
/// vector pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPeriodicPotential {
    pub alpha: Alpha,
    pub coefficients: BTreeMap<([i64; 2], [i64; 2]), Complex64>,
    pub coupling: f64,
}

impl QuasiPeriodicPotential {
    pub fn new(alpha: Alpha) -> Result<Self> {
        if !alpha.models_irrational() {
            return Err(Error::input(format!("alpha = {alpha} must be irrational")));
        }
        if !(alpha.value > 0.0 && alpha.value < 1.0) {
            return Err(Error::input(format!("alpha = {} must lie in (0, 1)", alpha.value)));
        }
        Ok(Self { alpha, coefficients: BTreeMap::new(), coupling: 1.0 })
    }

    pub fn with(mut self, s1: [i64; 2], s2: [i64; 2], v: Complex64) -> Self {
        self.coefficients.insert((s1, s2), v);
        self
    }

    /// Adds `v` at `(s1, s2)` and `conj(v)` at `(-s1, -s2)`.
    pub fn with_real_pair(self, s1: [i64; 2], s2: [i64; 2], v: Complex64) -> Self {
        self.with(s1, s2, v).with([-s1[0], -s1[1]], [-s2[0], -s2[1]], v.conj())
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.coupling = g;
        self
    }

    /// `cos 2πx1 + cos 2πx2 + cos 2π(α x1 + x2) + cos 2π(x1 + α x2)`.
    pub fn mixed_example(alpha: Alpha) -> Result<Self> {
        let h = Complex64::new(0.5, 0.0);
        Ok(Self::new(alpha)?
            .with_real_pair([1, 0], [0, 0], h)
            .with_real_pair([0, 1], [0, 0], h)
            .with_real_pair([0, 1], [1, 0], h)
            .with_real_pair([1, 0], [0, 1], h))
    }

    /// `cos 2πx1 + cos 2πx2 + cos 2πα x1 + cos 2πα x2`.
    pub fn separable_example(alpha: Alpha) -> Result<Self> {
        let h = Complex64::new(0.5, 0.0);
        Ok(Self::new(alpha)?
            .with_real_pair([1, 0], [0, 0], h)
            .with_real_pair([0, 1], [0, 0], h)
            .with_real_pair([0, 0], [1, 0], h)
            .with_real_pair([0, 0], [0, 1], h))
    }

    /// Physical frequency vectors `s1 + α s2` (without the 2π).
    pub fn frequency_set(&self) -> Vec<([i64; 2], [i64; 2])> {
        self.coefficients.keys().copied().collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        for (&(s1, s2), &v) in &self.coefficients {
            let label = vec![s1[0], s1[1], s2[0], s2[1]];
            if !(v.re.is_finite() && v.im.is_finite()) {
                rep.push("finite", None, Some(label), "non-finite coefficient");
                continue;
            }
            if s1 == [0, 0] && s2 == [0, 0] {
                rep.push("zero mean", None, Some(label.clone()), "constant term");
            }
            match self.coefficients.get(&([-s1[0], -s1[1]], [-s2[0], -s2[1]])) {
                Some(w) if (*w - v.conj()).norm() <= 1e-14 * v.norm().max(1e-300) => {}
                Some(_) => rep.push("realness", None, Some(label), "coefficient at -s is not the conjugate"),
                None => rep.push("symmetry", None, Some(label), "missing (-s1, -s2)"),
            }
        }
        // labels are distinct keys and α is irrational, so frequencies are
        // distinct; a finite-precision decimal can still collide numerically
        let freqs: Vec<_> = self
            .coefficients
            .keys()
            .map(|(s1, s2)| {
                (
                    s1[0] as f64 + self.alpha.value * s2[0] as f64,
                    s1[1] as f64 + self.alpha.value * s2[1] as f64,
                )
            })
            .collect();
        for i in 0..freqs.len() {
            for j in 0..i {
                if (freqs[i].0 - freqs[j].0).abs() < 1e-12 && (freqs[i].1 - freqs[j].1).abs() < 1e-12 {
                    rep.push("distinct frequencies", None, None, format!("entries {j} and {i} coincide"));
                }
            }
        }
        rep
    }

    pub fn fourier(&self) -> FourierPotential {
        let modes = self
            .coefficients
            .iter()
            .map(|(&(s1, s2), &v)| Mode { label: [s1[0], s1[1], s2[0], s2[1]], coeff: v * self.coupling })
            .collect();
        FourierPotential::new(FrequencyModule::Quasi { alpha: self.alpha.value }, modes)
    }
}
