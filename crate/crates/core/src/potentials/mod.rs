//! Limit-periodic and quasi-periodic potentials, their finite Fourier
//! representations, validators and grid sampling.

pub mod alpha;
pub mod config;
pub mod diophantine;
pub mod limit_periodic;
pub mod quasi_periodic;
pub mod sample;

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

pub use alpha::Alpha;
pub use config::PotentialSpec;
pub use diophantine::{check_a1, check_a2, A1Options, A1Report, A2Report};
pub use limit_periodic::{LimitPeriodicPotential, PeriodicLayer};
pub use quasi_periodic::QuasiPeriodicPotential;
pub use sample::{sample_potential, PotentialField};

/// Integer label of a frequency; its meaning depends on the module.
pub type Label = [i64; 4];

/// Where the frequencies of a finite Fourier sum live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FrequencyModule {
    /// `label = [m1, m2, 0, 0]` has frequency `(m1 step1, m2 step2)`.
    Lattice { step: [f64; 2] },
    /// `label = [a, b, c, d]` has frequency `2π (a + α c, b + α d)`.
    Quasi { alpha: f64 },
}

impl FrequencyModule {
    pub fn freq(&self, label: Label) -> [f64; 2] {
        match *self {
            FrequencyModule::Lattice { step } => {
                [label[0] as f64 * step[0], label[1] as f64 * step[1]]
            }
            FrequencyModule::Quasi { alpha } => [
                2.0 * PI * (label[0] as f64 + alpha * label[2] as f64),
                2.0 * PI * (label[1] as f64 + alpha * label[3] as f64),
            ],
        }
    }

    /// Period of the lattice, if the module is one.
    pub fn period(&self) -> Option<[f64; 2]> {
        match *self {
            FrequencyModule::Lattice { step } => Some([2.0 * PI / step[0], 2.0 * PI / step[1]]),
            FrequencyModule::Quasi { .. } => None,
        }
    }
}

pub fn add_labels(a: Label, b: Label) -> Label {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn sub_labels(a: Label, b: Label) -> Label {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn neg_label(a: Label) -> Label {
    [-a[0], -a[1], -a[2], -a[3]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub label: Label,
    pub coeff: Complex64,
}

/// `V(x) = Σ c_m e^{i⟨f_m, x⟩}` with finitely many modes. Coefficients are
/// the physical ones, coupling already applied.
#[derive(Debug, Clone, Serialize)]
pub struct FourierPotential {
    pub module: FrequencyModule,
    pub modes: Vec<Mode>,
    #[serde(skip)]
    index: HashMap<Label, usize>,
}

impl FourierPotential {
    pub fn new(module: FrequencyModule, modes: Vec<Mode>) -> Self {
        let mut merged: Vec<Mode> = Vec::with_capacity(modes.len());
        let mut index: HashMap<Label, usize> = HashMap::new();
        for m in modes {
            match index.get(&m.label) {
                Some(&i) => merged[i].coeff += m.coeff,
                None => {
                    index.insert(m.label, merged.len());
                    merged.push(m);
                }
            }
        }
        Self { module, modes: merged, index }
    }

    pub fn zero(module: FrequencyModule) -> Self {
        Self::new(module, Vec::new())
    }

    pub fn coeff(&self, label: Label) -> Complex64 {
        self.index
            .get(&label)
            .map(|&i| self.modes[i].coeff)
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.coeff == Complex64::default())
    }

    pub fn freq(&self, label: Label) -> [f64; 2] {
        self.module.freq(label)
    }

    pub fn l1_norm(&self) -> f64 {
        self.modes.iter().map(|m| m.coeff.norm()).sum()
    }

    pub fn max_freq(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let f = self.freq(m.label);
                f[0].hypot(f[1])
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|c_{-m} - conj(c_m)|`, zero for a real potential.
    pub fn hermiticity_defect(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| (self.coeff(neg_label(m.label)) - m.coeff.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Complex value of the trigonometric sum at `x`.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        self.modes
            .iter()
            .map(|m| {
                let f = self.freq(m.label);
                m.coeff * Complex64::cis(f[0] * x[0] + f[1] * x[1])
            })
            .sum()
    }

    /// Same potential translated by `shift`: `V(x - shift)`.
    pub fn translated(&self, shift: [f64; 2]) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let f = self.freq(m.label);
                Mode {
                    label: m.label,
                    coeff: m.coeff * Complex64::cis(-(f[0] * shift[0] + f[1] * shift[1])),
                }
            })
            .collect();
        Self::new(self.module, modes)
    }

    pub fn scaled(&self, g: f64) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode { label: m.label, coeff: m.coeff * g })
            .collect();
        Self::new(self.module, modes)
    }
}

/// One failed invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub invariant: &'static str,
    pub layer: Option<usize>,
    pub mode: Option<Vec<i64>>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, invariant: &str) -> bool {
        self.violations.iter().any(|v| v.invariant == invariant)
    }

    pub(crate) fn push(
        &mut self,
        invariant: &'static str,
        layer: Option<usize>,
        mode: Option<Vec<i64>>,
        detail: impl Into<String>,
    ) {
        self.violations.push(Violation { invariant, layer, mode, detail: detail.into() });
    }
}
