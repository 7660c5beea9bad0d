//! Plane-wave dispersion branch `λ_n(k)` and eigenfunction coefficients
//! `C_r(k)` of a periodic approximant (or a truncated quasi-periodic
//! operator), by dense diagonalization and by the coefficient recursion.

pub mod branch;
pub mod decay;
pub mod dense;
pub mod lattice;
pub mod matrix;
pub mod recursive;
pub mod sweep;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use branch::{grad_lambda, select_plane_wave_branch, BranchOutcome, DispersionPoint};
pub use decay::{coefficient_decay_profile, fit_decay_power, DecayReport};
pub use dense::{solve_dense, solve_hermitian, EigenPairs, DEFAULT_DENSE_LIMIT};
pub use lattice::DualSet;
pub use matrix::{assemble_bloch_matrix, BlochMatrix};
pub use recursive::{solve_recursive, RecursiveOptions};
pub use sweep::DispersionBranch;

use crate::error::Result;
use crate::potentials::FourierPotential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dense,
    Recursive,
    /// Recursion first; dense diagonalization when it fails or lands on an
    /// eigenvector with plane-wave weight at most 1/2. Any eigenvector with
    /// weight above 1/2 is the unique dominant one, so the result always
    /// equals the dense selection.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BranchOptions {
    /// Minimal plane-wave weight `|C_0|²` of a non-resonant branch.
    pub theta: f64,
    /// Non-resonance also requires the gap to the directly coupled plane
    /// waves to exceed `gap_floor · |k|^gap_exponent`.
    pub gap_floor: f64,
    pub gap_exponent: f64,
    /// Dual-set radius; by default `2 k_max + 2 max|f| + 1`.
    pub cutoff: Option<f64>,
    /// Reachability depth for quasi-periodic module points.
    pub hops: usize,
    pub dense_limit: usize,
    pub method: Method,
    pub recursive: RecursiveOptions,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self {
            theta: 0.9,
            gap_floor: 0.5,
            gap_exponent: 0.5,
            cutoff: None,
            hops: 3,
            dense_limit: DEFAULT_DENSE_LIMIT,
            method: Method::Auto,
            recursive: RecursiveOptions::default(),
        }
    }
}

impl BranchOptions {
    pub fn gap_threshold(&self, k_norm: f64) -> f64 {
        self.gap_floor * k_norm.powf(self.gap_exponent)
    }

    /// Whether a branch point counts as non-resonant.
    pub fn accepts(&self, p: &DispersionPoint) -> bool {
        p.weight >= self.theta && p.weight > 0.0 && p.coupled_gap > self.gap_threshold(p.k_norm())
    }
}

/// Solves for the plane-wave branch at arbitrary `k` with a shared dual set.
#[derive(Debug, Clone)]
pub struct BranchSolver {
    pub potential: FourierPotential,
    pub dual: Arc<DualSet>,
    pub options: BranchOptions,
}

impl BranchSolver {
    /// Dual set sized for quasimomenta with `|k| <= k_max`.
    pub fn new(potential: FourierPotential, options: BranchOptions, k_max: f64) -> Result<Self> {
        let cutoff = if potential.is_zero() {
            0.0
        } else {
            options
                .cutoff
                .unwrap_or(2.0 * k_max + 2.0 * potential.max_freq() + 1.0)
        };
        let dual = Arc::new(DualSet::build(&potential, cutoff, options.hops)?);
        Ok(Self { potential, dual, options })
    }

    pub fn matrix(&self, k: [f64; 2]) -> Result<BlochMatrix> {
        assemble_bloch_matrix(&self.potential, &self.dual, k)
    }

    /// Branch by the configured method. The recursive method reports
    /// non-convergence as an error.
    pub fn solve(&self, k: [f64; 2]) -> Result<BranchOutcome> {
        let m = self.matrix(k)?;
        self.solve_matrix(&m)
    }

    pub fn solve_matrix(&self, m: &BlochMatrix) -> Result<BranchOutcome> {
        match self.options.method {
            Method::Dense => {
                let pairs = solve_dense(m, self.options.dense_limit)?;
                select_plane_wave_branch(&pairs, m, self.options.theta)
            }
            Method::Recursive => {
                let p = solve_recursive(m, self.options.recursive)?;
                Ok(self.classify(p))
            }
            Method::Auto => match solve_recursive(m, self.options.recursive) {
                Ok(p) if p.weight > 0.5 => Ok(self.classify(p)),
                _ => {
                    let pairs = solve_dense(m, self.options.dense_limit)?;
                    select_plane_wave_branch(&pairs, m, self.options.theta)
                }
            },
        }
    }

    fn classify(&self, p: DispersionPoint) -> BranchOutcome {
        if p.weight >= self.options.theta {
            BranchOutcome::Plane(p)
        } else {
            BranchOutcome::Resonant(p)
        }
    }

    /// Branch point if it passes the full non-resonance test.
    pub fn nonresonant(&self, k: [f64; 2]) -> Result<Option<DispersionPoint>> {
        let out = self.solve(k)?;
        let p = out.point();
        Ok(if !out.is_resonant() && self.options.accepts(p) { Some(out.plane().expect("plane")) } else { None })
    }

    /// `λ` of the dominant-weight eigenpair, resonant or not.
    pub fn lambda(&self, k: [f64; 2]) -> Result<f64> {
        Ok(self.solve(k)?.point().lambda)
    }
}
