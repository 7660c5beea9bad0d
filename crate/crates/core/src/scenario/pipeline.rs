use serde::Serialize;

use crate::bloch::{BranchOptions, BranchSolver};
use crate::dynamics::{
    ballistic_check, centroid, default_dt, evolve, front_profile, second_moment_about, Evolution, FrontProfile,
    Predictions, Propagator, TransportReport,
};
use crate::dynamics::averages::ABEL_SPAN;
use crate::error::{Error, Result};
use crate::grid::Grid2;
use crate::potentials::{sample_potential, FourierPotential, PotentialField};
use crate::transform::{
    build_eta_delta, c1_constant, group_velocity_constant, max_group_speed, synthesize, CutoffFunction,
    MomentumProfile, PacketBasis, ProfileShape, Synthesis,
};

/// Cells below this fraction of the peak `|a|²` do not count as packet
/// support for the upper-bound speed.
pub const SUPPORT_FLOOR: f64 = 1e-8;

/// Momentum width of a profile family: `σ` for a Gaussian, half the
/// annulus width for a ring.
pub fn profile_width(shape: &ProfileShape) -> f64 {
    match *shape {
        ProfileShape::Gaussian { sigma, .. } => sigma,
        ProfileShape::Ring { k_min, k_max } => 0.5 * (k_max - k_min),
    }
}

/// Everything between a profile and the initial packet: branch basis on the
/// profile window, non-resonant mask, cutoff `η_δ`, the amplitudes
/// `φ̂ η_δ` (unit norm) and the predictions derived from them.
#[derive(Debug, Clone)]
pub struct PacketSetup {
    pub grid: Grid2,
    pub potential: FourierPotential,
    pub shape: ProfileShape,
    /// `φ̂` on its window, unit norm.
    pub profile: MomentumProfile,
    pub basis: PacketBasis,
    pub eta: CutoffFunction,
    /// `φ̂ η_δ`, unit norm.
    pub amp: MomentumProfile,
    pub synthesis: Synthesis,
    pub predictions: Predictions,
}

#[derive(Debug, Clone, Serialize)]
pub struct PacketSummary {
    pub window_cells: usize,
    pub mask_cells: usize,
    pub mask_weight: f64,
    pub delta: f64,
    pub eta_gradient_scale: f64,
    pub prenorm: f64,
    pub dropped: f64,
    pub initial_center: [f64; 2],
    pub initial_m2: f64,
    pub predictions: Predictions,
}

impl PacketSetup {
    /// `delta_cells` is the cutoff width in dual cells; `slack_widths` adds
    /// `slack · width / 2` to the largest group speed on the support.
    pub fn build(
        grid: Grid2,
        potential: FourierPotential,
        options: BranchOptions,
        shape: ProfileShape,
        delta_cells: f64,
        slack_widths: f64,
    ) -> Result<Self> {
        let mut profile = shape.sample(&grid)?;
        profile.normalize()?;
        let window = profile.window.clone();
        let rect = window.rect();
        let k_max = rect
            .centers()
            .map(|k| k[0].hypot(k[1]))
            .fold(0.0, f64::max);
        let solver = BranchSolver::new(potential.clone(), options, k_max)?;
        let basis = PacketBasis::compute(&solver, window, None)?;
        let delta = delta_cells * grid.dk()[0].max(grid.dk()[1]);
        let eta = build_eta_delta(&rect, &basis.nonresonant, delta)?;
        let mut amp = profile.weighted(&eta.values)?;
        let mask_empty = amp.normalize().is_err()
            || !basis.nonresonant.iter().zip(&amp.values).any(|(m, v)| *m && v.norm_sqr() > 0.0);
        if mask_empty {
            // no claim is made; the packet is still built from the bare profile
            amp = profile.clone();
        }
        let synthesis = synthesize(&basis, &amp)?;
        let c1 = c1_constant(&amp, &basis.nonresonant)?;
        let c_gv = group_velocity_constant(&basis, &amp)?;
        let v_max = max_group_speed(&basis, &amp, SUPPORT_FLOOR) + 0.5 * slack_widths * profile_width(&shape);
        let predictions = Predictions { c1, c_gv, v_max, mask_empty };
        Ok(Self { grid, potential, shape, profile, basis, eta, amp, synthesis, predictions })
    }

    pub fn initial_center(&self) -> [f64; 2] {
        centroid(&self.synthesis.field, [0.0, 0.0])
    }

    pub fn summary(&self) -> PacketSummary {
        let c = self.initial_center();
        let cell = self.grid.dual_cell_area();
        PacketSummary {
            window_cells: self.basis.len(),
            mask_cells: self.basis.nonresonant.iter().filter(|m| **m).count(),
            mask_weight: self
                .basis
                .nonresonant
                .iter()
                .zip(&self.profile.values)
                .filter(|(m, _)| **m)
                .map(|(_, v)| v.norm_sqr() * cell)
                .sum(),
            delta: self.eta.delta,
            eta_gradient_scale: self.eta.gradient_scale,
            prenorm: self.synthesis.prenorm,
            dropped: self.synthesis.dropped,
            initial_center: c,
            initial_m2: second_moment_about(&self.synthesis.field, c, c).0,
            predictions: self.predictions,
        }
    }

    /// Potential sampled on the grid, or `None` for the free case.
    pub fn potential_field(&self) -> Result<Option<PotentialField>> {
        if self.potential.is_zero() {
            Ok(None)
        } else {
            sample_potential(&self.potential, &self.grid).map(Some)
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransportOutcome {
    pub dt: f64,
    pub evolution: Evolution,
    pub report: TransportReport,
}

/// Propagates the packet to `ABEL_SPAN · max T` and evaluates the report.
pub fn run_transport(setup: &PacketSetup, t_grid: &[f64], dt: Option<f64>, sample_every: usize) -> Result<TransportOutcome> {
    let t_last = *t_grid.last().ok_or_else(|| Error::input("empty T grid"))?;
    let dt = dt.unwrap_or_else(|| default_dt(&setup.grid));
    let field = setup.potential_field()?;
    let mut prop = Propagator::new(&setup.grid, field.as_ref(), dt)?;
    let center = setup.initial_center();
    let evolution = evolve(&setup.synthesis.field, &mut prop, ABEL_SPAN * t_last, sample_every, center)?;
    let report = ballistic_check(&evolution.series, t_grid, setup.predictions)?;
    Ok(TransportOutcome { dt, evolution, report })
}

#[derive(Debug, Clone)]
pub struct FrontOutcome {
    pub dt: f64,
    pub evolution: Evolution,
    pub profile: FrontProfile,
}

/// Propagates to `t` and compares the radial `z = r / t` density with the
/// group-velocity prediction.
pub fn run_front(setup: &PacketSetup, t: f64, dt: Option<f64>, bin_width: f64, tail_radius: f64) -> Result<FrontOutcome> {
    let dt = dt.unwrap_or_else(|| default_dt(&setup.grid));
    let field = setup.potential_field()?;
    let mut prop = Propagator::new(&setup.grid, field.as_ref(), dt)?;
    let center = setup.initial_center();
    let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
    let evolution = evolve(&setup.synthesis.field, &mut prop, t, steps, center)?;
    let width = evolution.series.samples[0].m2.sqrt();
    let profile = front_profile(&evolution.last, center, width, &setup.basis, &setup.amp, bin_width, tail_radius)?;
    Ok(FrontOutcome { dt, evolution, profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::FrequencyModule;

    fn free() -> FourierPotential {
        FourierPotential::zero(FrequencyModule::Lattice { step: [2.0 * std::f64::consts::PI; 2] })
    }

    #[test]
    fn free_gaussian_setup_predictions() {
        let g = Grid2::centered([32.0, 32.0], [64, 64]).unwrap();
        let shape = ProfileShape::Gaussian { center: [2.0, 0.0], sigma: 0.5 };
        let s = PacketSetup::build(g, free(), BranchOptions::default(), shape, 4.0, 3.0).unwrap();
        // free: ∇λ = 2k, so C_gv = 4 ⟨|k|²⟩ = 4 (|k0|² + 2σ²)
        let p = s.predictions;
        assert!((p.c_gv - 4.0 * (4.0 + 0.5)).abs() < 1e-6 * p.c_gv, "{p:?}");
        assert!((p.c1 - (4.0 + 0.5) / 160.0).abs() < 1e-3 * p.c1, "{p:?}");
        assert!(!p.mask_empty);
        let c = s.initial_center();
        assert!(c[0].abs() < 1e-9 && c[1].abs() < 1e-9);
    }

    #[test]
    fn free_run_reports_quadratic_growth() {
        let g = Grid2::centered([64.0, 64.0], [128, 128]).unwrap();
        let shape = ProfileShape::Gaussian { center: [2.0, 0.0], sigma: 0.25 };
        let s = PacketSetup::build(g, free(), BranchOptions::default(), shape, 4.0, 3.0).unwrap();
        let ts: Vec<f64> = (0..5).map(|i| 0.1 * 10f64.powf(i as f64 / 4.0)).collect();
        let out = run_transport(&s, &ts, Some(0.01), 1).unwrap();
        assert!(!out.report.wrap_risk);
        assert!(out.report.upper_bound.holds);
        assert!((out.report.coefficient_ratio - 1.0).abs() < 0.02, "{}", out.report.coefficient_ratio);
    }
}
