use std::io::Write;

use serde::Serialize;

use crate::bloch::{BranchOptions, BranchSolver, DispersionBranch};
use crate::error::{Error, Result};
use crate::grid::KRect;

/// Cellwise non-resonance over a rectangle of quasimomenta.
#[derive(Debug, Clone, Serialize)]
pub struct NonResonantMask {
    pub rect: KRect,
    pub level: usize,
    pub theta: f64,
    pub gap_floor: f64,
    pub gap_exponent: f64,
    pub mask: Vec<bool>,
    pub weight: Vec<f64>,
    /// Gap to the directly coupled plane waves.
    pub gap: Vec<f64>,
    pub k_norm: Vec<f64>,
}

impl NonResonantMask {
    pub fn from_branch(branch: &DispersionBranch, options: &BranchOptions) -> Self {
        let weight: Vec<f64> = branch.points.iter().map(|p| p.weight).collect();
        let gap: Vec<f64> = branch.points.iter().map(|p| p.coupled_gap).collect();
        let k_norm: Vec<f64> = branch.points.iter().map(|p| p.k_norm()).collect();
        let mut m = Self {
            rect: branch.rect.clone(),
            level: branch.level,
            theta: options.theta,
            gap_floor: options.gap_floor,
            gap_exponent: options.gap_exponent,
            mask: Vec::new(),
            weight,
            gap,
            k_norm,
        };
        m.mask = branch.nonresonant.clone();
        m
    }

    /// Same cells with different thresholds, from the stored diagnostics.
    pub fn rethreshold(&self, theta: f64, gap_floor: f64) -> Self {
        let mut m = self.clone();
        m.theta = theta;
        m.gap_floor = gap_floor;
        for c in 0..m.mask.len() {
            m.mask[c] = m.weight[c] >= theta
                && m.weight[c] > 0.0
                && m.gap[c] > gap_floor * m.k_norm[c].powf(m.gap_exponent);
        }
        m
    }

    /// Cellwise conjunction with a mask of another level on the same cells.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.rect != other.rect {
            return Err(Error::input("masks live on different rectangles"));
        }
        let mut m = self.clone();
        m.level = self.level.max(other.level);
        for c in 0..m.mask.len() {
            m.mask[c] &= other.mask[c];
        }
        Ok(m)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn fraction(&self) -> f64 {
        if self.mask.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.mask.len() as f64
        }
    }

    /// Non-resonant fraction among cells with `lo <= |k| <= hi`.
    pub fn fraction_in_annulus(&self, lo: f64, hi: f64) -> f64 {
        let (mut inside, mut good) = (0usize, 0usize);
        for c in 0..self.mask.len() {
            if self.k_norm[c] >= lo && self.k_norm[c] <= hi {
                inside += 1;
                good += usize::from(self.mask[c]);
            }
        }
        if inside == 0 {
            0.0
        } else {
            good as f64 / inside as f64
        }
    }

    /// Plain PGM (`P2`), one text row per first-axis index; 1 = non-resonant.
    pub fn write_pgm<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        let [n0, n1] = self.rect.n;
        writeln!(w, "P2\n{n1} {n0}\n1")?;
        for i in 0..n0 {
            let row: Vec<&str> = (0..n1).map(|j| if self.mask[i * n1 + j] { "1" } else { "0" }).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Solves the branch on every cell and thresholds it.
pub fn build_mask(solver: &BranchSolver, rect: KRect, level: usize) -> Result<(NonResonantMask, DispersionBranch)> {
    if rect.is_empty() {
        return Err(Error::EmptyRect("no cells".into()));
    }
    if rect.centers().any(|k| k[0].hypot(k[1]) < 1e-12) {
        return Err(Error::input("rectangle contains k = 0; the branch is undefined there"));
    }
    let coupling = solver.potential.l1_norm();
    let branch = DispersionBranch::compute(solver, rect, level, coupling)?;
    Ok((NonResonantMask::from_branch(&branch, &solver.options), branch))
}
