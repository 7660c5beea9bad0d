use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use super::{BranchSolver, DispersionPoint, DualSet};
use crate::error::Result;
use crate::grid::KRect;

/// Branch points over a rectangle of quasimomenta, stored by cell index.
#[derive(Debug, Clone)]
pub struct DispersionBranch {
    pub rect: KRect,
    pub level: usize,
    pub coupling: f64,
    pub dual: Arc<DualSet>,
    pub points: Vec<DispersionPoint>,
    /// Cell passes the full non-resonance test of the solver options.
    pub nonresonant: Vec<bool>,
}

impl DispersionBranch {
    /// Solves every cell centre; the result does not depend on scheduling.
    pub fn compute(solver: &BranchSolver, rect: KRect, level: usize, coupling: f64) -> Result<Self> {
        let centers: Vec<[f64; 2]> = rect.centers().collect();
        let solved: Vec<Result<(DispersionPoint, bool)>> = centers
            .par_iter()
            .map(|&k| {
                let out = solver.solve(k)?;
                let ok = !out.is_resonant() && solver.options.accepts(out.point());
                let p = match out {
                    super::BranchOutcome::Plane(p) | super::BranchOutcome::Resonant(p) => p,
                };
                Ok((p, ok))
            })
            .collect();
        let mut points = Vec::with_capacity(solved.len());
        let mut nonresonant = Vec::with_capacity(solved.len());
        for s in solved {
            let (p, ok) = s?;
            points.push(p);
            nonresonant.push(ok);
        }
        Ok(Self { rect, level, coupling, dual: solver.dual.clone(), points, nonresonant })
    }

    pub fn nonresonant_fraction(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.nonresonant.iter().filter(|b| **b).count() as f64 / self.points.len() as f64
    }

    /// Columns `kx, ky, lambda, gx, gy, weight, gap, resonant_flag`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "kx,ky,lambda,gx,gy,weight,gap,resonant_flag")?;
        for (p, ok) in self.points.iter().zip(&self.nonresonant) {
            writeln!(
                w,
                "{:.12e},{:.12e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{}",
                p.k[0],
                p.k[1],
                p.lambda,
                p.grad[0],
                p.grad[1],
                p.weight,
                p.resonance_gap,
                u8::from(!ok)
            )?;
        }
        w.flush()?;
        Ok(())
    }
}
