use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transform::{MomentumProfile, PacketBasis, WaveField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontBin {
    pub z_lo: f64,
    pub z_hi: f64,
    pub measured: f64,
    pub predicted: f64,
}

/// Radial mass of a late snapshot in `z = |x - center| / t` against the
/// stationary-phase prediction: momentum `k` carries its weight `|a(k)|²`
/// to `z = |∇λ(k)|`.
#[derive(Debug, Clone, Serialize)]
pub struct FrontProfile {
    pub t: f64,
    pub bin_width: f64,
    pub bins: Vec<FrontBin>,
    /// Edges of the bins with predicted mass.
    pub predicted_support: [f64; 2],
    /// Measured mass with `z` in the predicted support widened by one bin.
    pub mass_in_support: f64,
    pub tail_radius: f64,
    pub measured_tail: f64,
    pub predicted_tail: f64,
    /// Centre of the measured bin with the largest mass.
    pub measured_peak: f64,
    pub predicted_peak: f64,
}

impl FrontProfile {
    /// Columns `z_lo, z_hi, measured, predicted`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "z_lo,z_hi,measured,predicted")?;
        for b in &self.bins {
            writeln!(w, "{:.12e},{:.12e},{:.15e},{:.15e}", b.z_lo, b.z_hi, b.measured, b.predicted)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Bins the snapshot's mass in `z`. `initial_width` is the root-mean-square
/// radius of the packet at `t = 0`; snapshots whose mean ballistic
/// displacement is smaller are rejected as pre-asymptotic.
pub fn front_profile(
    snapshot: &WaveField,
    center: [f64; 2],
    initial_width: f64,
    basis: &PacketBasis,
    amp: &MomentumProfile,
    bin_width: f64,
    tail_radius: f64,
) -> Result<FrontProfile> {
    let t = snapshot.time;
    if !(t > 0.0) {
        return Err(Error::input("front profile needs a snapshot at positive time"));
    }
    if !(bin_width > 0.0) {
        return Err(Error::input("bin width must be positive"));
    }
    if amp.window != basis.window {
        return Err(Error::input("profile and basis use different windows"));
    }
    let mut speeds = Vec::new();
    let mut total = 0.0;
    for (c, v) in amp.values.iter().enumerate() {
        let w = v.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let Some(p) = &basis.points[c] else { continue };
        speeds.push((p.grad[0].hypot(p.grad[1]), w));
        total += w;
    }
    if total == 0.0 {
        return Err(Error::EmptyPacket);
    }
    let mean_speed: f64 = speeds.iter().map(|(s, w)| s * w).sum::<f64>() / total;
    if initial_width > mean_speed * t {
        return Err(Error::PreAsymptotic { width: initial_width, displacement: mean_speed * t });
    }
    let g = &snapshot.grid;
    let half_diag = 0.5 * g.lengths[0].hypot(g.lengths[1]);
    let z_top = (half_diag / t).max(speeds.iter().map(|s| s.0).fold(0.0, f64::max));
    let nbins = (z_top / bin_width).floor() as usize + 1;
    let mut measured = vec![0.0; nbins];
    let mut predicted = vec![0.0; nbins];
    let mut mass = 0.0;
    let (mut measured_tail, mut predicted_tail) = (0.0, 0.0);
    for ((i, j), z) in snapshot.psi.indexed_iter() {
        let w = z.norm_sqr();
        let dx = g.wrap_delta(0, g.x(0, i) - center[0]);
        let dy = g.wrap_delta(1, g.x(1, j) - center[1]);
        let zr = dx.hypot(dy) / t;
        measured[((zr / bin_width) as usize).min(nbins - 1)] += w;
        if zr > tail_radius {
            measured_tail += w;
        }
        mass += w;
    }
    for (s, w) in &speeds {
        predicted[((s / bin_width) as usize).min(nbins - 1)] += w / total;
        if *s > tail_radius {
            predicted_tail += w / total;
        }
    }
    measured.iter_mut().for_each(|m| *m /= mass);
    measured_tail /= mass;
    let bins: Vec<FrontBin> = (0..nbins)
        .map(|b| FrontBin {
            z_lo: b as f64 * bin_width,
            z_hi: (b + 1) as f64 * bin_width,
            measured: measured[b],
            predicted: predicted[b],
        })
        .collect();
    let first = bins.iter().position(|b| b.predicted > 0.0).expect("nonempty prediction");
    let last = bins.iter().rposition(|b| b.predicted > 0.0).expect("nonempty prediction");
    let predicted_support = [bins[first].z_lo, bins[last].z_hi];
    let lo = first.saturating_sub(1);
    let hi = (last + 1).min(nbins - 1);
    let mass_in_support = bins[lo..=hi].iter().map(|b| b.measured).sum();
    let peak = |f: fn(&FrontBin) -> f64| {
        let b = bins.iter().max_by(|a, b| f(a).total_cmp(&f(b))).expect("bins");
        0.5 * (b.z_lo + b.z_hi)
    };
    Ok(FrontProfile {
        t,
        bin_width,
        predicted_support,
        mass_in_support,
        tail_radius,
        measured_tail,
        predicted_tail,
        measured_peak: peak(|b| b.measured),
        predicted_peak: peak(|b| b.predicted),
        bins,
    })
}
