use super::packet::PacketBasis;
use super::profile::MomentumProfile;
use crate::error::{Error, Result};

/// `(1/160) Σ_mask Δk₁Δk₂ |k|² |φ̂(k)|²`.
pub fn c1_constant(profile: &MomentumProfile, mask: &[bool]) -> Result<f64> {
    if mask.len() != profile.values.len() {
        return Err(Error::input("mask does not match the profile cells"));
    }
    let s: f64 = profile
        .values
        .iter()
        .enumerate()
        .filter(|(c, _)| mask[*c])
        .map(|(c, v)| {
            let k = profile.k(c);
            (k[0] * k[0] + k[1] * k[1]) * v.norm_sqr()
        })
        .sum();
    Ok(s * profile.window.grid.dual_cell_area() / 160.0)
}

/// `Σ Δk₁Δk₂ |∇λ(k)|² |a(k)|² / Σ Δk₁Δk₂ |a(k)|²`: the `t²` coefficient of
/// `⟨X²⟩(t)` for the packet synthesized from `a`.
pub fn group_velocity_constant(basis: &PacketBasis, amp: &MomentumProfile) -> Result<f64> {
    if amp.window != basis.window {
        return Err(Error::input("profile and basis use different windows"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (c, v) in amp.values.iter().enumerate() {
        let Some(p) = &basis.points[c] else { continue };
        let w = v.norm_sqr();
        num += (p.grad[0] * p.grad[0] + p.grad[1] * p.grad[1]) * w;
        den += w;
    }
    if den == 0.0 {
        return Err(Error::EmptyPacket);
    }
    Ok(num / den)
}

/// Largest `|∇λ|` over cells carrying more than `floor` of the peak `|a|²`.
pub fn max_group_speed(basis: &PacketBasis, amp: &MomentumProfile, floor: f64) -> f64 {
    let peak = amp.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    amp.values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > floor * peak)
        .filter_map(|(c, _)| basis.points[c].as_ref())
        .map(|p| p.grad[0].hypot(p.grad[1]))
        .fold(0.0, f64::max)
}
