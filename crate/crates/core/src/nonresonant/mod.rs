//! Non-resonant quasimomentum sets, isoenergetic curves and the smooth
//! extension of the dispersion branch across resonant holes.

pub mod extension;
pub mod isoenergy;
pub mod mask;
pub mod mollifier;

pub use extension::{extend_correction, extend_dispersion, ExtendedDispersion};
pub use isoenergy::{curve_derivative, default_bracket, isoenergetic_radius, CurveDerivative, CurveSample, IsoenergeticCurve, Radius};
pub use mask::{build_mask, NonResonantMask};
