//! Discrete eigenfunction transforms on the dual grid of a periodic box:
//! packet synthesis and analysis, the smooth cutoff `η_δ`, Parseval and
//! closeness diagnostics, and the ballistic constants.
//!
//! The momentum grid is the dual grid of the box, so a packet is assembled
//! exactly in frequency space and brought to position space by one inverse
//! transform. Normalizations follow [`crate::grid`].

pub mod constants;
pub mod cutoff;
pub mod field;
pub mod packet;
pub mod profile;

pub use constants::{c1_constant, group_velocity_constant, max_group_speed};
pub use cutoff::{build_eta_delta, central_gradient_sup, sandwich_holds, CutoffFunction};
pub use field::{field_from_spectrum, spectrum_of, WaveField};
pub use packet::{analyze, fourier_closeness, parseval_defect, synthesize, synthesize_raw, Closeness, PacketBasis, Synthesis};
pub use profile::{MomentumProfile, ProfileShape};
