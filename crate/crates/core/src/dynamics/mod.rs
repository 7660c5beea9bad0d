//! Split-step time evolution on the torus, second moments with wrap
//! monitoring, Abel and Cesàro means, exponent fits, the transport report
//! and the stationary-phase front comparison.

pub mod averages;
pub mod front;
pub mod moments;
pub mod propagate;
pub mod report;

pub use averages::{abel_mean, cesaro_mean, fit_exponent, ExponentFit, TimeMean};
pub use front::{front_profile, FrontBin, FrontProfile};
pub use moments::{centroid, second_moment, second_moment_about, MomentSample, MomentSeries};
pub use propagate::{default_dt, energy, propagate, Propagator};
pub use report::{ballistic_check, Predictions, TransportReport, UpperBound};

use crate::error::{Error, Result};
use crate::transform::WaveField;

/// Moments of a run sampled every `every` steps up to `t_max`, plus the
/// final field.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: MomentSeries,
    pub last: WaveField,
}

/// Evolves `initial` to at least `t_max`, recording `⟨|x - center|²⟩`.
pub fn evolve(initial: &WaveField, prop: &mut Propagator, t_max: f64, every: usize, center: [f64; 2]) -> Result<Evolution> {
    if every == 0 || !(t_max >= 0.0) {
        return Err(Error::input("sampling cadence and end time must be positive"));
    }
    let dt = prop.dt.abs();
    let steps = (t_max / dt - 1e-9).ceil().max(0.0) as usize;
    let mut series = MomentSeries::new(center, prop.dt);
    let mut f = initial.clone();
    f.time = 0.0;
    series.record(&f)?;
    let mut done = 0;
    while done < steps {
        let n = every.min(steps - done);
        prop.advance(&mut f, n).map_err(|e| match e {
            Error::NonFinite { step } => Error::NonFinite { step: done + step },
            e => e,
        })?;
        done += n;
        series.record(&f)?;
    }
    series.steps = done;
    Ok(Evolution { series, last: f })
}
