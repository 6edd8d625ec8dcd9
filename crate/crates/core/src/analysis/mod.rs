//! Signature extraction from captures.

mod bode;
mod levels;
mod sine;
mod thd;

use thiserror::Error;

pub use bode::{
    bode_from_pairs, extract_f3db, extract_f3db_with_reference, fit_single_pole, BodeCurve,
    BodePoint, CapturePair, F3dbEstimate, SinglePoleFit, SweepMeta, THREE_DB,
};
pub use levels::{extract_slew_rate, extract_vom, SlewRate};
pub use sine::{fit_sine, SinFit};
pub use thd::{ramp_distortion_score, RAMP_DISTORTION_THRESHOLD, THD_HARMONICS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("frequency must be positive and finite, got {0} Hz")]
    InvalidFrequency(f64),
    #[error("capture spans {cycles:.3} cycles, at least {min} required")]
    TooFewCycles { cycles: f64, min: usize },
    #[error("capture has {per_cycle:.2} samples per cycle, at least {min} required")]
    TooFewSamplesPerCycle { per_cycle: f64, min: usize },
    #[error("sine fit basis is degenerate")]
    DegenerateFit,
    #[error("sine fit failed at {f_hz} Hz: {source}")]
    FitFailed {
        f_hz: f64,
        #[source]
        source: Box<AnalysisError>,
    },
    #[error("zero fitted amplitude at {f_hz} Hz")]
    ZeroAmplitude { f_hz: f64 },
    #[error("duplicate frequency {0} Hz")]
    DuplicateFrequency(f64),
    #[error("frequencies must be strictly increasing: {next} Hz follows {prev} Hz")]
    NonIncreasingFrequency { prev: f64, next: f64 },
    #[error("non-finite value in Bode point at {0} Hz")]
    NonFinitePoint(f64),
    #[error("curve is empty")]
    EmptyCurve,
    #[error("lowest decade holds {found} point(s), at least {min} needed for the DC reference")]
    InsufficientLowDecade { found: usize, min: usize },
    #[error("-3 dB crossing at {level_db:.3} dB is not bracketed by the curve")]
    NotBracketed { level_db: f64 },
    #[error("noise gain must be >= 1, got {0}")]
    InvalidNoiseGain(f64),
    #[error("insufficient rolloff: {0}")]
    InsufficientRolloff(String),
    #[error("no plateaus found: waveform is flat")]
    NoPlateaus,
    #[error("waveform is monotone, no plateau-to-plateau transition")]
    Monotone,
    #[error("no complete plateau-to-plateau transition found")]
    NoTransition,
    #[error(
        "no carrier: fundamental is {fundamental_rms:.3e} V rms against {total_rms:.3e} V rms"
    )]
    NoCarrier {
        fundamental_rms: f64,
        total_rms: f64,
    },
    #[error(
        "waveform is not clipped: {top_pct:.1}% of samples on the top rail and {bottom_pct:.1}% on the bottom rail (10% required)"
    )]
    Unclipped { top_pct: f64, bottom_pct: f64 },
}

/// Samples per cycle and number of cycles the waveform covers at `f_hz`.
pub(crate) fn cycle_stats(
    wave: &crate::model::Waveform,
    f_hz: f64,
) -> Result<(f64, f64), AnalysisError> {
    if !(f_hz.is_finite() && f_hz > 0.0) {
        return Err(AnalysisError::InvalidFrequency(f_hz));
    }
    let per_cycle = 1.0 / (f_hz * wave.dt_s());
    let cycles = wave.len() as f64 / per_cycle;
    Ok((per_cycle, cycles))
}
