//! Counterfeit op-amp screening toolkit.
//!
//! The crate is split along the measurement workflow:
//!
//! - [`model`]: behavioral op-amp macromodel (single pole, slew clamp, rail
//!   clamp) plus supply-current prediction.
//! - [`analysis`]: signature extraction from captures: sine fits, Bode
//!   curves, f3dB / GBWP, slew rate, output swing and a distortion score.
//! - [`screening`]: supply-current population statistics, the separation
//!   statistic `k`, the lower/upper side limits and the verdict logic.
//! - [`dataio`]: CSV capture formats, the component record database, the
//!   thresholds file and synthetic capture generation.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dataio;
pub mod model;
pub mod screening;

pub use analysis::BodeCurve;
pub use model::{AmpConfig, OpAmpModel, Topology, Waveform};
pub use screening::{PopulationStats, ScreeningThresholds, Verdict, VerdictKind};
