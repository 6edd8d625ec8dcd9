//! Behavioral op-amp macromodel.
//!
//! The model is the usual first-order behavioral description of a voltage
//! feedback amplifier: a single dominant pole set by the gain-bandwidth
//! product, a slew-rate clamp on the output derivative and a hard clamp on
//! the output swing. It is enough to reproduce both the closed-loop
//! bandwidth collapse and the ramp-like distortion seen on counterfeit
//! TL074 parts.

mod transient;
mod waveform;

use std::f64::consts::PI;

use thiserror::Error;

pub use transient::simulate_transient;
pub use waveform::Waveform;

/// Default open-loop DC gain used when no datasheet figure is available.
pub const DEFAULT_A0_DB: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model parameter {name}: {reason}")]
    InvalidModel { name: &'static str, reason: String },
    #[error("invalid amplifier configuration: {0}")]
    InvalidConfig(String),
    #[error("frequency must be positive and finite, got {0} Hz")]
    NonPositiveFrequency(f64),
    #[error(
        "noise gain {noise_gain} ({noise_gain_db:.2} dB) is not below the open-loop DC gain of {a0_db} dB"
    )]
    InsufficientOpenLoopGain {
        noise_gain: f64,
        noise_gain_db: f64,
        a0_db: f64,
    },
    #[error("output peak must be positive, got {0} V")]
    NonPositivePeak(f64),
    #[error("input waveform is empty")]
    EmptyInput,
    #[error("sample interval {dt_s} s is too coarse: full slewing over one sample ({step_v} V) exceeds 4096 times the output range ({range_v} V)")]
    StepTooCoarse {
        dt_s: f64,
        step_v: f64,
        range_v: f64,
    },
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
}

/// Behavioral parameter set of one op-amp specimen.
#[derive(Debug, Clone, PartialEq)]
pub struct OpAmpModel {
    /// Open-loop DC gain in dB.
    pub a0_db: f64,
    pub gbwp_hz: f64,
    pub sr_v_per_s: f64,
    /// Positive output swing limit (V), must be > 0.
    pub vom_pos_v: f64,
    /// Negative output swing limit (V), must be < 0.
    pub vom_neg_v: f64,
    /// Package-pin quiescent supply current (A).
    pub icc_quiescent_a: f64,
    /// Supply-current increase while one amplifier is driving a signal (A).
    pub icc_active_delta_a: f64,
    pub label: String,
}

impl OpAmpModel {
    /// Genuine TL074CN as characterized on the bench: 5.2 MHz GBWP,
    /// 13 V/µs slew rate, ±13.5 V swing, 1.89 mA quiescent current rising
    /// by 0.5 mA while amplifying.
    pub fn genuine_tl074() -> Self {
        Self {
            a0_db: DEFAULT_A0_DB,
            gbwp_hz: 5.2e6,
            sr_v_per_s: 13.0e6,
            vom_pos_v: 13.5,
            vom_neg_v: -13.5,
            icc_quiescent_a: 1.89e-3,
            icc_active_delta_a: 0.5e-3,
            label: "genuine-tl074".to_string(),
        }
    }

    /// Counterfeit TL074 look-alike: 320 kHz GBWP and a slew rate of
    /// 0.0126 V/µs (onset of slew distortion near 200 Hz at 10 V peak),
    /// 0.42 mA quiescent current with no change while amplifying.
    pub fn counterfeit_tl074() -> Self {
        Self {
            a0_db: DEFAULT_A0_DB,
            gbwp_hz: 320.0e3,
            sr_v_per_s: 0.0126e6,
            vom_pos_v: 13.5,
            vom_neg_v: -13.5,
            icc_quiescent_a: 0.42e-3,
            icc_active_delta_a: 0.0,
            label: "counterfeit-ti-lookalike".to_string(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        fn bad(name: &'static str, reason: impl Into<String>) -> ModelError {
            ModelError::InvalidModel {
                name,
                reason: reason.into(),
            }
        }
        if !self.a0_db.is_finite() {
            return Err(bad("a0_db", "must be finite"));
        }
        if !(self.gbwp_hz.is_finite() && self.gbwp_hz > 0.0) {
            return Err(bad("gbwp_hz", format!("must be > 0, got {}", self.gbwp_hz)));
        }
        if !(self.sr_v_per_s > 0.0) || self.sr_v_per_s.is_nan() {
            return Err(bad(
                "sr_v_per_s",
                format!("must be > 0, got {}", self.sr_v_per_s),
            ));
        }
        if !(self.vom_pos_v > 0.0) {
            return Err(bad(
                "vom_pos_v",
                format!("must be > 0, got {}", self.vom_pos_v),
            ));
        }
        if !(self.vom_neg_v < 0.0) {
            return Err(bad(
                "vom_neg_v",
                format!("must be < 0, got {}", self.vom_neg_v),
            ));
        }
        if !(self.icc_quiescent_a.is_finite() && self.icc_quiescent_a >= 0.0) {
            return Err(bad("icc_quiescent_a", "must be finite and >= 0"));
        }
        if !(self.icc_active_delta_a.is_finite() && self.icc_active_delta_a >= 0.0) {
            return Err(bad("icc_active_delta_a", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Open-loop DC gain as a linear ratio.
    pub fn a0_linear(&self) -> f64 {
        10f64.powf(self.a0_db / 20.0)
    }

    /// Checks that the configuration can be closed around this amplifier,
    /// i.e. the noise gain stays below the open-loop DC gain.
    pub(crate) fn check_config(&self, cfg: &AmpConfig) -> Result<(), ModelError> {
        self.validate()?;
        cfg.validate()?;
        let n = cfg.noise_gain();
        if n >= self.a0_linear() {
            return Err(ModelError::InsufficientOpenLoopGain {
                noise_gain: n,
                noise_gain_db: 20.0 * n.log10(),
                a0_db: self.a0_db,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Inverting,
    NonInverting,
}

impl std::str::FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inverting" => Ok(Topology::Inverting),
            "noninverting" | "non-inverting" => Ok(Topology::NonInverting),
            other => Err(format!(
                "unknown topology '{other}' (expected inverting or noninverting)"
            )),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Topology::Inverting => f.write_str("inverting"),
            Topology::NonInverting => f.write_str("noninverting"),
        }
    }
}

/// Closed-loop amplifier configuration built around one op-amp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpConfig {
    pub topology: Topology,
    /// Closed-loop gain magnitude `G`.
    pub gain_magnitude: f64,
    /// Symmetric supply magnitude (V).
    pub supply_v: f64,
}

impl AmpConfig {
    pub fn inverting(gain: f64) -> Self {
        Self {
            topology: Topology::Inverting,
            gain_magnitude: gain,
            supply_v: 15.0,
        }
    }

    pub fn noninverting(gain: f64) -> Self {
        Self {
            topology: Topology::NonInverting,
            gain_magnitude: gain,
            supply_v: 15.0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let g = self.gain_magnitude;
        if !g.is_finite() {
            return Err(ModelError::InvalidConfig(format!(
                "gain must be finite, got {g}"
            )));
        }
        match self.topology {
            Topology::NonInverting if g < 1.0 => Err(ModelError::InvalidConfig(format!(
                "noninverting gain must be >= 1, got {g}"
            ))),
            Topology::Inverting if g <= 0.0 => Err(ModelError::InvalidConfig(format!(
                "inverting gain must be > 0, got {g}"
            ))),
            _ if !(self.supply_v.is_finite() && self.supply_v > 0.0) => Err(
                ModelError::InvalidConfig(format!("supply must be > 0, got {}", self.supply_v)),
            ),
            _ => Ok(()),
        }
    }

    /// Feedback noise gain: `G + 1` inverting, `G` noninverting.
    pub fn noise_gain(&self) -> f64 {
        match self.topology {
            Topology::Inverting => self.gain_magnitude + 1.0,
            Topology::NonInverting => self.gain_magnitude,
        }
    }

    /// DC transfer including sign.
    pub fn signed_gain(&self) -> f64 {
        match self.topology {
            Topology::Inverting => -self.gain_magnitude,
            Topology::NonInverting => self.gain_magnitude,
        }
    }

    pub fn ideal_phase_deg(&self) -> f64 {
        match self.topology {
            Topology::Inverting => 180.0,
            Topology::NonInverting => 0.0,
        }
    }

    /// Closed-loop -3 dB frequency of the single-pole model.
    pub fn closed_loop_f3db(&self, model: &OpAmpModel) -> f64 {
        model.gbwp_hz / self.noise_gain()
    }
}

/// Wraps an angle in degrees into (-180, 180].
pub fn wrap_degrees(deg: f64) -> f64 {
    let mut w = deg % 360.0;
    if w <= -180.0 {
        w += 360.0;
    } else if w > 180.0 {
        w -= 360.0;
    }
    w
}

/// Single-pole closed-loop response at `f_hz`, as `(gain_db, phase_deg)`.
pub fn closed_loop_gain(
    model: &OpAmpModel,
    cfg: &AmpConfig,
    f_hz: f64,
) -> Result<(f64, f64), ModelError> {
    if !(f_hz.is_finite() && f_hz > 0.0) {
        return Err(ModelError::NonPositiveFrequency(f_hz));
    }
    model.check_config(cfg)?;
    let x = f_hz * cfg.noise_gain() / model.gbwp_hz;
    // 20*log10(G / sqrt(1 + x^2)), with ln_1p to keep the DC limit exact
    let gain_db =
        20.0 * cfg.gain_magnitude.log10() - 10.0 * x.powi(2).ln_1p() / std::f64::consts::LN_10;
    let phase_deg = wrap_degrees(cfg.ideal_phase_deg() - x.atan().to_degrees());
    Ok((gain_db, phase_deg))
}

/// Frequency above which a full-amplitude sine of peak `v_peak_out`
/// demands more than the slew rate: `SR / (2π·Vpeak)`.
pub fn distortion_onset_freq(model: &OpAmpModel, v_peak_out: f64) -> Result<f64, ModelError> {
    model.validate()?;
    if !(v_peak_out > 0.0) {
        return Err(ModelError::NonPositivePeak(v_peak_out));
    }
    Ok(model.sr_v_per_s / (2.0 * PI * v_peak_out))
}

/// Package supply current, with the active increment when `amplifying`.
pub fn predicted_icc(model: &OpAmpModel, amplifying: bool) -> f64 {
    if amplifying {
        model.icc_quiescent_a + model.icc_active_delta_a
    } else {
        model.icc_quiescent_a
    }
}
